//! Variable analysis for parameterized diagrams: multiplicity counting,
//! θ-state builders, input bending, and the extraction transformation that
//! rewrites a pair of diagrams linear in a variable into ground π/4 diagrams
//! fed by θ-states.
//!
//! Phases in this crate are affine in their variables with integer
//! coefficients by construction, so non-linear inputs are unrepresentable
//! here (the text format rejects fractional coefficients at parse time).

use thiserror::Error;

use crate::diagram::{
    cap, h, id_wires, permutation_diagram, seq, tensor, tensor_many, x, z, AngleValue,
    Assignment, Diagram, PhaseExpr,
};
use crate::diagram::gadgets::inv_sqrt2;
use crate::exactnum::Cyclotomic;
use crate::semantics::{interp_exact, interp_float, InterpError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("phase constant `{0}` is not an integer multiple of π/4")]
    ConstantsOutsidePi4(String),
    #[error("extraction of `{var}` requires it to be the only variable, but found {others:?}")]
    MultiVariable { var: String, others: Vec<String> },
}

/// Occurrence counts of one variable in an equation, split by sign and side.
///
/// For each side, `mu_plus` sums the positive coefficients of the variable
/// over all spiders and `mu_minus` sums the negated negative ones; the
/// multiplicity `mu` is `max(mu_plus) + max(mu_minus)` across the two sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub var: String,
    pub mu_plus: (u32, u32),
    pub mu_minus: (u32, u32),
    pub mu: u32,
}

fn side_counts(d: &Diagram, var: &str) -> (u32, u32) {
    let mut plus = 0u32;
    let mut minus = 0u32;
    d.for_each_phase(&mut |p| {
        let c = p.coeff(var);
        if c > 0 {
            plus += c as u32;
        } else {
            minus += (-c) as u32;
        }
    });
    (plus, minus)
}

/// Count signed occurrences of `var` on both sides of an equation.
pub fn multiplicity(d1: &Diagram, d2: &Diagram, var: &str) -> MultiplicityReport {
    let (p1, m1) = side_counts(d1, var);
    let (p2, m2) = side_counts(d2, var);
    MultiplicityReport {
        var: var.to_string(),
        mu_plus: (p1, p2),
        mu_minus: (m1, m2),
        mu: p1.max(p2) + m1.max(m2),
    }
}

/// Multiplicity reports for every variable appearing on either side.
pub fn multiplicity_all(d1: &Diagram, d2: &Diagram) -> Vec<MultiplicityReport> {
    let mut vars = d1.vars();
    vars.extend(d2.vars());
    vars.iter().map(|v| multiplicity(d1, d2, v)).collect()
}

/// θ_r(angle): the r-fold tensor of the state Z[0,1](angle), whose
/// interpretation is the 2^r vector with entry e^{i·|y|·angle} at index y.
pub fn theta(r: usize, angle: PhaseExpr) -> Diagram {
    tensor_many((0..r).map(|_| z(0, 1, angle.clone())))
}

/// True when every phase constant is an integer multiple of π/4 (variables
/// may still occur).
pub fn constants_in_pi4(d: &Diagram) -> bool {
    let mut ok = true;
    d.for_each_phase(&mut |p| {
        if p.const_irr() != 0.0 || !matches!(p.const_pi().1, 1 | 2 | 4) {
            ok = false;
        }
    });
    ok
}

/// True for ground diagrams with every phase an integer multiple of π/4.
pub fn in_pi4_fragment(d: &Diagram) -> bool {
    d.is_ground() && constants_in_pi4(d)
}

pub(crate) fn ensure_constants_pi4(d: &Diagram) -> Result<(), ParamError> {
    let mut bad: Option<String> = None;
    d.for_each_phase(&mut |p| {
        if bad.is_none() && (p.const_irr() != 0.0 || !matches!(p.const_pi().1, 1 | 2 | 4)) {
            bad = Some(format!("{p}"));
        }
    });
    match bad {
        Some(s) => Err(ParamError::ConstantsOutsidePi4(s)),
        None => Ok(()),
    }
}

/// Bend every input of `d` around to an output, yielding a 0→(n+m) state.
///
/// The fresh outputs sit to the left of the original ones, ordered like the
/// inputs they came from, so ⟦bend_inputs(d)⟧ at index (x, y) — x over the
/// old inputs, y over the old outputs — equals ⟦d⟧[y][x].
pub fn bend_inputs(d: &Diagram) -> Diagram {
    let (n, _m) = d.arity();
    if n == 0 {
        return d.clone();
    }
    // n caps side by side produce pairs (b₁b₁ b₂b₂ …); one permutation
    // regroups them into (b₁…bₙ b₁…bₙ).
    let caps = tensor_many((0..n).map(|_| cap()));
    let mut sources = vec![0usize; 2 * n];
    for j in 0..n {
        sources[j] = 2 * j;
        sources[n + j] = 2 * j + 1;
    }
    let pairer = seq(caps, permutation_diagram(&sources)).expect("cap row has 2n outputs");
    seq(pairer, tensor(id_wires(n), d.clone())).expect("bend wires agree")
}

/// Ground rewriting of an equation pair: both sides become π/4-constant
/// diagrams `r → n+m` that reproduce the originals when fed θ_r states.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub d1_prime: Diagram,
    pub d2_prime: Diagram,
    /// number of θ wires (the multiplicity of the variable)
    pub r: usize,
    /// per-side exponent: ⟦dᵢ′ ∘ θ_r(α)⟧ = e^{i·cᵢ·α} · ⟦bend_inputs(dᵢ(α))⟧
    pub c1: u32,
    pub c2: u32,
}

/// One variable's block in a multi-variable extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarBlock {
    pub var: String,
    pub r: usize,
    pub c1: u32,
    pub c2: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiExtraction {
    pub d1_prime: Diagram,
    pub d2_prime: Diagram,
    /// contiguous θ-wire blocks, one per variable, in the order extracted
    pub blocks: Vec<VarBlock>,
}

impl MultiExtraction {
    pub fn total_wires(&self) -> usize {
        self.blocks.iter().map(|b| b.r).sum()
    }
}

fn h_layer(wires: usize) -> Diagram {
    tensor_many((0..wires).map(|_| h()))
}

/// Rewrites `d : a → b` into `d̂ : (a + e) → b` carrying the occurrences of
/// `var` on `e` fresh rightmost inputs, with
/// ⟦d̂ ∘ (id_a ⊗ θ_e(α))⟧ = e^{i·c·α}·⟦d(α)⟧. Returns (d̂, e, c).
fn thread_var(d: &Diagram, var: &str) -> (Diagram, usize, u32) {
    if !d.vars().contains(var) {
        return (d.clone(), 0, 0);
    }
    match d {
        Diagram::Z { inputs, outputs, phase } => thread_spider(*inputs, *outputs, phase, var),
        Diagram::X { inputs, outputs, phase } => {
            // recolor first: X[n,m](p) = H⊗…⊗H ; Z[n,m](p) ; H⊗…⊗H
            let greened = seq(
                h_layer(*inputs),
                seq(z(*inputs, *outputs, phase.clone()), h_layer(*outputs))
                    .expect("H layer matches spider outputs"),
            )
            .expect("H layer matches spider inputs");
            thread_var(&greened, var)
        }
        Diagram::Seq { first, second, .. } => {
            let (ah, ea, ca) = thread_var(first, var);
            let (bh, eb, cb) = thread_var(second, var);
            let d_hat = seq(tensor(ah, id_wires(eb)), bh).expect("threaded seq wires agree");
            (d_hat, ea + eb, ca + cb)
        }
        Diagram::Tensor { left, right, .. } => {
            let (p, _) = left.arity();
            let (s, _) = right.arity();
            let (ah, ea, ca) = thread_var(left, var);
            let (bh, eb, cb) = thread_var(right, var);
            // incoming wires arrive as [p | s | θ_left | θ_right]; route the
            // left block's θ wires inward before splitting
            let route = tensor_many([
                id_wires(p),
                crate::diagram::block_swap(s, ea),
                id_wires(eb),
            ]);
            let d_hat = seq(route, tensor(ah, bh)).expect("threaded tensor wires agree");
            (d_hat, ea + eb, ca + cb)
        }
        _ => (d.clone(), 0, 0),
    }
}

fn thread_spider(inputs: usize, outputs: usize, phase: &PhaseExpr, var: &str) -> (Diagram, usize, u32) {
    let l = phase.coeff(var);
    let rest = phase.sub(&PhaseExpr::var_scaled(var, l));
    if l > 0 {
        let e = l as usize;
        (z(inputs + e, outputs, rest), e, 0)
    } else {
        // negative coefficient: conjugate each θ wire with X(π), which turns
        // θ(α) into e^{iα}·θ(−α)
        let k = (-l) as usize;
        let flips = tensor(
            id_wires(inputs),
            tensor_many((0..k).map(|_| x(1, 1, PhaseExpr::pi_rational(1, 1)))),
        );
        let d_hat = seq(flips, z(inputs + k, outputs, rest)).expect("flip layer width agrees");
        (d_hat, k, k as u32)
    }
}

/// One wire-consuming effect worth √2·e^{i·j·α} against θ₁(α) (j = 1 for the
/// π flavor, 0 otherwise), normalized back by the exact 1/√2 gadget.
fn pad_effect(pi_flavor: bool) -> Diagram {
    let effect = if pi_flavor {
        x(1, 0, PhaseExpr::pi_rational(1, 1))
    } else {
        x(1, 0, PhaseExpr::zero())
    };
    tensor(effect, inv_sqrt2())
}

struct SideExtraction {
    prime: Diagram,
    c: u32,
}

fn extract_side(
    bent: &Diagram,
    var: &str,
    target_plus: u32,
    target_minus: u32,
    plus: u32,
    minus: u32,
) -> SideExtraction {
    let (threaded, e, c) = thread_var(bent, var);
    debug_assert_eq!(e as u32, plus + minus);
    debug_assert_eq!(c, minus);
    let pad_pi = target_minus - minus;
    let pad_zero = target_plus - plus;
    let pads = tensor_many(
        (0..pad_pi)
            .map(|_| pad_effect(true))
            .chain((0..pad_zero).map(|_| pad_effect(false))),
    );
    let prime = if pad_pi + pad_zero == 0 {
        threaded
    } else {
        tensor(threaded, pads)
    };
    SideExtraction { prime, c: c + pad_pi }
}

/// Extraction step for one variable on a pair of already-bent sides; inputs
/// may still carry earlier θ blocks, and other variables may remain.
fn extract_step(
    s1: &Diagram,
    s2: &Diagram,
    var: &str,
) -> (SideExtraction, SideExtraction, usize) {
    let (p1, m1) = side_counts(s1, var);
    let (p2, m2) = side_counts(s2, var);
    let (tp, tm) = (p1.max(p2), m1.max(m2));
    let e1 = extract_side(s1, var, tp, tm, p1, m1);
    let e2 = extract_side(s2, var, tp, tm, p2, m2);
    (e1, e2, (tp + tm) as usize)
}

/// Rewrite both sides of a single-variable equation into ground π/4 diagrams
/// `r → n+m` (r the multiplicity) satisfying, for every α,
/// ⟦dᵢ′ ∘ θ_r(α)⟧ = e^{i·cᵢ·α} · ⟦bend_inputs(dᵢ(α))⟧ with c₁ = c₂ — so the
/// original sides agree at α exactly when the primed sides do on θ_r(α).
pub fn extract(d1: &Diagram, d2: &Diagram, var: &str) -> Result<ExtractionResult, ParamError> {
    ensure_constants_pi4(d1)?;
    ensure_constants_pi4(d2)?;
    let mut others = d1.vars();
    others.extend(d2.vars());
    others.remove(var);
    if !others.is_empty() {
        return Err(ParamError::MultiVariable {
            var: var.to_string(),
            others: others.into_iter().collect(),
        });
    }
    let (e1, e2, r) = extract_step(&bend_inputs(d1), &bend_inputs(d2), var);
    Ok(ExtractionResult {
        d1_prime: e1.prime,
        d2_prime: e2.prime,
        r,
        c1: e1.c,
        c2: e2.c,
    })
}

/// Iterated extraction over several variables (sorted blocks, left to right);
/// variables absent from both sides contribute no block.
pub fn extract_multi(
    d1: &Diagram,
    d2: &Diagram,
    vars: &[&str],
) -> Result<MultiExtraction, ParamError> {
    ensure_constants_pi4(d1)?;
    ensure_constants_pi4(d2)?;
    let mut leftover = d1.vars();
    leftover.extend(d2.vars());
    for v in vars {
        leftover.remove(*v);
    }
    if !leftover.is_empty() {
        return Err(ParamError::MultiVariable {
            var: vars.join(","),
            others: leftover.into_iter().collect(),
        });
    }
    let mut s1 = bend_inputs(d1);
    let mut s2 = bend_inputs(d2);
    let mut blocks = Vec::new();
    let mut sorted: Vec<&str> = vars.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for var in sorted {
        let (e1, e2, r) = extract_step(&s1, &s2, var);
        s1 = e1.prime;
        s2 = e2.prime;
        if r > 0 {
            blocks.push(VarBlock {
                var: var.to_string(),
                r,
                c1: e1.c,
                c2: e2.c,
            });
        }
    }
    Ok(MultiExtraction {
        d1_prime: s1,
        d2_prime: s2,
        blocks,
    })
}

/// Check one side's extraction contract at a concrete angle:
/// ⟦prime ∘ θ_r(α)⟧ = e^{i·c·α} · ⟦bend_inputs(d(α))⟧, exactly for rational-π
/// angles under the order cap, within `tol` otherwise.
pub fn extraction_side_holds(
    d: &Diagram,
    prime: &Diagram,
    r: usize,
    c: u32,
    var: &str,
    angle: AngleValue,
    tol: f64,
) -> Result<bool, InterpError> {
    let assignment: Assignment = [(var.to_string(), angle)].into_iter().collect();
    let ground = d
        .substitute(&assignment)
        .map_err(|e| InterpError::NonGround(e.to_string()))?;
    let lhs = seq(theta(r, PhaseExpr::from_angle(angle)), prime.clone())
        .expect("θ wires match prime inputs");
    let rhs = bend_inputs(&ground);
    match angle {
        AngleValue::PiRational(num, den) => {
            match (interp_exact(&lhs), interp_exact(&rhs)) {
                (Ok(l), Ok(rm)) => {
                    let factor = Cyclotomic::phase_pi(c as i64 * num, den)
                        .map_err(InterpError::from)?;
                    Ok(l.try_eq(&rm.scale(&factor))?)
                }
                _ => extraction_side_holds_float(&lhs, &rhs, c, angle.to_radians(), tol),
            }
        }
        AngleValue::Radians(a) => extraction_side_holds_float(&lhs, &rhs, c, a, tol),
    }
}

fn extraction_side_holds_float(
    lhs: &Diagram,
    rhs: &Diagram,
    c: u32,
    alpha: f64,
    tol: f64,
) -> Result<bool, InterpError> {
    let l = interp_float(lhs)?;
    let r = interp_float(rhs)?;
    let factor = num_complex::Complex64::from_polar(1.0, c as f64 * alpha);
    Ok(l.max_abs_diff(&r.scale(factor)).expect("same shape") <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{empty, id, swap};
    use crate::sample;
    use crate::semantics::{semantic_eq, EqMode, FloatMatrix};
    use proptest::prelude::*;
    use rand::Rng;

    fn var(name: &str) -> PhaseExpr {
        PhaseExpr::var(name)
    }

    #[test]
    fn theta_states() {
        assert_eq!(theta(0, var("a")), empty());
        // r=1 at π: column (1, −1)
        let d = theta(1, PhaseExpr::pi_rational(1, 1));
        let m = interp_exact(&d).unwrap();
        assert!(m.get(0, 0).is_one());
        assert!(m.get(1, 0).try_equal(&Cyclotomic::from_integer(-1, 8)).unwrap());
        // r=2: column (1, e^{iα}, e^{iα}, e^{2iα}) at α = π/3
        let d = theta(2, PhaseExpr::pi_rational(1, 3));
        let m = interp_exact(&d).unwrap();
        let w = Cyclotomic::phase_pi(1, 3).unwrap();
        assert!(m.get(0, 0).is_one());
        assert!(m.get(1, 0).try_equal(&w).unwrap());
        assert!(m.get(2, 0).try_equal(&w).unwrap());
        assert!(m.get(3, 0).try_equal(&(&w * &w)).unwrap());
    }

    #[test]
    fn bend_reshapes_row_major() {
        // bend(Id) behaves as Cap
        assert!(semantic_eq(&bend_inputs(&id()), &cap(), EqMode::Exact).unwrap());
        // bend(H) is the column (1,1,1,−1)/√2
        let m = interp_exact(&bend_inputs(&h())).unwrap();
        let inv = Cyclotomic::sqrt_two().inverse().unwrap();
        for (i, sign) in [1i64, 1, 1, -1].iter().enumerate() {
            let want = inv.scale(&num_rational::BigRational::from_integer((*sign).into()));
            assert!(m.get(i, 0).try_equal(&want).unwrap(), "entry {i}");
        }
        // a 0→m diagram is untouched
        let s = theta(2, PhaseExpr::pi_rational(1, 4));
        assert_eq!(bend_inputs(&s), s);
        // general reshape: ⟦bend d⟧[(x,y)] = ⟦d⟧[y][x]
        let mut rng = sample::rng_from_seed(11);
        for _ in 0..5 {
            let d = sample::random_ground_diagram(&mut rng, sample::PhasePool::Mixed, 3, 2);
            let (n, m_out) = d.arity();
            let dm = interp_float(&d).unwrap();
            let bm = interp_float(&bend_inputs(&d)).unwrap();
            assert_eq!(bm.rows(), 1 << (n + m_out));
            for x_idx in 0..1usize << n {
                for y in 0..1usize << m_out {
                    let got = bm.get((x_idx << m_out) | y, 0);
                    let want = dm.get(y, x_idx);
                    assert!((got - want).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn multiplicity_counts_signed_occurrences() {
        let d1 = z(1, 1, var("a"));
        let d2 = z(1, 1, var("a").neg());
        let rep = multiplicity(&d1, &d2, "a");
        assert_eq!(rep.mu_plus, (1, 0));
        assert_eq!(rep.mu_minus, (0, 1));
        assert_eq!(rep.mu, 2);
        // swapping sides leaves μ unchanged
        assert_eq!(multiplicity(&d2, &d1, "a").mu, 2);

        let zero = multiplicity(&z(1, 1, PhaseExpr::zero()), &z(1, 1, PhaseExpr::zero()), "a");
        assert_eq!(zero.mu, 0);

        // scalar equation with μ_a = 2 and μ_b = 3
        let lhs = tensor(
            z(0, 0, var("a").add(&var("b"))),
            z(0, 0, var("b").sub(&var("a"))),
        );
        let rhs = tensor(
            z(0, 0, var("b").scale(2).add(&PhaseExpr::pi_rational(1, 1))),
            z(0, 0, var("b").neg()),
        );
        assert_eq!(multiplicity(&lhs, &rhs, "a").mu, 2);
        assert_eq!(multiplicity(&lhs, &rhs, "b").mu, 3);
        // coefficients add across spiders: Z(2a);Z(−a) on one side
        let big = seq(z(1, 1, var("a").scale(2)), z(1, 1, var("a").neg())).unwrap();
        let rep = multiplicity(&big, &z(1, 1, PhaseExpr::zero()), "a");
        assert_eq!(rep.mu_plus, (2, 0));
        assert_eq!(rep.mu_minus, (1, 0));
        assert_eq!(rep.mu, 3);
    }

    #[test]
    fn extract_single_occurrence() {
        let d = z(0, 1, var("a"));
        let res = extract(&d, &d, "a").unwrap();
        assert_eq!(res.r, 1);
        assert_eq!((res.c1, res.c2), (0, 0));
        assert_eq!(res.d1_prime.arity(), (1, 1));
        assert!(in_pi4_fragment(&res.d1_prime));
        for angle in [
            AngleValue::PiRational(0, 1),
            AngleValue::PiRational(1, 2),
            AngleValue::PiRational(2, 3),
            AngleValue::Radians(1.234),
        ] {
            assert!(extraction_side_holds(&d, &res.d1_prime, res.r, res.c1, "a", angle, 1e-9)
                .unwrap());
        }
    }

    #[test]
    fn extract_doubled_and_negated_occurrences() {
        let doubled = z(0, 1, var("a").scale(2));
        let res = extract(&doubled, &doubled, "a").unwrap();
        assert_eq!(res.r, 2);
        for angle in [
            AngleValue::PiRational(0, 1),
            AngleValue::PiRational(1, 2),
            AngleValue::PiRational(1, 3),
        ] {
            assert!(extraction_side_holds(&doubled, &res.d1_prime, res.r, res.c1, "a", angle, 1e-9)
                .unwrap());
        }

        let negated = z(0, 1, var("a").neg());
        let res = extract(&negated, &negated, "a").unwrap();
        assert_eq!(res.r, 1);
        assert_eq!((res.c1, res.c2), (1, 1));
        for angle in [AngleValue::PiRational(1, 4), AngleValue::Radians(0.37)] {
            assert!(extraction_side_holds(&negated, &res.d1_prime, res.r, res.c1, "a", angle, 1e-9)
                .unwrap());
        }
    }

    #[test]
    fn extract_balances_mismatched_sides() {
        // LHS uses +a, RHS uses −a: both primes must take μ = 2 wires and
        // share the correction exponent.
        let d1 = z(1, 1, var("a"));
        let d2 = z(1, 1, var("a").neg());
        let res = extract(&d1, &d2, "a").unwrap();
        assert_eq!(res.r, 2);
        assert_eq!(res.c1, res.c2);
        assert_eq!(res.c1, 1);
        assert_eq!(res.d1_prime.arity(), (2, 2));
        assert_eq!(res.d2_prime.arity(), (2, 2));
        assert!(in_pi4_fragment(&res.d1_prime));
        assert!(in_pi4_fragment(&res.d2_prime));
        for (d, prime, c) in [(&d1, &res.d1_prime, res.c1), (&d2, &res.d2_prime, res.c2)] {
            for angle in [
                AngleValue::PiRational(1, 4),
                AngleValue::PiRational(3, 2),
                AngleValue::Radians(2.1),
            ] {
                assert!(extraction_side_holds(d, prime, res.r, c, "a", angle, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn extract_rejects_bad_inputs() {
        let off_grid = z(1, 1, var("a").add(&PhaseExpr::pi_rational(1, 3)));
        assert!(matches!(
            extract(&off_grid, &off_grid, "a"),
            Err(ParamError::ConstantsOutsidePi4(_))
        ));
        let two_vars = z(1, 1, var("a").add(&var("b")));
        assert!(matches!(
            extract(&two_vars, &two_vars, "a"),
            Err(ParamError::MultiVariable { .. })
        ));
    }

    #[test]
    fn extract_multi_blocks() {
        let d = tensor(z(0, 1, var("a")), z(0, 1, var("b")));
        let res = extract_multi(&d, &d, &["a", "b"]).unwrap();
        assert_eq!(res.blocks.len(), 2);
        assert_eq!(res.blocks[0].var, "a");
        assert_eq!(res.blocks[0].r, 1);
        assert_eq!(res.blocks[1].var, "b");
        assert_eq!(res.blocks[1].r, 1);
        assert_eq!(res.total_wires(), 2);
        assert!(res.d1_prime.is_ground());
        // absent variables are dropped
        let res = extract_multi(&d, &d, &["a", "b", "zed"]).unwrap();
        assert_eq!(res.blocks.len(), 2);
    }

    #[test]
    fn extract_multi_postcondition_on_mixed_signs() {
        // d(a,b) with both signs: check ⟦prime ∘ (θ⊗θ)⟧ = e^{iΣcα}·⟦bend d(ᾱ)⟧
        let d = seq(
            z(1, 1, var("a").sub(&var("b"))),
            x(1, 1, var("b").add(&PhaseExpr::pi_rational(1, 4))),
        )
        .unwrap();
        let res = extract_multi(&d, &d, &["a", "b"]).unwrap();
        let mut rng = sample::rng_from_seed(3);
        for _ in 0..5 {
            let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
            let beta = rng.gen_range(0.0..std::f64::consts::TAU);
            let states = tensor_many(res.blocks.iter().map(|b| {
                let angle = if b.var == "a" { alpha } else { beta };
                theta(b.r, PhaseExpr::radians(angle))
            }));
            let lhs = interp_float(&seq(states, res.d1_prime.clone()).unwrap()).unwrap();
            let assignment: Assignment = [
                ("a".to_string(), AngleValue::Radians(alpha)),
                ("b".to_string(), AngleValue::Radians(beta)),
            ]
            .into_iter()
            .collect();
            let ground = d.substitute(&assignment).unwrap();
            let mut rhs = interp_float(&bend_inputs(&ground)).unwrap();
            let phase: f64 = res
                .blocks
                .iter()
                .map(|b| {
                    b.c1 as f64 * if b.var == "a" { alpha } else { beta }
                })
                .sum();
            rhs = rhs.scale(num_complex::Complex64::from_polar(1.0, phase));
            assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-9);
        }
    }

    #[test]
    fn threading_handles_structural_nodes() {
        // variable buried under tensor/seq/swap plumbing
        let d = seq(
            tensor(z(1, 1, var("a")), x(1, 2, var("a").neg())),
            tensor(swap(), id()),
        )
        .unwrap();
        let res = extract(&d, &d, "a").unwrap();
        assert!(in_pi4_fragment(&res.d1_prime));
        for angle in [AngleValue::PiRational(1, 2), AngleValue::Radians(0.9)] {
            assert!(extraction_side_holds(&d, &res.d1_prime, res.r, res.c1, "a", angle, 1e-9)
                .unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn extraction_contract_on_random_instances(seed in 0u64..10_000) {
            let mut rng = sample::rng_from_seed(seed);
            let d1 = sample::random_linear_diagram(&mut rng, &["a"], 3, 2, 3);
            let d2 = sample::random_linear_diagram(&mut rng, &["a"], 3, 2, 3);
            let res = extract(&d1, &d2, "a").unwrap();
            prop_assert_eq!(res.c1, res.c2);
            prop_assert!(in_pi4_fragment(&res.d1_prime));
            prop_assert!(in_pi4_fragment(&res.d2_prime));
            let mu = multiplicity(&d1, &d2, "a").mu;
            prop_assert_eq!(res.r as u32, mu);
            for _ in 0..4 {
                let angle = AngleValue::Radians(rng.gen_range(0.0..std::f64::consts::TAU));
                prop_assert!(
                    extraction_side_holds(&d1, &res.d1_prime, res.r, res.c1, "a", angle, 1e-9)
                        .unwrap()
                );
                prop_assert!(
                    extraction_side_holds(&d2, &res.d2_prime, res.r, res.c2, "a", angle, 1e-9)
                        .unwrap()
                );
            }
            // and exactly at a rational angle
            let angle = AngleValue::PiRational(rng.gen_range(0..8), 4);
            prop_assert!(
                extraction_side_holds(&d1, &res.d1_prime, res.r, res.c1, "a", angle, 0.0).unwrap()
            );
        }

        #[test]
        fn theta_entries_follow_hamming_weight(r in 0usize..5, num in 0i64..8) {
            let angle = PhaseExpr::pi_rational(num, 4);
            let m = interp_exact(&theta(r, angle)).unwrap();
            prop_assert_eq!(m.rows(), 1 << r);
            let w = Cyclotomic::phase_pi(num, 4).unwrap();
            for y in 0..1usize << r {
                let weight = y.count_ones();
                let mut want = Cyclotomic::one(8);
                for _ in 0..weight {
                    want = &want * &w;
                }
                prop_assert!(m.get(y, 0).try_equal(&want).unwrap());
            }
        }
    }

    #[test]
    fn float_matrix_shape_helper_is_consistent() {
        let d = tensor(z(0, 1, PhaseExpr::pi_rational(1, 4)), x(0, 1, PhaseExpr::zero()));
        let m = interp_float(&d).unwrap();
        let t = FloatMatrix::from_exact(&interp_exact(&d).unwrap());
        assert!(m.max_abs_diff(&t).unwrap() < 1e-12);
    }
}
