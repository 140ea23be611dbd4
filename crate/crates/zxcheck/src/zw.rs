//! White-spider terms over complex parameters (with the binary W node and
//! fermionic swap), their interpretation, and the two semantics-preserving
//! translations between them and the phase-spider terms.
//!
//! Interpretation picks a backend automatically: whenever every complex
//! parameter in the term is recognized as `(a + b·√2)/d · e^{iπ·p/q}` with
//! small integer data, the matrix is computed exactly in a cyclotomic field;
//! otherwise everything runs in `f64`.

use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use crate::diagram::gadgets::{
    cz, effect_half, effect_int, effect_prod, effect_sum, effect_zero, w_branch,
};
use crate::diagram::{cap, cup, empty, id_wires, seq, swap, tensor, x, z, z0, Diagram, PhaseExpr};
use crate::exactnum::{Cyclotomic, ExactMatrix};
use crate::semantics::{interp_exact, interp_float, FloatMatrix, InterpError, Matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZwError {
    #[error("cannot compose: first factor has {outputs} outputs, second expects {inputs} inputs")]
    ArityMismatch { outputs: usize, inputs: usize },
}

/// A term of the white-spider calculus. Wire conventions match [`Diagram`]:
/// `Seq(a, b)` runs `a` first, tensor factors list the leftmost (most
/// significant) wire first.
#[derive(Debug, Clone, PartialEq)]
pub enum ZwDiagram {
    /// n→m white spider: matrix is all zeros except 1 at the top-left corner
    /// and `param` at the bottom-right. The 0→0 case is the scalar 1 + param.
    ZSpider {
        inputs: usize,
        outputs: usize,
        param: Complex64,
    },
    /// 1→1 node [[0,1],[1,0]].
    W11,
    /// 1→2 node: |0⟩ ↦ |01⟩ + |10⟩, |1⟩ ↦ |00⟩.
    W12,
    Swap,
    /// The swap with a −1 on the |11⟩⟨11| corner.
    FermionicCross,
    /// 2→0, the effect ⟨00| + ⟨11|.
    Cup,
    /// 0→2, the state |00⟩ + |11⟩.
    Cap,
    Empty,
    /// the scalar 1 + param
    WhiteDotScalar { param: Complex64 },
    Seq {
        first: Box<ZwDiagram>,
        second: Box<ZwDiagram>,
        arity: (usize, usize),
    },
    Tensor {
        left: Box<ZwDiagram>,
        right: Box<ZwDiagram>,
        arity: (usize, usize),
    },
}

impl ZwDiagram {
    pub fn arity(&self) -> (usize, usize) {
        match self {
            ZwDiagram::ZSpider {
                inputs, outputs, ..
            } => (*inputs, *outputs),
            ZwDiagram::W11 => (1, 1),
            ZwDiagram::W12 => (1, 2),
            ZwDiagram::Swap | ZwDiagram::FermionicCross => (2, 2),
            ZwDiagram::Cup => (2, 0),
            ZwDiagram::Cap => (0, 2),
            ZwDiagram::Empty | ZwDiagram::WhiteDotScalar { .. } => (0, 0),
            ZwDiagram::Seq { arity, .. } | ZwDiagram::Tensor { arity, .. } => *arity,
        }
    }

    fn for_each_param(&self, f: &mut impl FnMut(Complex64)) {
        match self {
            ZwDiagram::ZSpider { param, .. } | ZwDiagram::WhiteDotScalar { param } => f(*param),
            ZwDiagram::Seq { first, second, .. } => {
                first.for_each_param(f);
                second.for_each_param(f);
            }
            ZwDiagram::Tensor { left, right, .. } => {
                left.for_each_param(f);
                right.for_each_param(f);
            }
            _ => {}
        }
    }
}

pub fn zw_spider(inputs: usize, outputs: usize, param: Complex64) -> ZwDiagram {
    ZwDiagram::ZSpider {
        inputs,
        outputs,
        param,
    }
}

/// The identity wire, written as the parameter-1 spider diag(1, 1).
pub fn zw_id() -> ZwDiagram {
    zw_spider(1, 1, Complex64::new(1.0, 0.0))
}

pub fn zw_wdot(param: Complex64) -> ZwDiagram {
    ZwDiagram::WhiteDotScalar { param }
}

pub fn zw_seq(first: ZwDiagram, second: ZwDiagram) -> Result<ZwDiagram, ZwError> {
    let (n1, m1) = first.arity();
    let (n2, m2) = second.arity();
    if m1 != n2 {
        return Err(ZwError::ArityMismatch {
            outputs: m1,
            inputs: n2,
        });
    }
    Ok(ZwDiagram::Seq {
        first: Box::new(first),
        second: Box::new(second),
        arity: (n1, m2),
    })
}

pub fn zw_tensor(left: ZwDiagram, right: ZwDiagram) -> ZwDiagram {
    let (n1, m1) = left.arity();
    let (n2, m2) = right.arity();
    ZwDiagram::Tensor {
        left: Box::new(left),
        right: Box::new(right),
        arity: (n1 + n2, m1 + m2),
    }
}

pub fn zw_tensor_many(items: impl IntoIterator<Item = ZwDiagram>) -> ZwDiagram {
    items
        .into_iter()
        .reduce(zw_tensor)
        .unwrap_or(ZwDiagram::Empty)
}

fn zws(a: ZwDiagram, b: ZwDiagram) -> ZwDiagram {
    zw_seq(a, b).expect("arities match by construction")
}

// ---------------------------------------------------------------------------
// Derived pieces used by the translations
// ---------------------------------------------------------------------------

/// The 2→1 merge [[0,1,1,0],[1,0,0,0]], obtained by bending both legs of the
/// branch node with cups and caps (the node is symmetric in its outputs, so
/// no extra swap is needed).
pub fn zw_w21() -> ZwDiagram {
    let two = zw_tensor(zw_id(), zw_id());
    let grow = zw_tensor(two.clone(), ZwDiagram::Cap);
    let branch = zw_tensor(two, zw_tensor(ZwDiagram::W12, zw_id()));
    let contract_inner = zw_tensor(zw_id(), zw_tensor(ZwDiagram::Cup, zw_tensor(zw_id(), zw_id())));
    let contract_outer = zw_tensor(ZwDiagram::Cup, zw_id());
    zws(zws(zws(grow, branch), contract_inner), contract_outer)
}

/// |0⟩ ↦ |00⟩, |1⟩ ↦ |01⟩ + |10⟩ — the branch node pre-twisted by W11.
fn w12_prime() -> ZwDiagram {
    zws(ZwDiagram::W11, ZwDiagram::W12)
}

/// The matching 2→1 half: |00⟩ ↦ |0⟩, |01⟩, |10⟩ ↦ |1⟩, |11⟩ ↦ 0.
fn w21_prime() -> ZwDiagram {
    zws(zw_w21(), ZwDiagram::W11)
}

/// Parameter addition: for 1→1 arguments diag(1, r) and diag(1, s) this
/// composes to diag(1, r + s).
pub fn zw_add(a: ZwDiagram, b: ZwDiagram) -> ZwDiagram {
    zws(w12_prime(), zws(zw_tensor(a, b), w21_prime()))
}

fn zw_ones() -> ZwDiagram {
    zws(
        zw_spider(1, 0, Complex64::new(1.0, 0.0)),
        zw_spider(0, 1, Complex64::new(1.0, 0.0)),
    )
}

fn zw_minus() -> ZwDiagram {
    zw_spider(1, 1, Complex64::new(-1.0, 0.0))
}

/// A realization of the Hadamard map: the parameter-sum gadget produces
/// [[1,1],[1,−1]] and a white dot supplies the 1/√2 normalization.
pub fn zw_h() -> ZwDiagram {
    let core = zw_add(zw_add(zw_ones(), zw_minus()), zw_minus());
    zw_tensor(
        zw_wdot(Complex64::new(1.0 / std::f64::consts::SQRT_2 - 1.0, 0.0)),
        core,
    )
}

/// A realization of the triangle map [[1,1],[0,1]].
pub fn zw_triangle() -> ZwDiagram {
    zws(ZwDiagram::W11, zw_add(zw_ones(), zw_minus()))
}

// ---------------------------------------------------------------------------
// Parameter recognition
// ---------------------------------------------------------------------------

/// A complex parameter recognized as `(a + b·√2)/den · e^{iπ·p/q}` with a
/// dyadic denominator — the fragment the exact backend can host.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SnappedParam {
    a: i64,
    b: i64,
    den: u64,
    p: i64,
    q: u64,
}

const SNAP_TOL: f64 = 1e-9;

impl SnappedParam {
    fn to_cyclotomic(&self) -> Cyclotomic {
        let base = &Cyclotomic::from_integer(self.a, 8)
            + &Cyclotomic::sqrt_two().scale(&BigRational::from_integer(self.b.into()));
        let scaled = base.scale(&BigRational::new(1.into(), self.den.into()));
        let phase = Cyclotomic::phase_pi(self.p, self.q).expect("snap checked the order cap");
        &scaled * &phase
    }

    fn to_complex(&self) -> Complex64 {
        let magnitude =
            (self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2) / self.den as f64;
        magnitude * Complex64::from_polar(1.0, std::f64::consts::PI * self.p as f64 / self.q as f64)
    }
}

/// Try to recognize a parameter in the exactly-representable fragment.
pub(crate) fn snap_complex(r: Complex64) -> Option<SnappedParam> {
    if r.norm() <= 1e-12 {
        return Some(SnappedParam {
            a: 0,
            b: 0,
            den: 1,
            p: 0,
            q: 1,
        });
    }
    // phase: arg(r)/π as p/q with the smallest workable q
    let t = r.arg() / std::f64::consts::PI;
    let (p, q) = (1..=120u64).find_map(|q| {
        let p = (t * q as f64).round() as i64;
        let close = (t - p as f64 / q as f64).abs() <= 1e-11;
        (close && Cyclotomic::required_order(2 * q).is_ok()).then_some((p, q))
    })?;
    // magnitude: (a + b√2)/den with dyadic den, preferring small b and den
    let m = r.norm();
    let (a, b, den) = [1u64, 2, 4, 8, 16, 32, 64].iter().find_map(|&den| {
        (0..=64i64)
            .flat_map(|mag| if mag == 0 { vec![0] } else { vec![mag, -mag] })
            .find_map(|b| {
                let residue = m * den as f64 - b as f64 * std::f64::consts::SQRT_2;
                let a = residue.round();
                (a.abs() <= 4096.0 && (residue - a).abs() <= SNAP_TOL * den as f64)
                    .then_some((a as i64, b, den))
            })
    })?;
    let snapped = SnappedParam { a, b, den, p, q };
    let err = (snapped.to_complex() - r).norm();
    (err <= SNAP_TOL * r.norm().max(1.0)).then_some(snapped)
}

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

fn exact_generator(d: &ZwDiagram) -> Option<ExactMatrix> {
    let one = Cyclotomic::one(8);
    Some(match d {
        ZwDiagram::ZSpider {
            inputs,
            outputs,
            param,
        } => {
            let corner = snap_complex(*param)?.to_cyclotomic();
            let (rows, cols) = (1usize << outputs, 1usize << inputs);
            let mut m = ExactMatrix::zeros(rows, cols, 8);
            if rows == 1 && cols == 1 {
                m.set(0, 0, &one + &corner);
            } else {
                m.set(0, 0, one);
                m.set(rows - 1, cols - 1, corner);
            }
            m
        }
        ZwDiagram::WhiteDotScalar { param } => {
            let corner = snap_complex(*param)?.to_cyclotomic();
            ExactMatrix::scalar(&one + &corner)
        }
        ZwDiagram::W11 => int_matrix(2, 2, &[(0, 1, 1), (1, 0, 1)]),
        ZwDiagram::W12 => int_matrix(4, 2, &[(0, 1, 1), (1, 0, 1), (2, 0, 1)]),
        ZwDiagram::Swap => int_matrix(4, 4, &[(0, 0, 1), (1, 2, 1), (2, 1, 1), (3, 3, 1)]),
        ZwDiagram::FermionicCross => {
            int_matrix(4, 4, &[(0, 0, 1), (1, 2, 1), (2, 1, 1), (3, 3, -1)])
        }
        ZwDiagram::Cup => int_matrix(1, 4, &[(0, 0, 1), (0, 3, 1)]),
        ZwDiagram::Cap => int_matrix(4, 1, &[(0, 0, 1), (3, 0, 1)]),
        ZwDiagram::Empty => ExactMatrix::identity(1, 8),
        ZwDiagram::Seq { first, second, .. } => {
            let a = exact_generator(first)?;
            let b = exact_generator(second)?;
            b.mul(&a).expect("arities checked at construction")
        }
        ZwDiagram::Tensor { left, right, .. } => {
            exact_generator(left)?.kron(&exact_generator(right)?)
        }
    })
}

fn int_matrix(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(rows, cols, 8);
    for &(i, j, v) in entries {
        m.set(i, j, Cyclotomic::from_integer(v, 8));
    }
    m
}

fn float_generator(d: &ZwDiagram) -> FloatMatrix {
    let one = Complex64::new(1.0, 0.0);
    match d {
        ZwDiagram::ZSpider {
            inputs,
            outputs,
            param,
        } => {
            let (rows, cols) = (1usize << outputs, 1usize << inputs);
            let mut m = FloatMatrix::zeros(rows, cols);
            if rows == 1 && cols == 1 {
                m.set(0, 0, one + param);
            } else {
                m.set(0, 0, one);
                m.set(rows - 1, cols - 1, *param);
            }
            m
        }
        ZwDiagram::WhiteDotScalar { param } => {
            let mut m = FloatMatrix::zeros(1, 1);
            m.set(0, 0, one + param);
            m
        }
        ZwDiagram::W11 => float_from(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]),
        ZwDiagram::W12 => float_from(4, 2, &[(0, 1, 1.0), (1, 0, 1.0), (2, 0, 1.0)]),
        ZwDiagram::Swap => float_from(4, 4, &[(0, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0), (3, 3, 1.0)]),
        ZwDiagram::FermionicCross => {
            float_from(4, 4, &[(0, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0), (3, 3, -1.0)])
        }
        ZwDiagram::Cup => float_from(1, 4, &[(0, 0, 1.0), (0, 3, 1.0)]),
        ZwDiagram::Cap => float_from(4, 1, &[(0, 0, 1.0), (3, 0, 1.0)]),
        ZwDiagram::Empty => FloatMatrix::identity(1),
        ZwDiagram::Seq { first, second, .. } => float_generator(second)
            .mul(&float_generator(first))
            .expect("arities checked at construction"),
        ZwDiagram::Tensor { left, right, .. } => {
            float_generator(left).kron(&float_generator(right))
        }
    }
}

fn float_from(rows: usize, cols: usize, entries: &[(usize, usize, f64)]) -> FloatMatrix {
    let mut m = FloatMatrix::zeros(rows, cols);
    for &(i, j, v) in entries {
        m.set(i, j, Complex64::new(v, 0.0));
    }
    m
}

/// Interpret a term, exactly when every parameter snaps into the
/// representable fragment and in floating point otherwise.
pub fn interp_zw(d: &ZwDiagram) -> Matrix {
    let mut all_snap = true;
    d.for_each_param(&mut |p| all_snap &= snap_complex(p).is_some());
    if all_snap {
        if let Some(m) = exact_generator(d) {
            return Matrix::Exact(m);
        }
    }
    Matrix::Float(float_generator(d))
}

/// Interpret a term in floating point unconditionally.
pub fn interp_zw_float(d: &ZwDiagram) -> FloatMatrix {
    float_generator(d)
}

// ---------------------------------------------------------------------------
// Complex-number decomposition
// ---------------------------------------------------------------------------

/// `z = 2^n · cos(beta) · e^{i·theta}` with the smallest workable n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub n: u32,
    /// in [0, 2π)
    pub theta: f64,
    /// in [0, π/2]
    pub beta: f64,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Complex64 {
        Complex64::from_polar(f64::powi(2.0, self.n as i32) * self.beta.cos(), self.theta)
    }
}

/// Split a complex number as 2ⁿ·cos(β)·e^{iθ} with n = max(0, ⌈log₂|z|⌉).
pub fn decompose(value: Complex64) -> Decomposition {
    let rho = value.norm();
    if rho == 0.0 {
        return Decomposition {
            n: 0,
            theta: 0.0,
            beta: std::f64::consts::FRAC_PI_2,
        };
    }
    let mut n = rho.log2().ceil().max(0.0) as u32;
    while rho > f64::powi(2.0, n as i32) {
        n += 1;
    }
    let beta = (rho / f64::powi(2.0, n as i32)).clamp(0.0, 1.0).acos();
    let mut theta = value.arg();
    if theta < 0.0 {
        theta += std::f64::consts::TAU;
    }
    if theta >= std::f64::consts::TAU {
        theta = 0.0;
    }
    Decomposition { n, theta, beta }
}

// ---------------------------------------------------------------------------
// Translations
// ---------------------------------------------------------------------------

/// Translate a ground phase-spider term: green spiders become white spiders
/// with the phase on the unit circle, red spiders conjugate through the
/// Hadamard image, and structural generators map to themselves.
///
/// Panics when the diagram still contains variables.
pub fn to_zw(d: &Diagram) -> ZwDiagram {
    let angle = |phase: &PhaseExpr| -> Complex64 {
        let r = phase
            .to_radians()
            .expect("translation requires a ground diagram");
        Complex64::from_polar(1.0, r)
    };
    match d {
        Diagram::Z {
            inputs,
            outputs,
            phase,
        } => zw_spider(*inputs, *outputs, angle(phase)),
        Diagram::X {
            inputs,
            outputs,
            phase,
        } => {
            let core = zw_spider(*inputs, *outputs, angle(phase));
            let hn = zw_tensor_many((0..*inputs).map(|_| zw_h()));
            let hm = zw_tensor_many((0..*outputs).map(|_| zw_h()));
            zws(zws(hn, core), hm)
        }
        Diagram::H => zw_h(),
        Diagram::Id => zw_id(),
        Diagram::Swap => ZwDiagram::Swap,
        Diagram::Cup => ZwDiagram::Cup,
        Diagram::Cap => ZwDiagram::Cap,
        Diagram::Empty => ZwDiagram::Empty,
        Diagram::Triangle => zw_triangle(),
        Diagram::Seq { first, second, .. } => zws(to_zw(first), to_zw(second)),
        Diagram::Tensor { left, right, .. } => zw_tensor(to_zw(left), to_zw(right)),
    }
}

/// A 1→0 effect with matrix (1, r): the workhorse realizing white-spider
/// corners among phase spiders. Exact whenever `r` snaps into the
/// representable fragment, within 1e-9 otherwise.
pub fn corner_effect(r: Complex64) -> Diagram {
    if let Some(s) = snap_complex(r) {
        return corner_effect_exact(&s);
    }
    // r = 2^{n-1} · (e^{i(θ+β)} + e^{i(θ-β)})
    let d = decompose(r);
    let pair = effect_sum(
        z(1, 0, PhaseExpr::radians(d.theta + d.beta)),
        z(1, 0, PhaseExpr::radians(d.theta - d.beta)),
    );
    match d.n {
        0 => effect_prod(effect_half(), pair),
        1 => pair,
        n => effect_prod(effect_int(1 << (n - 1)), pair),
    }
}

/// Effect (1, √2), as the sum of the two eighth-root phases.
fn effect_sqrt2() -> Diagram {
    effect_sum(
        z(1, 0, PhaseExpr::pi_rational(1, 4)),
        z(1, 0, PhaseExpr::pi_rational(-1, 4)),
    )
}

fn negate_effect(e: Diagram) -> Diagram {
    seq(z(1, 1, PhaseExpr::pi_rational(1, 1)), e).expect("phase layer is 1→1")
}

fn corner_effect_exact(s: &SnappedParam) -> Diagram {
    let int_part = match s.a {
        0 => None,
        a if a > 0 => Some(effect_int(a as u64)),
        a => Some(negate_effect(effect_int(a.unsigned_abs()))),
    };
    let root_part = match s.b {
        0 => None,
        1 => Some(effect_sqrt2()),
        -1 => Some(negate_effect(effect_sqrt2())),
        b if b > 0 => Some(effect_prod(effect_int(b as u64), effect_sqrt2())),
        b => Some(negate_effect(effect_prod(
            effect_int(b.unsigned_abs()),
            effect_sqrt2(),
        ))),
    };
    let mut e = match (int_part, root_part) {
        (Some(a), Some(b)) => effect_sum(a, b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => effect_zero(),
    };
    for _ in 0..s.den.trailing_zeros() {
        e = effect_prod(effect_half(), e);
    }
    if s.p.rem_euclid(2 * s.q as i64) != 0 {
        e = seq(z(1, 1, PhaseExpr::pi_rational(s.p, s.q)), e).expect("phase layer is 1→1");
    }
    e
}

/// Translate a white-spider term to phase spiders, preserving semantics.
/// Spiders whose parameter lies on the unit circle at a recognizable
/// rational angle become plain phase spiders; everything else routes the
/// parameter through [`corner_effect`].
pub fn to_zx(d: &ZwDiagram) -> Diagram {
    match d {
        ZwDiagram::ZSpider {
            inputs,
            outputs,
            param,
        } => {
            if let Some(phase) = unit_phase_of(*param) {
                return z(*inputs, *outputs, phase);
            }
            let spread = z0(*inputs, *outputs + 1);
            seq(
                spread,
                tensor(id_wires(*outputs), corner_effect(*param)),
            )
            .expect("corner wire count matches")
        }
        ZwDiagram::W11 => x(1, 1, PhaseExpr::pi_rational(1, 1)),
        ZwDiagram::W12 => w_branch(),
        ZwDiagram::Swap => swap(),
        ZwDiagram::FermionicCross => seq(swap(), cz()).expect("both are 2→2"),
        ZwDiagram::Cup => cup(),
        ZwDiagram::Cap => cap(),
        ZwDiagram::Empty => empty(),
        ZwDiagram::WhiteDotScalar { param } => {
            seq(z0(0, 1), corner_effect(*param)).expect("state feeds the effect")
        }
        ZwDiagram::Seq { first, second, .. } => {
            seq(to_zx(first), to_zx(second)).expect("translation preserves arities")
        }
        ZwDiagram::Tensor { left, right, .. } => tensor(to_zx(left), to_zx(right)),
    }
}

/// When `r` lies on the unit circle, return its angle as a phase — as an
/// exact rational multiple of π when recognizable, in radians otherwise.
fn unit_phase_of(r: Complex64) -> Option<PhaseExpr> {
    if let Some(s) = snap_complex(r) {
        if s.a as u64 == s.den && s.b == 0 {
            return Some(PhaseExpr::pi_rational(s.p, s.q));
        }
        return None;
    }
    ((r.norm() - 1.0).abs() <= 1e-12).then(|| PhaseExpr::radians(r.arg()))
}

// ---------------------------------------------------------------------------
// Round trip
// ---------------------------------------------------------------------------

/// Outcome of comparing ⟦to_zx(to_zw(d))⟧ against ⟦d⟧.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripVerdict {
    pub holds: bool,
    /// true when the comparison ran in exact arithmetic
    pub exact: bool,
    /// float path only: the largest entrywise |difference|
    pub max_abs_diff: Option<f64>,
}

/// Translate a ground diagram out to white spiders and back, then compare
/// interpretations — exactly when both sides evaluate exactly, within 1e-9
/// otherwise.
pub fn roundtrip_check(d: &Diagram) -> Result<RoundtripVerdict, InterpError> {
    let back = to_zx(&to_zw(d));
    if let (Ok(a), Ok(b)) = (interp_exact(d), interp_exact(&back)) {
        let holds = a.try_eq(&b)?;
        return Ok(RoundtripVerdict {
            holds,
            exact: true,
            max_abs_diff: None,
        });
    }
    let a = interp_float(d)?;
    let b = interp_float(&back)?;
    let diff = a
        .max_abs_diff(&b)
        .expect("translation preserves arities");
    Ok(RoundtripVerdict {
        holds: diff <= 1e-9,
        exact: false,
        max_abs_diff: Some(diff),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::gadgets::value_sqrt2;
    use crate::diagram::{h, triangle};
    use crate::sample;
    use crate::semantics::EqMode;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exact_of(d: &ZwDiagram) -> ExactMatrix {
        match interp_zw(d) {
            Matrix::Exact(m) => m,
            Matrix::Float(_) => panic!("expected the exact backend for {d:?}"),
        }
    }

    fn assert_int_entries(m: &ExactMatrix, expected: &[&[i64]]) {
        assert_eq!(m.rows(), expected.len());
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(m.cols(), row.len());
            for (j, &v) in row.iter().enumerate() {
                assert!(
                    m.get(i, j)
                        .try_equal(&Cyclotomic::from_integer(v, 8))
                        .unwrap(),
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn generator_matrices_match_their_definitions() {
        assert_int_entries(&exact_of(&ZwDiagram::W11), &[&[0, 1], &[1, 0]]);
        assert_int_entries(
            &exact_of(&ZwDiagram::W12),
            &[&[0, 1], &[1, 0], &[1, 0], &[0, 0]],
        );
        assert_int_entries(
            &exact_of(&ZwDiagram::FermionicCross),
            &[
                &[1, 0, 0, 0],
                &[0, 0, 1, 0],
                &[0, 1, 0, 0],
                &[0, 0, 0, -1],
            ],
        );
        assert_int_entries(&exact_of(&ZwDiagram::Cup), &[&[1, 0, 0, 1]]);
        assert_int_entries(&exact_of(&ZwDiagram::Cap), &[&[1], &[0], &[0], &[1]]);
        assert_int_entries(&exact_of(&ZwDiagram::Empty), &[&[1]]);
        // diag(1, r) for a recognizable r
        let third = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let m = exact_of(&zw_spider(1, 1, third));
        assert!(m.get(0, 0).try_equal(&Cyclotomic::one(8)).unwrap());
        assert!(m.get(0, 1).is_zero() && m.get(1, 0).is_zero());
        assert!(m
            .get(1, 1)
            .try_equal(&Cyclotomic::phase_pi(1, 3).unwrap())
            .unwrap());
        // the fermionic cross squares to the identity
        let sq = zw_seq(ZwDiagram::FermionicCross, ZwDiagram::FermionicCross).unwrap();
        assert!(exact_of(&sq)
            .try_eq(&ExactMatrix::identity(4, 8))
            .unwrap());
        // the annihilating white dot
        let m = exact_of(&zw_wdot(c(-1.0, 0.0)));
        assert!(m.get(0, 0).is_zero());
        // 0→0 spiders are the same scalar family
        let m = exact_of(&zw_spider(0, 0, c(-1.0, 0.0)));
        assert!(m.get(0, 0).is_zero());
    }

    #[test]
    fn float_backend_used_for_unrecognizable_parameters() {
        let d = zw_spider(1, 1, c(0.3614, 0.777));
        match interp_zw(&d) {
            Matrix::Float(m) => {
                assert_eq!(m.get(1, 1), c(0.3614, 0.777));
                assert_eq!(m.get(0, 0), c(1.0, 0.0));
            }
            Matrix::Exact(_) => panic!("arbitrary parameters cannot be exact"),
        }
    }

    #[test]
    fn merge_node_is_the_bent_branch() {
        assert_eq!(zw_w21().arity(), (2, 1));
        assert_int_entries(&exact_of(&zw_w21()), &[&[0, 1, 1, 0], &[1, 0, 0, 0]]);
    }

    #[test]
    fn parameter_addition_gadget() {
        // exact instance: e^{iπ/3} + e^{-iπ/3} = 1, so the sum collapses to
        // the identity spider
        let a = zw_spider(1, 1, Complex64::from_polar(1.0, std::f64::consts::PI / 3.0));
        let b = zw_spider(1, 1, Complex64::from_polar(1.0, -std::f64::consts::PI / 3.0));
        let sum = zw_add(a, b);
        assert!(exact_of(&sum).try_eq(&ExactMatrix::identity(2, 8)).unwrap());
        // float instance: arbitrary parameters add
        let (r1, r2) = (c(0.25, -1.3), c(2.125, 0.6));
        let sum = zw_add(zw_spider(1, 1, r1), zw_spider(1, 1, r2));
        let m = interp_zw_float(&sum);
        assert!((m.get(1, 1) - (r1 + r2)).norm() < 1e-12);
        assert!((m.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(m.get(0, 1).norm() < 1e-12 && m.get(1, 0).norm() < 1e-12);
    }

    #[test]
    fn hadamard_and_triangle_realizations() {
        let hw = exact_of(&zw_h());
        let target = interp_exact(&h()).unwrap();
        assert!(hw.try_eq(&target).unwrap());
        assert_int_entries(&exact_of(&zw_triangle()), &[&[1, 1], &[0, 1]]);
    }

    #[test]
    fn snap_recognizes_the_advertised_fragment() {
        // pure rational
        let s = snap_complex(c(0.75, 0.0)).unwrap();
        assert_eq!((s.a, s.b, s.den, s.p, s.q), (3, 0, 4, 0, 1));
        // unit-circle rational angle
        let s = snap_complex(Complex64::from_polar(1.0, 7.0 * std::f64::consts::PI / 12.0)).unwrap();
        assert_eq!((s.a, s.b, s.den, s.p, s.q), (1, 0, 1, 7, 12));
        // the Hadamard normalization 1/√2 − 1 = (2 − √2)/2 · e^{iπ}
        let s = snap_complex(c(1.0 / std::f64::consts::SQRT_2 - 1.0, 0.0)).unwrap();
        assert_eq!((s.a, s.b, s.den), (2, -1, 2));
        assert_eq!(s.p.rem_euclid(2 * s.q as i64), s.q as i64);
        // zero
        let s = snap_complex(c(0.0, 0.0)).unwrap();
        assert_eq!((s.a, s.b), (0, 0));
        // arbitrary values do not snap
        assert!(snap_complex(c(0.3614, 0.777)).is_none());
        assert!(snap_complex(Complex64::from_polar(1.0, 1.1)).is_none());
        // a snapped value reconstructs itself
        let v = c(-2.5, 0.0);
        let s = snap_complex(v).unwrap();
        assert!((s.to_complex() - v).norm() < 1e-12);
        assert!((s.to_cyclotomic().to_complex() - v).norm() < 1e-12);
    }

    #[test]
    fn decompose_pins_the_advertised_values() {
        let d = decompose(c(1.0 / std::f64::consts::SQRT_2, 0.0));
        assert_eq!(d.n, 0);
        assert_eq!(d.theta, 0.0);
        assert!((d.beta - std::f64::consts::FRAC_PI_4).abs() < 1e-12);

        let d = decompose(c(1.0, 0.0));
        assert_eq!((d.n, d.theta, d.beta), (0, 0.0, 0.0));

        let z = Complex64::from_polar(3.0, std::f64::consts::PI / 5.0);
        let d = decompose(z);
        assert_eq!(d.n, 2);
        assert!((d.theta - std::f64::consts::PI / 5.0).abs() < 1e-12);
        assert!((d.beta - (0.75f64).acos()).abs() < 1e-12);
        assert!((d.reconstruct() - z).norm() <= 1e-12 * z.norm().max(1.0));

        let d = decompose(c(0.0, 0.0));
        assert_eq!((d.n, d.theta, d.beta), (0, 0.0, std::f64::consts::FRAC_PI_2));

        // negative reals take theta = π
        let d = decompose(c(-5.0, 0.0));
        assert_eq!(d.n, 3);
        assert!((d.theta - std::f64::consts::PI).abs() < 1e-15);
        assert!((d.beta - (5.0f64 / 8.0).acos()).abs() < 1e-12);
    }

    #[test]
    fn decompose_is_total_on_a_large_disc() {
        let mut rng = sample::rng_from_seed(77);
        for _ in 0..100_000 {
            let z = Complex64::from_polar(
                rng.gen_range(0.0..1_000_000.0f64),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let d = decompose(z);
            assert!(d.theta >= 0.0 && d.theta < std::f64::consts::TAU);
            assert!(d.beta >= 0.0 && d.beta <= std::f64::consts::FRAC_PI_2);
            assert!(
                (d.reconstruct() - z).norm() <= 1e-12 * z.norm().max(1.0),
                "reconstruction failed for {z}"
            );
        }
    }

    #[test]
    fn corner_effect_hits_its_targets() {
        // exact targets
        for (r, expect) in [
            (c(1.0, 0.0), Cyclotomic::one(8)),
            (c(-1.0, 0.0), Cyclotomic::from_integer(-1, 8)),
            (c(5.0, 0.0), Cyclotomic::from_integer(5, 8)),
            (c(0.0, 0.0), Cyclotomic::zero(8)),
            (
                c(-0.75, 0.0),
                Cyclotomic::from_rational(BigRational::new((-3).into(), 4.into()), 8),
            ),
            (
                c(1.0 / std::f64::consts::SQRT_2 - 1.0, 0.0),
                &Cyclotomic::sqrt_two().scale(&BigRational::new(1.into(), 2.into()))
                    + &Cyclotomic::from_integer(-1, 8),
            ),
            (
                Complex64::from_polar(1.0, 3.0 * std::f64::consts::PI / 4.0),
                Cyclotomic::phase_pi(3, 4).unwrap(),
            ),
        ] {
            let e = corner_effect(r);
            assert_eq!(e.arity(), (1, 0));
            let m = interp_exact(&e).unwrap();
            assert!(
                m.get(0, 0).try_equal(&Cyclotomic::one(8)).unwrap(),
                "first entry for r = {r}"
            );
            assert!(
                m.get(0, 1).try_equal(&expect).unwrap(),
                "corner entry for r = {r}"
            );
        }
        // float target from the stated example
        let r = 0.35 * Complex64::from_polar(1.0, 1.1);
        let m = interp_float(&corner_effect(r)).unwrap();
        assert!((m.get(0, 0) - c(1.0, 0.0)).norm() <= 1e-9);
        assert!((m.get(0, 1) - r).norm() <= 1e-9);
        // large magnitudes pick up doubling factors
        let r = c(-37.25, 14.0);
        let m = interp_float(&corner_effect(r)).unwrap();
        assert!((m.get(0, 1) - r).norm() <= 1e-9 * r.norm());
    }

    #[test]
    fn translation_of_each_generator_preserves_semantics() {
        let cases: Vec<ZwDiagram> = vec![
            ZwDiagram::W11,
            ZwDiagram::W12,
            ZwDiagram::Swap,
            ZwDiagram::FermionicCross,
            ZwDiagram::Cup,
            ZwDiagram::Cap,
            ZwDiagram::Empty,
            zw_wdot(c(1.0, 0.0)),
            zw_spider(2, 1, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            zw_spider(0, 1, c(3.0, 0.0)),
        ];
        for d in &cases {
            let image = to_zx(d);
            assert_eq!(image.arity(), d.arity());
            let a = exact_of(d);
            let b = interp_exact(&image).unwrap();
            assert!(a.try_eq(&b).unwrap(), "{d:?}");
        }
        // wdot(1) is the scalar 2
        let two = to_zx(&zw_wdot(c(1.0, 0.0)));
        assert!(crate::semantics::semantic_eq(&two, &crate::diagram::gadgets::value_two(), EqMode::Exact)
            .unwrap());
        // a spider with a float parameter lands within 1e-9
        let r = Complex64::from_polar(3.0, std::f64::consts::PI / 5.0);
        let d = zw_spider(0, 1, r);
        let m = interp_float(&to_zx(&d)).unwrap();
        assert!((m.get(0, 0) - c(1.0, 0.0)).norm() <= 1e-9);
        assert!((m.get(1, 0) - r).norm() <= 1e-9 * r.norm());
    }

    #[test]
    fn zx_to_zw_preserves_semantics_on_generators() {
        // the green spider becomes diag(1, e^{iα}) directly
        let d = z(1, 1, PhaseExpr::pi_rational(1, 3));
        match to_zw(&d) {
            ZwDiagram::ZSpider {
                inputs: 1,
                outputs: 1,
                param,
            } => {
                assert!((param - Complex64::from_polar(1.0, std::f64::consts::PI / 3.0)).norm() < 1e-12)
            }
            other => panic!("unexpected image {other:?}"),
        }
        // structural generators map to themselves
        assert_eq!(to_zw(&cup()), ZwDiagram::Cup);
        assert_eq!(to_zw(&cap()), ZwDiagram::Cap);
        assert_eq!(to_zw(&swap()), ZwDiagram::Swap);
        assert_eq!(to_zw(&empty()), ZwDiagram::Empty);
        // every generator's image interprets to the same matrix
        let generators = vec![
            z(2, 1, PhaseExpr::pi_rational(1, 4)),
            x(1, 2, PhaseExpr::pi_rational(1, 2)),
            h(),
            crate::diagram::id(),
            swap(),
            cup(),
            cap(),
            empty(),
            triangle(),
        ];
        for g in &generators {
            let image = to_zw(g);
            assert_eq!(image.arity(), g.arity());
            let want = interp_exact(g).unwrap();
            let got = exact_of(&image);
            assert!(got.try_eq(&want).unwrap(), "{g:?}");
        }
    }

    #[test]
    fn roundtrip_on_generators_is_exact() {
        let generators = vec![
            h(),
            z(2, 1, PhaseExpr::pi_rational(1, 4)),
            x(1, 1, PhaseExpr::pi_rational(1, 1)),
            crate::diagram::id(),
            swap(),
            cup(),
            cap(),
            empty(),
            triangle(),
            value_sqrt2(),
        ];
        for g in &generators {
            let verdict = roundtrip_check(g).unwrap();
            assert!(verdict.holds, "{g:?}");
            assert!(verdict.exact, "{g:?} should compare exactly");
        }
    }

    #[test]
    fn roundtrip_on_float_angles_stays_within_tolerance() {
        let mut rng = sample::rng_from_seed(41);
        for _ in 0..20 {
            let d = sample::random_ground_diagram(&mut rng, sample::PhasePool::Mixed, 3, 3);
            let verdict = roundtrip_check(&d).unwrap();
            assert!(
                verdict.holds,
                "roundtrip failed with gap {:?}",
                verdict.max_abs_diff
            );
        }
    }

    #[test]
    fn translations_preserve_semantics_on_random_diagrams() {
        let mut rng = sample::rng_from_seed(97);
        // phase spiders → white spiders
        for i in 0..200 {
            let d = sample::random_ground_diagram(&mut rng, sample::PhasePool::Mixed, 3, 2);
            let image = to_zw(&d);
            assert_eq!(image.arity(), d.arity());
            match (interp_exact(&d), interp_zw(&image)) {
                (Ok(a), Matrix::Exact(b)) => {
                    assert!(a.try_eq(&b).unwrap(), "instance {i} exact mismatch")
                }
                _ => {
                    let a = interp_float(&d).unwrap();
                    let b = interp_zw_float(&image);
                    let gap = a.max_abs_diff(&b).unwrap();
                    assert!(gap <= 1e-9, "instance {i} gap {gap}");
                }
            }
        }
        // white spiders → phase spiders
        for i in 0..200 {
            let d = sample::random_zw_diagram(&mut rng, 3, 3);
            let image = to_zx(&d);
            assert_eq!(image.arity(), d.arity());
            let a = interp_zw_float(&d);
            let b = interp_float(&image).unwrap();
            let gap = a.max_abs_diff(&b).unwrap();
            let scale = a.entries().iter().map(|e| e.norm()).fold(1.0f64, f64::max);
            assert!(gap <= 1e-9 * scale, "instance {i} gap {gap}");
        }
    }

    #[test]
    fn parameter_arithmetic_identities_survive_translation() {
        // sequential spiders multiply parameters; the add gadget sums them —
        // and both identities persist under the phase-spider translation
        let mut rng = sample::rng_from_seed(13);
        for _ in 0..25 {
            let r1 = Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..6.28));
            let r2 = Complex64::from_polar(rng.gen_range(0.1..2.0), rng.gen_range(0.0..6.28));
            let fused = zw_seq(zw_spider(1, 1, r1), zw_spider(1, 1, r2)).unwrap();
            let direct = zw_spider(1, 1, r1 * r2);
            let gap = interp_zw_float(&fused)
                .max_abs_diff(&interp_zw_float(&direct))
                .unwrap();
            assert!(gap < 1e-12);
            let a = interp_float(&to_zx(&fused)).unwrap();
            let b = interp_float(&to_zx(&direct)).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() <= 1e-9);

            let summed = zw_add(zw_spider(1, 1, r1), zw_spider(1, 1, r2));
            let direct = zw_spider(1, 1, r1 + r2);
            let a = interp_float(&to_zx(&summed)).unwrap();
            let b = interp_float(&to_zx(&direct)).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() <= 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn snapped_parameters_reconstruct(a in -50i64..50, b in -8i64..8, k in 0u32..4, p in -12i64..12, q in 1u64..13) {
            let den = 1u64 << k;
            let value = (a as f64 + b as f64 * std::f64::consts::SQRT_2) / den as f64
                * Complex64::from_polar(1.0, std::f64::consts::PI * p as f64 / q as f64);
            let s = snap_complex(value).expect("fragment members must snap");
            prop_assert!((s.to_complex() - value).norm() <= 1e-9 * value.norm().max(1.0));
            prop_assert!((s.to_cyclotomic().to_complex() - value).norm() <= 1e-9 * value.norm().max(1.0));
        }

        #[test]
        fn corner_effect_is_faithful_on_random_values(re in -4.0f64..4.0, im in -4.0f64..4.0) {
            let r = c(re, im);
            let m = interp_float(&corner_effect(r)).unwrap();
            prop_assert!((m.get(0, 0) - c(1.0, 0.0)).norm() <= 1e-9);
            prop_assert!((m.get(0, 1) - r).norm() <= 1e-9 * r.norm().max(1.0));
        }
    }
}
