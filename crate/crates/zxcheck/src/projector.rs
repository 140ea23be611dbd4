//! Symmetric-subspace projectors and the decision procedures for
//! universally-quantified equations between diagrams linear in their angle
//! variables (with π/4 constants).
//!
//! Two independent procedures are provided: a finite grid of angle valuations
//! whose size is driven by variable multiplicities, and a projector
//! comparison that rewrites the equation with [`crate::paramlin::extract_multi`]
//! and compares both sides on the image of the symmetric projector. They must
//! agree; the `Both` method enforces that.

use std::collections::BTreeMap;

use num_rational::BigRational;
use thiserror::Error;

use crate::diagram::{seq, x, AngleValue, Assignment, Diagram, PhaseExpr};
use crate::exactnum::{Cyclotomic, ExactMatrix, MAX_ORDER};
use crate::paramlin::{extract_multi, multiplicity, theta, MultiplicityReport, ParamError};
use crate::semantics::{interp_exact, interp_float, required_exact_order_joint, InterpError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecideError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("grid and projector methods disagree (grid: {grid}, projector: {projector}); this indicates a bug, please report the input")]
    MethodsDisagree { grid: bool, projector: bool },
    #[error("diagram is not symmetric under wire permutations")]
    NotSymmetric,
    #[error("no port {port}: diagram has {inputs} inputs and {outputs} outputs")]
    NoSuchPort {
        port: usize,
        inputs: usize,
        outputs: usize,
    },
}

/// Decision method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid,
    Projector,
    Both,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Grid => write!(f, "grid"),
            Method::Projector => write!(f, "projector"),
            Method::Both => write!(f, "both"),
        }
    }
}

/// A concrete angle assignment at which the two sides differ.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub assignment: Assignment,
    /// largest entrywise |difference| at the witness (float evaluation)
    pub discrepancy: f64,
}

/// Outcome of [`decide_forall`].
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub method: Method,
    pub witness: Option<Witness>,
    /// true when the grid had to be evaluated in floating point because the
    /// exact field order would have exceeded the cap
    pub float_fallback: bool,
    /// multiplicity per variable
    pub mu: BTreeMap<String, u32>,
}

// ---------------------------------------------------------------------------
// Projector matrices
// ---------------------------------------------------------------------------

/// The 4×4 symmetrizer ½(I + SWAP): identity on |00⟩ and |11⟩, averaging on
/// the middle two basis states.
pub fn r_matrix() -> ExactMatrix {
    let half = Cyclotomic::from_rational(BigRational::new(1.into(), 2.into()), 8);
    let one = Cyclotomic::one(8);
    let mut m = ExactMatrix::zeros(4, 4, 8);
    m.set(0, 0, one.clone());
    m.set(3, 3, one);
    for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        m.set(i, j, half.clone());
    }
    m
}

/// Projector onto the span of the θ_r states, with its wire count.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    pub r: usize,
    pub matrix: ExactMatrix,
}

/// The rank-(r+1) projector P_r: column x maps to the sum of all basis
/// states of Hamming weight p when x is the staircase word 1^p 0^(r−p), and
/// to zero otherwise.
pub fn p_matrix(r: usize) -> ProjectorFamily {
    assert!(r >= 2, "the projector family starts at two wires");
    let dim = 1usize << r;
    let mut m = ExactMatrix::zeros(dim, dim, 8);
    let one = Cyclotomic::one(8);
    for y in 0..dim {
        let p = y.count_ones() as usize;
        // staircase word 1^p 0^(r-p), reading wires left to right
        let x = if p == 0 { 0 } else { ((1usize << p) - 1) << (r - p) };
        m.set(y, x, one.clone());
    }
    ProjectorFamily { r, matrix: m }
}

/// The exact θ_r(jπ/r) states for j = 0..r — a basis of the symmetric span.
pub fn vandermonde_basis(r: usize) -> Vec<ExactMatrix> {
    assert!(r >= 1);
    (0..=r)
        .map(|j| {
            interp_exact(&theta(r, PhaseExpr::pi_rational(j as i64, r as u64)))
                .expect("θ states with denominator ≤ r stay under the order cap")
        })
        .collect()
}

/// Reorder the qubits of a 2^r-row matrix: row bit j of the result reads row
/// bit `tau[j]` of the input (columns are untouched).
pub fn permute_qubits(m: &ExactMatrix, tau: &[usize]) -> ExactMatrix {
    let r = tau.len();
    assert_eq!(m.rows(), 1 << r, "row count must be 2^len(tau)");
    ExactMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let mut src = 0usize;
        for (bit, &t) in tau.iter().enumerate() {
            let b = (i >> (r - 1 - bit)) & 1;
            src |= b << (r - 1 - t);
        }
        m.get(src, j).clone()
    })
}

/// True when the 0→r state is invariant under every wire permutation
/// (adjacent transpositions suffice, since they generate all of them).
pub fn is_symmetric(d: &Diagram) -> Result<bool, DecideError> {
    let (n, r) = d.arity();
    if n != 0 {
        return Err(InterpError::ArityMismatch {
            left_in: n,
            left_out: r,
            right_in: 0,
            right_out: r,
        }
        .into());
    }
    let m = interp_exact(d)?;
    for k in 0..r.saturating_sub(1) {
        let mut tau: Vec<usize> = (0..r).collect();
        tau.swap(k, k + 1);
        if !m.try_eq(&permute_qubits(&m, &tau)).map_err(InterpError::from)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Compose the basis effect/state X(jπ) into one boundary port. Ports number
/// the inputs 0..n, then the outputs n..n+m. Plugging j=0 (j=1) applies the
/// unnormalized basis vector √2·|0⟩ (√2·|1⟩) at that port.
pub fn plug_basis(d: &Diagram, port: usize, j: u8) -> Result<Diagram, DecideError> {
    let (n, m) = d.arity();
    if port >= n + m {
        return Err(DecideError::NoSuchPort {
            port,
            inputs: n,
            outputs: m,
        });
    }
    let phase = PhaseExpr::pi_rational(j as i64, 1);
    let plugged = if port < n {
        // state into input `port`: Id^port ⊗ X[0,1](jπ) ⊗ Id^(n-port-1), then d
        let layer = crate::diagram::tensor_many([
            crate::diagram::id_wires(port),
            x(0, 1, phase),
            crate::diagram::id_wires(n - port - 1),
        ]);
        seq(layer, d.clone()).expect("plug layer matches inputs")
    } else {
        let k = port - n;
        let layer = crate::diagram::tensor_many([
            crate::diagram::id_wires(k),
            x(1, 0, phase),
            crate::diagram::id_wires(m - k - 1),
        ]);
        seq(d.clone(), layer).expect("plug layer matches outputs")
    };
    Ok(plugged)
}

// ---------------------------------------------------------------------------
// decide_forall
// ---------------------------------------------------------------------------

fn ensure_preconditions(d1: &Diagram, d2: &Diagram) -> Result<(), DecideError> {
    if d1.arity() != d2.arity() {
        let (li, lo) = d1.arity();
        let (ri, ro) = d2.arity();
        return Err(InterpError::ArityMismatch {
            left_in: li,
            left_out: lo,
            right_in: ri,
            right_out: ro,
        }
        .into());
    }
    for d in [d1, d2] {
        crate::paramlin::ensure_constants_pi4(d)?;
    }
    Ok(())
}

struct Grid {
    vars: Vec<String>,
    /// per-variable angle lists (2πj/(μ+1) as rational multiples of π)
    angles: Vec<Vec<AngleValue>>,
}

impl Grid {
    fn new(reports: &[MultiplicityReport]) -> Self {
        let mut vars = Vec::new();
        let mut angles = Vec::new();
        for rep in reports {
            vars.push(rep.var.clone());
            let points = rep.mu + 1;
            angles.push(
                (0..points)
                    .map(|j| AngleValue::PiRational(2 * j as i64, points as u64))
                    .collect(),
            );
        }
        Grid { vars, angles }
    }

    fn points(&self) -> GridIter<'_> {
        GridIter {
            grid: self,
            index: vec![0; self.vars.len()],
            done: false,
        }
    }
}

struct GridIter<'a> {
    grid: &'a Grid,
    index: Vec<usize>,
    done: bool,
}

impl Iterator for GridIter<'_> {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        if self.done {
            return None;
        }
        let point: Assignment = (0..self.grid.vars.len())
            .map(|k| (self.grid.vars[k].clone(), self.grid.angles[k][self.index[k]]))
            .collect();
        // odometer increment
        let mut carried = true;
        for (slot, list) in self.index.iter_mut().zip(&self.grid.angles) {
            *slot += 1;
            if *slot < list.len() {
                carried = false;
                break;
            }
            *slot = 0;
        }
        if carried {
            self.done = true;
        }
        Some(point)
    }
}

/// Whether the whole grid can be evaluated exactly: the joint field order of
/// both sides at any grid point divides lcm(8, 2(μᵢ+1), side constants).
fn grid_exactness(d1: &Diagram, d2: &Diagram, reports: &[MultiplicityReport]) -> bool {
    let mut order: u64 = match required_exact_order_joint(&[&ground_skeleton(d1), &ground_skeleton(d2)]) {
        Ok(o) => o,
        Err(_) => return false,
    };
    for rep in reports {
        order = num_integer::lcm(order, 2 * (rep.mu as u64 + 1));
        if order > MAX_ORDER {
            return false;
        }
    }
    true
}

/// The diagram with all variables set to zero — used to probe the constant
/// part's field order.
fn ground_skeleton(d: &Diagram) -> Diagram {
    let assignment: Assignment = d
        .vars()
        .into_iter()
        .map(|v| (v, AngleValue::PiRational(0, 1)))
        .collect();
    d.substitute(&assignment).expect("all variables bound")
}

fn float_discrepancy(d1: &Diagram, d2: &Diagram, point: &Assignment) -> Result<f64, DecideError> {
    let g1 = d1.substitute(point).map_err(|e| InterpError::NonGround(e.to_string()))?;
    let g2 = d2.substitute(point).map_err(|e| InterpError::NonGround(e.to_string()))?;
    let m1 = interp_float(&g1)?;
    let m2 = interp_float(&g2)?;
    Ok(m1.max_abs_diff(&m2).expect("equal arities"))
}

fn grid_decide(
    d1: &Diagram,
    d2: &Diagram,
    reports: &[MultiplicityReport],
    tol: f64,
) -> Result<(bool, Option<Witness>, bool), DecideError> {
    let grid = Grid::new(reports);
    let exact = grid_exactness(d1, d2, reports);
    for point in grid.points() {
        let equal = if exact {
            let g1 = d1
                .substitute(&point)
                .map_err(|e| InterpError::NonGround(e.to_string()))?;
            let g2 = d2
                .substitute(&point)
                .map_err(|e| InterpError::NonGround(e.to_string()))?;
            let m1 = interp_exact(&g1)?;
            let m2 = interp_exact(&g2)?;
            m1.try_eq(&m2).map_err(InterpError::from)?
        } else {
            float_discrepancy(d1, d2, &point)? <= tol
        };
        if !equal {
            let discrepancy = float_discrepancy(d1, d2, &point)?;
            return Ok((
                false,
                Some(Witness {
                    assignment: point,
                    discrepancy,
                }),
                !exact,
            ));
        }
    }
    Ok((true, None, !exact))
}

/// Compare ⟦dᵢ′·P_r̄⟧ without materializing the exponentially large projector:
/// P's nonzero columns are indexed by per-block staircase words, and each one
/// sums the columns of a per-block Hamming-weight class.
fn projector_decide(d1: &Diagram, d2: &Diagram, vars: &[&str]) -> Result<bool, DecideError> {
    let ext = extract_multi(d1, d2, vars)?;
    let m1 = interp_exact(&ext.d1_prime)?;
    let m2 = interp_exact(&ext.d2_prime)?;
    let blocks: Vec<usize> = ext.blocks.iter().map(|b| b.r).collect();
    let total: usize = blocks.len();
    let wires: usize = blocks.iter().sum();
    let rows = m1.rows();
    // enumerate weight classes p̄ ∈ ∏ (0..=r_i)
    let mut weights = vec![0usize; total];
    loop {
        // sum columns whose per-block Hamming weights equal `weights`
        let mut s1 = vec![Cyclotomic::zero(8); rows];
        let mut s2 = vec![Cyclotomic::zero(8); rows];
        for col in 0..1usize << wires {
            if !column_in_class(col, wires, &blocks, &weights) {
                continue;
            }
            for i in 0..rows {
                s1[i] = &s1[i] + m1.get(i, col);
                s2[i] = &s2[i] + m2.get(i, col);
            }
        }
        for i in 0..rows {
            if !s1[i].try_equal(&s2[i]).map_err(InterpError::from)? {
                return Ok(false);
            }
        }
        // odometer over weight classes
        let mut carried = true;
        for (w, r) in weights.iter_mut().zip(&blocks) {
            *w += 1;
            if *w <= *r {
                carried = false;
                break;
            }
            *w = 0;
        }
        if carried {
            return Ok(true);
        }
    }
}

fn column_in_class(col: usize, wires: usize, blocks: &[usize], weights: &[usize]) -> bool {
    let mut offset = 0usize;
    for (r, want) in blocks.iter().zip(weights) {
        let mut w = 0usize;
        for bit in 0..*r {
            // wire `offset + bit` counted from the left = bit (wires-1-…)
            if col >> (wires - 1 - (offset + bit)) & 1 == 1 {
                w += 1;
            }
        }
        if w != *want {
            return false;
        }
        offset += r;
    }
    true
}

/// Decide whether two diagrams linear in their variables (π/4 constants) are
/// semantically equal at every assignment of real angles.
pub fn decide_forall(d1: &Diagram, d2: &Diagram, method: Method) -> Result<Verdict, DecideError> {
    decide_forall_tol(d1, d2, method, 1e-9)
}

/// [`decide_forall`] with an explicit tolerance for the float fallback path.
pub fn decide_forall_tol(
    d1: &Diagram,
    d2: &Diagram,
    method: Method,
    tol: f64,
) -> Result<Verdict, DecideError> {
    ensure_preconditions(d1, d2)?;
    let mut vars = d1.vars();
    vars.extend(d2.vars());
    let vars: Vec<String> = vars.into_iter().collect();
    let reports: Vec<MultiplicityReport> =
        vars.iter().map(|v| multiplicity(d1, d2, v)).collect();
    let mu: BTreeMap<String, u32> = reports.iter().map(|r| (r.var.clone(), r.mu)).collect();

    let grid_result = match method {
        Method::Grid | Method::Both => Some(grid_decide(d1, d2, &reports, tol)?),
        Method::Projector => None,
    };
    let projector_result = match method {
        Method::Projector | Method::Both => {
            let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
            Some(projector_decide(d1, d2, &refs)?)
        }
        Method::Grid => None,
    };

    if let (Some((g, _, _)), Some(p)) = (&grid_result, &projector_result) {
        if *g != *p {
            return Err(DecideError::MethodsDisagree {
                grid: *g,
                projector: *p,
            });
        }
    }

    let (holds, witness, float_fallback) = match (grid_result, projector_result) {
        (Some(r), _) => r,
        (None, Some(true)) => (true, None, false),
        (None, Some(false)) => {
            // recover a concrete witness from the grid (one must exist there)
            let (_, witness, fallback) = grid_decide(d1, d2, &reports, tol)?;
            (false, witness, fallback)
        }
        (None, None) => unreachable!("some method always runs"),
    };

    Ok(Verdict {
        holds,
        method,
        witness,
        float_fallback,
        mu,
    })
}

/// Report for [`check_symmetric_substitution`]: the universally-quantified
/// premise on θ states and the instance conclusion on the given state.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCheck {
    pub premise: Verdict,
    pub conclusion_holds: bool,
}

/// Semantic instance of the symmetric-substitution principle: when
/// `d1 ∘ θ_r(α) = d2 ∘ θ_r(α)` holds for all α (decided by grid), composing
/// any symmetric 0→r state into d1, d2 must also give equal maps.
pub fn check_symmetric_substitution(
    d1: &Diagram,
    d2: &Diagram,
    state: &Diagram,
) -> Result<SymmetricCheck, DecideError> {
    if !is_symmetric(state)? {
        return Err(DecideError::NotSymmetric);
    }
    let (_, r) = state.arity();
    let fresh = fresh_var(d1, d2);
    let t = theta(r, PhaseExpr::var(&fresh));
    let lhs = seq(t.clone(), d1.clone()).map_err(|_| arity_error(d1, r))?;
    let rhs = seq(t, d2.clone()).map_err(|_| arity_error(d2, r))?;
    let premise = decide_forall(&lhs, &rhs, Method::Grid)?;
    let c1 = seq(state.clone(), d1.clone()).expect("state arity was checked");
    let c2 = seq(state.clone(), d2.clone()).expect("state arity was checked");
    let m1 = interp_exact(&c1);
    let conclusion_holds = match (m1, interp_exact(&c2)) {
        (Ok(a), Ok(b)) => a.try_eq(&b).map_err(InterpError::from)?,
        _ => {
            let a = interp_float(&c1)?;
            let b = interp_float(&c2)?;
            a.max_abs_diff(&b).expect("equal arities") <= 1e-9
        }
    };
    Ok(SymmetricCheck {
        premise,
        conclusion_holds,
    })
}

fn arity_error(d: &Diagram, r: usize) -> DecideError {
    let (n, m) = d.arity();
    InterpError::ArityMismatch {
        left_in: n,
        left_out: m,
        right_in: r,
        right_out: 0,
    }
    .into()
}

fn fresh_var(d1: &Diagram, d2: &Diagram) -> String {
    let mut used = d1.vars();
    used.extend(d2.vars());
    let mut name = "theta_angle".to_string();
    while used.contains(&name) {
        name.push('_');
    }
    name
}
