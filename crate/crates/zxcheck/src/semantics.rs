//! Matrix interpretation of ground diagrams.
//!
//! A diagram with `n` inputs and `m` outputs denotes a `2^m × 2^n` matrix:
//! sequential composition is matrix product, side-by-side composition is the
//! Kronecker product with the left factor most significant. Two backends are
//! available. The exact backend works in a cyclotomic field and is available
//! whenever every phase is a rational multiple of π small enough to fit under
//! the field-order cap; the float backend always works on ground diagrams.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::diagram::{Diagram, PhaseExpr};
use crate::exactnum::{Cyclotomic, CycloError, ExactMatrix, MAX_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("diagram contains the variable `{0}`; interpretation needs a ground diagram")]
    NonGround(String),
    #[error("exact evaluation unavailable: {0}")]
    ExactUnavailable(String),
    #[error("unsupported phase scale {0}: only scales ≡ 1 (mod 8) preserve the generator algebra")]
    UnsupportedScale(i64),
    #[error("arity mismatch: one side is {left_in}→{left_out}, the other {right_in}→{right_out}")]
    ArityMismatch {
        left_in: usize,
        left_out: usize,
        right_in: usize,
        right_out: usize,
    },
}

impl From<CycloError> for InterpError {
    fn from(e: CycloError) -> Self {
        InterpError::ExactUnavailable(e.to_string())
    }
}

/// Which number system to evaluate in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

/// How to compare two interpretations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EqMode {
    Exact,
    Tol(f64),
}

// ---------------------------------------------------------------------------
// Float matrices
// ---------------------------------------------------------------------------

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl FloatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FloatMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        FloatMatrix { rows, cols, entries }
    }

    pub fn from_exact(m: &ExactMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).to_complex())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mul(&self, rhs: &FloatMatrix) -> Result<FloatMatrix, InterpError> {
        if self.cols != rhs.rows {
            return Err(InterpError::ArityMismatch {
                left_in: self.cols,
                left_out: self.rows,
                right_in: rhs.cols,
                right_out: rhs.rows,
            });
        }
        let mut out = FloatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * rhs.get(k, j));
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, rhs: &FloatMatrix) -> FloatMatrix {
        let mut out = FloatMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.get(ia, ja);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for ib in 0..rhs.rows {
                    for jb in 0..rhs.cols {
                        out.set(ia * rhs.rows + ib, ja * rhs.cols + jb, a * rhs.get(ib, jb));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> FloatMatrix {
        FloatMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn scale(&self, by: Complex64) -> FloatMatrix {
        FloatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * by).collect(),
        }
    }

    /// Largest entrywise absolute difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, rhs: &FloatMatrix) -> Option<f64> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return None;
        }
        Some(
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }
}

pub(crate) use crate::diagram::fmt_f64_sig;

pub(crate) fn fmt_complex(c: Complex64) -> String {
    let re = fmt_f64_sig(c.re);
    let im = fmt_f64_sig(c.im);
    if im == "0" {
        return re;
    }
    let (sign, mag) = if let Some(stripped) = im.strip_prefix('-') {
        ("-", stripped.to_string())
    } else {
        ("+", im)
    };
    if re == "0" {
        format!("{}{}i", if sign == "-" { "-" } else { "" }, mag)
    } else {
        format!("{re}{sign}{mag}i")
    }
}

impl fmt::Display for FloatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| fmt_complex(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Backend-tagged result
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Exact(ExactMatrix),
    Float(FloatMatrix),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Exact(m) => m.rows(),
            Matrix::Float(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Exact(m) => m.cols(),
            Matrix::Float(m) => m.cols(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Matrix::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&ExactMatrix> {
        match self {
            Matrix::Exact(m) => Some(m),
            Matrix::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> FloatMatrix {
        match self {
            Matrix::Exact(m) => FloatMatrix::from_exact(m),
            Matrix::Float(m) => m.clone(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matrix::Exact(m) => m.fmt(f),
            Matrix::Float(m) => m.fmt(f),
        }
    }
}

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

fn check_ground(d: &Diagram) -> Result<(), InterpError> {
    let vars = d.vars();
    match vars.into_iter().next() {
        Some(v) => Err(InterpError::NonGround(v)),
        None => Ok(()),
    }
}

/// e^{i·phase} for a ground phase, or the reason it has no exact value.
fn exact_unit(phase: &PhaseExpr, order: u64) -> Result<Cyclotomic, InterpError> {
    debug_assert!(phase.is_ground());
    if phase.const_irr() != 0.0 {
        return Err(InterpError::ExactUnavailable(format!(
            "phase {} radians is not a rational multiple of π",
            phase.const_irr()
        )));
    }
    let (num, den) = phase.const_pi();
    Ok(Cyclotomic::phase_pi(num, den)?.lift(order)?)
}

/// The smallest valid cyclotomic order that can express every phase in `d`.
///
/// Fails when a phase has an irrational part or when the needed order exceeds
/// the cap, with the offending quantity in the message.
pub fn required_exact_order(d: &Diagram) -> Result<u64, InterpError> {
    let mut order: u64 = 8;
    let mut err: Option<InterpError> = None;
    d.for_each_phase(&mut |p| {
        if err.is_some() {
            return;
        }
        if p.const_irr() != 0.0 {
            err = Some(InterpError::ExactUnavailable(format!(
                "phase {} radians is not a rational multiple of π",
                p.const_irr()
            )));
            return;
        }
        let (_, den) = p.const_pi();
        match Cyclotomic::required_order(2 * den) {
            Ok(o) => {
                order = num_integer::lcm(order, o);
                if order > MAX_ORDER {
                    err = Some(CycloError::OrderTooLarge(order).into());
                }
            }
            Err(e) => err = Some(e.into()),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(order),
    }
}

/// Joint order for evaluating several diagrams in one comparison.
pub fn required_exact_order_joint(ds: &[&Diagram]) -> Result<u64, InterpError> {
    let mut order = 8;
    for d in ds {
        order = num_integer::lcm(order, required_exact_order(d)?);
        if order > MAX_ORDER {
            return Err(CycloError::OrderTooLarge(order).into());
        }
    }
    Ok(order)
}

struct ExactEval {
    order: u64,
    /// generator cache keyed by (inputs, outputs, phase num, phase den, is_x)
    spiders: HashMap<(usize, usize, i64, u64, bool), ExactMatrix>,
    h_powers: Vec<ExactMatrix>,
}

impl ExactEval {
    fn new(order: u64) -> Result<Self, InterpError> {
        let inv_rt2 = Cyclotomic::sqrt_two_at(order).inverse()?;
        let mut h = ExactMatrix::zeros(2, 2, order);
        h.set(0, 0, inv_rt2.clone());
        h.set(0, 1, inv_rt2.clone());
        h.set(1, 0, inv_rt2.clone());
        h.set(1, 1, -&inv_rt2);
        let h_powers = vec![ExactMatrix::identity(1, order), h];
        Ok(ExactEval {
            order,
            spiders: HashMap::new(),
            h_powers,
        })
    }

    fn h_kron(&mut self, wires: usize) -> ExactMatrix {
        while self.h_powers.len() <= wires {
            let last = self.h_powers.last().expect("seeded").clone();
            self.h_powers.push(last.kron(&self.h_powers[1]));
        }
        self.h_powers[wires].clone()
    }

    fn z_spider(&self, inputs: usize, outputs: usize, phase: &PhaseExpr) -> Result<ExactMatrix, InterpError> {
        let unit = exact_unit(phase, self.order)?;
        let rows = 1usize << outputs;
        let cols = 1usize << inputs;
        let mut m = ExactMatrix::zeros(rows, cols, self.order);
        if rows == 1 && cols == 1 {
            m.set(0, 0, &Cyclotomic::one(self.order) + &unit);
        } else {
            m.set(0, 0, Cyclotomic::one(self.order));
            m.set(rows - 1, cols - 1, unit);
        }
        Ok(m)
    }

    fn spider(
        &mut self,
        inputs: usize,
        outputs: usize,
        phase: &PhaseExpr,
        is_x: bool,
    ) -> Result<ExactMatrix, InterpError> {
        let (num, den) = phase.const_pi();
        let key = (inputs, outputs, num, den, is_x);
        if let Some(m) = self.spiders.get(&key) {
            return Ok(m.clone());
        }
        let z = self.z_spider(inputs, outputs, phase)?;
        let m = if is_x {
            let hm = self.h_kron(outputs);
            let hn = self.h_kron(inputs);
            hm.mul(&z.mul(&hn).expect("spider shapes agree"))
                .expect("spider shapes agree")
        } else {
            z
        };
        self.spiders.insert(key, m.clone());
        Ok(m)
    }

    fn eval(&mut self, d: &Diagram) -> Result<ExactMatrix, InterpError> {
        let order = self.order;
        Ok(match d {
            Diagram::Z { inputs, outputs, phase } => self.spider(*inputs, *outputs, phase, false)?,
            Diagram::X { inputs, outputs, phase } => self.spider(*inputs, *outputs, phase, true)?,
            Diagram::H => self.h_powers[1].clone(),
            Diagram::Id => ExactMatrix::identity(2, order),
            Diagram::Swap => {
                let mut m = ExactMatrix::zeros(4, 4, order);
                let one = Cyclotomic::one(order);
                m.set(0, 0, one.clone());
                m.set(1, 2, one.clone());
                m.set(2, 1, one.clone());
                m.set(3, 3, one);
                m
            }
            Diagram::Cup => {
                let mut m = ExactMatrix::zeros(1, 4, order);
                let one = Cyclotomic::one(order);
                m.set(0, 0, one.clone());
                m.set(0, 3, one);
                m
            }
            Diagram::Cap => {
                let mut m = ExactMatrix::zeros(4, 1, order);
                let one = Cyclotomic::one(order);
                m.set(0, 0, one.clone());
                m.set(3, 0, one);
                m
            }
            Diagram::Empty => ExactMatrix::identity(1, order),
            Diagram::Triangle => {
                let mut m = ExactMatrix::identity(2, order);
                m.set(0, 1, Cyclotomic::one(order));
                m
            }
            Diagram::Seq { first, second, .. } => {
                let a = self.eval(first)?;
                let b = self.eval(second)?;
                b.mul(&a).expect("seq arity was validated at construction")
            }
            Diagram::Tensor { left, right, .. } => {
                let a = self.eval(left)?;
                let b = self.eval(right)?;
                a.kron(&b)
            }
        })
    }
}

fn float_unit(phase: &PhaseExpr) -> Complex64 {
    Complex64::from_polar(1.0, phase.to_radians().expect("ground phase"))
}

fn float_h() -> FloatMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = FloatMatrix::zeros(2, 2);
    m.set(0, 0, Complex64::new(s, 0.0));
    m.set(0, 1, Complex64::new(s, 0.0));
    m.set(1, 0, Complex64::new(s, 0.0));
    m.set(1, 1, Complex64::new(-s, 0.0));
    m
}

fn float_eval(d: &Diagram) -> FloatMatrix {
    match d {
        Diagram::Z { inputs, outputs, phase } => {
            let rows = 1usize << outputs;
            let cols = 1usize << inputs;
            let unit = float_unit(phase);
            let mut m = FloatMatrix::zeros(rows, cols);
            if rows == 1 && cols == 1 {
                m.set(0, 0, Complex64::new(1.0, 0.0) + unit);
            } else {
                m.set(0, 0, Complex64::new(1.0, 0.0));
                m.set(rows - 1, cols - 1, unit);
            }
            m
        }
        Diagram::X { inputs, outputs, phase } => {
            let z = float_eval(&crate::diagram::z(*inputs, *outputs, phase.clone()));
            let mut hm = FloatMatrix::identity(1);
            for _ in 0..*outputs {
                hm = hm.kron(&float_h());
            }
            let mut hn = FloatMatrix::identity(1);
            for _ in 0..*inputs {
                hn = hn.kron(&float_h());
            }
            hm.mul(&z.mul(&hn).expect("shapes agree")).expect("shapes agree")
        }
        Diagram::H => float_h(),
        Diagram::Id => FloatMatrix::identity(2),
        Diagram::Swap => {
            let mut m = FloatMatrix::zeros(4, 4);
            m.set(0, 0, Complex64::new(1.0, 0.0));
            m.set(1, 2, Complex64::new(1.0, 0.0));
            m.set(2, 1, Complex64::new(1.0, 0.0));
            m.set(3, 3, Complex64::new(1.0, 0.0));
            m
        }
        Diagram::Cup => {
            let mut m = FloatMatrix::zeros(1, 4);
            m.set(0, 0, Complex64::new(1.0, 0.0));
            m.set(0, 3, Complex64::new(1.0, 0.0));
            m
        }
        Diagram::Cap => {
            let mut m = FloatMatrix::zeros(4, 1);
            m.set(0, 0, Complex64::new(1.0, 0.0));
            m.set(3, 0, Complex64::new(1.0, 0.0));
            m
        }
        Diagram::Empty => FloatMatrix::identity(1),
        Diagram::Triangle => {
            let mut m = FloatMatrix::identity(2);
            m.set(0, 1, Complex64::new(1.0, 0.0));
            m
        }
        Diagram::Seq { first, second, .. } => {
            let a = float_eval(first);
            let b = float_eval(second);
            b.mul(&a).expect("seq arity was validated at construction")
        }
        Diagram::Tensor { left, right, .. } => float_eval(left).kron(&float_eval(right)),
    }
}

/// Evaluate a ground diagram to its matrix.
pub fn interp(d: &Diagram, backend: Backend) -> Result<Matrix, InterpError> {
    check_ground(d)?;
    match backend {
        Backend::Exact => {
            let order = required_exact_order(d)?;
            let mut eval = ExactEval::new(order)?;
            Ok(Matrix::Exact(eval.eval(d)?))
        }
        Backend::Float => Ok(Matrix::Float(float_eval(d))),
    }
}

/// Exact evaluation, or why none exists.
pub fn interp_exact(d: &Diagram) -> Result<ExactMatrix, InterpError> {
    match interp(d, Backend::Exact)? {
        Matrix::Exact(m) => Ok(m),
        Matrix::Float(_) => unreachable!("exact backend returns exact matrices"),
    }
}

/// Floating-point evaluation (always available on ground diagrams).
pub fn interp_float(d: &Diagram) -> Result<FloatMatrix, InterpError> {
    check_ground(d)?;
    Ok(float_eval(d))
}

/// Evaluate under the phase-scaling functor: every spider phase is multiplied
/// by `k`, which must be ≡ 1 (mod 8) for the functor to respect the H and
/// triangle generators.
pub fn interp_scaled(d: &Diagram, k: i64, backend: Backend) -> Result<Matrix, InterpError> {
    if k.rem_euclid(8) != 1 {
        return Err(InterpError::UnsupportedScale(k));
    }
    interp(&d.scale_phases(k), backend)
}

/// Compare the interpretations of two ground diagrams.
pub fn semantic_eq(a: &Diagram, b: &Diagram, mode: EqMode) -> Result<bool, InterpError> {
    if a.arity() != b.arity() {
        let (li, lo) = a.arity();
        let (ri, ro) = b.arity();
        return Err(InterpError::ArityMismatch {
            left_in: li,
            left_out: lo,
            right_in: ri,
            right_out: ro,
        });
    }
    match mode {
        EqMode::Exact => {
            let order = required_exact_order_joint(&[a, b])?;
            let mut eval = ExactEval::new(order)?;
            let ma = eval.eval(a)?;
            let mb = eval.eval(b)?;
            Ok(ma.try_eq(&mb)?)
        }
        EqMode::Tol(tol) => {
            let ma = interp_float(a)?;
            let mb = interp_float(b)?;
            Ok(ma.max_abs_diff(&mb).expect("same arity") <= tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::gadgets::*;
    use crate::diagram::{
        self, block_swap, cap, cup, h, id, id_wires, permutation_diagram, seq, seq_many, swap,
        tensor, x, x0, z, z0, Diagram, PhaseExpr,
    };
    use crate::sample::{self, PhasePool};
    use num_rational::BigRational;
    use proptest::prelude::*;
    use rand::Rng;

    fn pi(num: i64, den: u64) -> PhaseExpr {
        PhaseExpr::pi_rational(num, den)
    }

    fn exact(d: &Diagram) -> ExactMatrix {
        interp_exact(d).expect("exact interpretation")
    }

    fn int(v: i64) -> Cyclotomic {
        Cyclotomic::from_integer(v, 8)
    }

    fn assert_matrix_int(m: &ExactMatrix, expected: &[&[i64]]) {
        assert_eq!(m.rows(), expected.len());
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(m.cols(), row.len());
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(m.get(i, j).try_equal(&int(v)).unwrap(), true, "entry ({i},{j})");
            }
        }
    }

    /// `m` equals `scale · expected` where expected has integer entries.
    fn assert_matrix_scaled(m: &ExactMatrix, scale: &Cyclotomic, expected: &[&[i64]]) {
        assert_eq!(m.rows(), expected.len());
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let want = scale.scale(&BigRational::from_integer(v.into()));
                assert!(m.get(i, j).try_equal(&want).unwrap(), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn generator_matrices() {
        // H
        let hm = exact(&h());
        let rt2 = Cyclotomic::sqrt_two();
        let inv = rt2.inverse().unwrap();
        assert_matrix_scaled(&hm, &inv, &[&[1, 1], &[1, -1]]);
        // Z spider puts 1 and the phase at the corners
        let zm = exact(&z(1, 2, pi(1, 2)));
        assert_eq!((zm.rows(), zm.cols()), (4, 2));
        assert!(zm.get(0, 0).is_one());
        assert!(zm.get(3, 1).try_equal(&Cyclotomic::phase_pi(1, 2).unwrap()).unwrap());
        assert!(zm.get(1, 0).is_zero());
        assert!(zm.get(2, 1).is_zero());
        // scalar spider: 1 + e^{iα}
        let sm = exact(&z0(0, 0));
        assert!(sm.get(0, 0).try_equal(&int(2)).unwrap());
        let sm = exact(&z(0, 0, pi(1, 1)));
        assert!(sm.get(0, 0).is_zero());
        // structural generators
        assert_matrix_int(&exact(&cup()), &[&[1, 0, 0, 1]]);
        assert_matrix_int(&exact(&cap()), &[&[1], &[0], &[0], &[1]]);
        assert_matrix_int(
            &exact(&swap()),
            &[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]],
        );
        assert_matrix_int(&exact(&diagram::triangle()), &[&[1, 1], &[0, 1]]);
        assert_matrix_int(&exact(&diagram::empty()), &[&[1]]);
        assert_matrix_int(&exact(&id()), &[&[1, 0], &[0, 1]]);
    }

    #[test]
    fn x_spiders_against_hand_computed_values() {
        // X[1,0](π) = √2⟨1|, X[1,0](0) = √2⟨0|
        let rt2 = Cyclotomic::sqrt_two();
        assert_matrix_scaled(&exact(&x(1, 0, pi(1, 1))), &rt2, &[&[0, 1]]);
        assert_matrix_scaled(&exact(&x0(1, 0)), &rt2, &[&[1, 0]]);
        assert_matrix_scaled(&exact(&x0(0, 1)), &rt2, &[&[1], &[0]]);
        // X[2,1](0) = (1/√2)·(xor as a linear map)
        let inv = rt2.inverse().unwrap();
        assert_matrix_scaled(
            &exact(&x0(2, 1)),
            &inv,
            &[&[1, 0, 0, 1], &[0, 1, 1, 0]],
        );
        // X[1,2](0): |b⟩ ↦ (1/√2)(|b,0⟩ + |b̄,1⟩) summed into even parity
        assert_matrix_scaled(
            &exact(&x0(1, 2)),
            &inv,
            &[&[1, 0], &[0, 1], &[0, 1], &[1, 0]],
        );
        // X[1,2](π) flips the parity
        assert_matrix_scaled(
            &exact(&x(1, 2, pi(1, 1))),
            &inv,
            &[&[0, 1], &[1, 0], &[1, 0], &[0, 1]],
        );
    }

    #[test]
    fn scalar_gadgets_have_expected_values() {
        let one = Cyclotomic::one(8);
        let rt2 = Cyclotomic::sqrt_two();
        let inv = rt2.inverse().unwrap();

        let m = exact(&inv_sqrt2());
        assert_eq!((m.rows(), m.cols()), (1, 1));
        assert!(m.get(0, 0).try_equal(&inv).unwrap(), "got {}", m.get(0, 0));

        let m = exact(&value_sqrt2());
        assert!(m.get(0, 0).try_equal(&rt2).unwrap());

        let m = exact(&value_two());
        assert!(m.get(0, 0).try_equal(&int(2)).unwrap());

        let m = exact(&value_half());
        let half = Cyclotomic::from_rational(BigRational::new(1.into(), 2.into()), 8);
        assert!(m.get(0, 0).try_equal(&half).unwrap());

        // unit_phase(φ) = e^{iφ} exactly
        let m = exact(&unit_phase(pi(1, 3)));
        assert!(m.get(0, 0).try_equal(&Cyclotomic::phase_pi(1, 3).unwrap()).unwrap());
        let m = exact(&unit_phase(pi(0, 1)));
        assert!(m.get(0, 0).try_equal(&one).unwrap());
    }

    #[test]
    fn states_and_effects_are_normalized() {
        assert_matrix_int(&exact(&state_zero()), &[&[1], &[0]]);
        assert_matrix_int(&exact(&state_one()), &[&[0], &[1]]);
        assert_matrix_int(&exact(&effect_zero()), &[&[1, 0]]);
        assert_matrix_int(&exact(&effect_one()), &[&[0, 1]]);
    }

    #[test]
    fn two_qubit_gates() {
        assert_matrix_int(
            &exact(&cnot()),
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 0, 1],
                &[0, 0, 1, 0],
            ],
        );
        assert_matrix_int(
            &exact(&cz()),
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, -1],
            ],
        );
    }

    #[test]
    fn toffoli_is_exactly_ccx() {
        let m = exact(&toffoli());
        let mut expected = ExactMatrix::identity(8, 8);
        expected.set(6, 6, Cyclotomic::zero(8));
        expected.set(7, 7, Cyclotomic::zero(8));
        expected.set(6, 7, Cyclotomic::one(8));
        expected.set(7, 6, Cyclotomic::one(8));
        assert!(m.try_eq(&expected).unwrap());
    }

    #[test]
    fn branching_gadgets() {
        assert_matrix_int(
            &exact(&drop_eleven()),
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 0],
            ],
        );
        // |0⟩ ↦ |1⟩, |1⟩ ↦ |01⟩? No: the branch copies "one" into both legs:
        // |0⟩ ↦ |11⟩ is wrong too — the matrix speaks for itself.
        assert_matrix_int(
            &exact(&w_branch()),
            &[&[0, 1], &[1, 0], &[1, 0], &[0, 0]],
        );
        assert_matrix_int(
            &exact(&sum_splitter()),
            &[&[1, 0], &[0, 1], &[0, 1], &[0, 0]],
        );
        assert_matrix_int(&exact(&triangle_expansion()), &[&[1, 1], &[0, 1]]);
    }

    #[test]
    fn arithmetic_effects() {
        assert_matrix_int(&exact(&effect_two()), &[&[1, 2]]);
        assert_matrix_int(&exact(&effect_int(0)), &[&[1, 0]]);
        assert_matrix_int(&exact(&effect_int(1)), &[&[1, 1]]);
        assert_matrix_int(&exact(&effect_int(5)), &[&[1, 5]]);
        assert_matrix_int(&exact(&effect_int(12)), &[&[1, 12]]);
        // cos(π/3) = 1/2
        let m = exact(&effect_half());
        assert!(m.get(0, 0).is_one());
        let half = Cyclotomic::from_rational(BigRational::new(1.into(), 2.into()), 8);
        assert!(m.get(0, 1).try_equal(&half).unwrap());
        // products and sums of effect tails
        let m = exact(&effect_prod(effect_int(2), effect_int(3)));
        assert_matrix_int(&m, &[&[1, 6]]);
        let m = exact(&effect_sum(effect_int(2), effect_int(3)));
        assert_matrix_int(&m, &[&[1, 5]]);
        let m = exact(&effect_sum(effect_half(), effect_half()));
        assert_matrix_int(&m, &[&[1, 1]]);
    }

    #[test]
    fn symmetrizer_is_average_of_identity_and_swap() {
        let m = exact(&symmetrizer2());
        let half = BigRational::new(1.into(), 2.into());
        let mut expected = ExactMatrix::zeros(4, 4, 8);
        let one = Cyclotomic::one(8);
        expected.set(0, 0, one.clone());
        expected.set(3, 3, one.clone());
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            expected.set(i, j, one.scale(&half));
        }
        assert!(m.try_eq(&expected).unwrap());
    }

    #[test]
    fn euler_decomposition_of_hadamard() {
        // Z(π/2)·X(π/2)·Z(π/2) = e^{iπ/4}·H·√2·(1/√2)... in spider form the
        // composite equals e^{iπ/4}H directly.
        let chain = seq_many([
            z(1, 1, pi(1, 2)),
            x(1, 1, pi(1, 2)),
            z(1, 1, pi(1, 2)),
        ])
        .unwrap();
        let lhs = exact(&chain);
        let phase = Cyclotomic::phase_pi(1, 4).unwrap();
        let rhs = exact(&h()).scale(&phase);
        assert!(lhs.try_eq(&rhs).unwrap());
    }

    #[test]
    fn permutations_match_bit_reindexing() {
        let mut rng = sample::rng_from_seed(7);
        for _ in 0..10 {
            let n = rng.gen_range(1..5usize);
            let mut sources: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                sources.swap(i, j);
            }
            let d = permutation_diagram(&sources);
            let m = interp_float(&d).unwrap();
            // output bit j reads input bit sources[j]
            for col in 0..1usize << n {
                let mut row = 0usize;
                for j in 0..n {
                    let bit = (col >> (n - 1 - sources[j])) & 1;
                    row |= bit << (n - 1 - j);
                }
                for r in 0..1usize << n {
                    let want = if r == row { 1.0 } else { 0.0 };
                    assert!((m.get(r, col).re - want).abs() < 1e-12);
                    assert!(m.get(r, col).im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn block_swap_exchanges_wire_groups() {
        let d = block_swap(1, 2);
        let a = z(0, 1, pi(1, 4));
        let b = tensor(z0(0, 1), x(0, 1, pi(1, 2)));
        let lhs = seq(tensor(a.clone(), b.clone()), d).unwrap();
        let rhs = tensor(b, a);
        assert!(semantic_eq(&lhs, &rhs, EqMode::Exact).unwrap());
    }

    #[test]
    fn scaled_interpretation_multiplies_phases() {
        let d = z(1, 1, pi(1, 4));
        let scaled = interp_scaled(&d, 9, Backend::Exact).unwrap();
        let direct = interp(&z(1, 1, pi(9, 4)), Backend::Exact).unwrap();
        assert_eq!(scaled.as_exact().unwrap().try_eq(direct.as_exact().unwrap()), Ok(true));
        assert_eq!(
            interp_scaled(&d, 3, Backend::Exact),
            Err(InterpError::UnsupportedScale(3))
        );
        assert!(matches!(
            interp_scaled(&d, -7, Backend::Exact),
            Ok(Matrix::Exact(_))
        ));
    }

    #[test]
    fn error_paths() {
        let open = z(1, 1, PhaseExpr::var("alpha"));
        assert_eq!(
            interp(&open, Backend::Exact),
            Err(InterpError::NonGround("alpha".into()))
        );
        let irr = z(1, 1, PhaseExpr::radians(1.25));
        assert!(matches!(
            interp(&irr, Backend::Exact),
            Err(InterpError::ExactUnavailable(_))
        ));
        assert!(interp(&irr, Backend::Float).is_ok());
        let big = z(1, 1, pi(1, 241));
        assert!(matches!(
            interp(&big, Backend::Exact),
            Err(InterpError::ExactUnavailable(_))
        ));
        let mism = semantic_eq(&id(), &cup(), EqMode::Exact);
        assert_eq!(
            mism,
            Err(InterpError::ArityMismatch {
                left_in: 1,
                left_out: 1,
                right_in: 2,
                right_out: 0
            })
        );
    }

    #[test]
    fn required_order_accumulates_denominators() {
        let d = seq_many([z(1, 1, pi(1, 3)), z(1, 1, pi(1, 5)), x(1, 1, pi(1, 4))]).unwrap();
        assert_eq!(required_exact_order(&d).unwrap(), 120);
        let plain = z0(1, 1);
        assert_eq!(required_exact_order(&plain).unwrap(), 8);
    }

    #[test]
    fn float_display_has_short_digits() {
        assert_eq!(fmt_f64_sig(0.0), "0");
        assert_eq!(fmt_f64_sig(1.0), "1");
        assert_eq!(fmt_f64_sig(-0.5), "-0.5");
        assert_eq!(fmt_f64_sig(0.25), "0.25");
        assert_eq!(fmt_complex(Complex64::new(0.0, -1.0)), "-1i");
        assert_eq!(fmt_complex(Complex64::new(1.5, 2.0)), "1.5+2i");
        assert_eq!(fmt_complex(Complex64::new(0.0, 0.0)), "0");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn backends_agree_on_exactly_evaluable_diagrams(seed in 0u64..1000) {
            let mut rng = sample::rng_from_seed(seed);
            let d = sample::random_ground_diagram(&mut rng, PhasePool::RationalPi, 3, 3);
            let e = interp_exact(&d).unwrap();
            let f = interp_float(&d).unwrap();
            let diff = FloatMatrix::from_exact(&e).max_abs_diff(&f).unwrap();
            prop_assert!(diff < 1e-10, "backends disagree by {diff}");
        }

        #[test]
        fn flip_is_transpose(seed in 0u64..1000) {
            let mut rng = sample::rng_from_seed(seed);
            let d = sample::random_ground_diagram(&mut rng, PhasePool::Mixed, 3, 2);
            let m = interp_float(&d).unwrap();
            let mt = interp_float(&d.flip()).unwrap();
            let diff = m.transpose().max_abs_diff(&mt).unwrap();
            prop_assert!(diff < 1e-9, "flip differs from transpose by {diff}");
        }

        #[test]
        fn color_swap_conjugates_by_hadamards(seed in 0u64..1000) {
            let mut rng = sample::rng_from_seed(seed);
            let d = sample::random_ground_diagram(&mut rng, PhasePool::Mixed, 3, 2);
            let (n, m) = d.arity();
            let mut hn = FloatMatrix::identity(1);
            for _ in 0..n {
                hn = hn.kron(&float_h());
            }
            let mut hm = FloatMatrix::identity(1);
            for _ in 0..m {
                hm = hm.kron(&float_h());
            }
            let lhs = interp_float(&d.color_swap()).unwrap();
            let rhs = hm.mul(&interp_float(&d).unwrap().mul(&hn).unwrap()).unwrap();
            let diff = lhs.max_abs_diff(&rhs).unwrap();
            prop_assert!(diff < 1e-9, "color swap differs by {diff}");
        }

        #[test]
        fn composition_is_functorial(seed in 0u64..1000) {
            let mut rng = sample::rng_from_seed(seed);
            let a = sample::random_ground_diagram(&mut rng, PhasePool::RationalPi, 2, 2);
            let b = sample::random_ground_diagram(&mut rng, PhasePool::RationalPi, 2, 2);
            // tensor then interpret = interpret then kron
            let lhs = interp_float(&tensor(a.clone(), b.clone())).unwrap();
            let rhs = interp_float(&a).unwrap().kron(&interp_float(&b).unwrap());
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            // seq when arities align
            if a.outputs() == b.inputs() {
                let s = seq(a.clone(), b.clone()).unwrap();
                let lhs = interp_float(&s).unwrap();
                let rhs = interp_float(&b).unwrap().mul(&interp_float(&a).unwrap()).unwrap();
                prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            }
        }

        #[test]
        fn substitution_then_interp_matches_float_phases(seed in 0u64..500) {
            let mut rng = sample::rng_from_seed(seed);
            let d = sample::random_linear_diagram(&mut rng, &["alpha", "beta"], 3, 2, 3);
            let vars: Vec<String> = d.vars().into_iter().collect();
            let assign = sample::random_rational_assignment(&mut rng, &vars);
            let ground = d.substitute(&assign).unwrap();
            let e = interp_exact(&ground).unwrap();
            let f = interp_float(&ground).unwrap();
            let diff = FloatMatrix::from_exact(&e).max_abs_diff(&f).unwrap();
            prop_assert!(diff < 1e-10);
        }
    }

    #[test]
    fn backend_on_mixed_scalar_stack() {
        // a tensor stack of scalars multiplies out
        let d = tensor(value_two(), tensor(inv_sqrt2(), inv_sqrt2()));
        let m = exact(&d);
        assert!(m.get(0, 0).is_one());
        assert_eq!(m.rows(), 1);
        assert_eq!(m.cols(), 1);
    }

    #[test]
    fn id_wires_matches_identity() {
        for n in 0..4 {
            let m = exact(&id_wires(n));
            assert!(m.try_eq(&ExactMatrix::identity(1 << n, 8)).unwrap());
        }
    }
}
