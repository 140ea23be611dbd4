//! ZX diagrams as terms: spiders with symbolic phases, structural wiring
//! generators, a triangle generator, and sequential/parallel composition.
//!
//! Phases are affine expressions `Σ nᵢ·αᵢ + c` in named angle variables with
//! integer coefficients. The constant part is split into an exact rational
//! multiple of π and a floating-point remainder for irrational angles, so a
//! diagram knows syntactically whether it can be evaluated exactly.

pub mod gadgets;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

pub use gadgets::triangle_expansion;

/// One f64 with up to 12 significant digits, trailing zeros trimmed.
pub(crate) fn fmt_f64_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("cannot compose: first factor has {outputs} outputs, second expects {inputs} inputs")]
    ArityMismatch { outputs: usize, inputs: usize },
    #[error("variable `{0}` is not bound by the assignment")]
    UnboundVariable(String),
}

/// An angle to substitute for a variable: either an exact rational multiple
/// of π or a floating-point number of radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleValue {
    /// `num/den · π`
    PiRational(i64, u64),
    Radians(f64),
}

impl AngleValue {
    pub fn to_radians(self) -> f64 {
        match self {
            AngleValue::PiRational(n, d) => std::f64::consts::PI * n as f64 / d as f64,
            AngleValue::Radians(r) => r,
        }
    }
}

/// Variable assignment used by substitution.
pub type Assignment = BTreeMap<String, AngleValue>;

/// Affine phase expression `Σ nᵢ·αᵢ + (const_num/const_den)·π + const_irr`.
///
/// Invariants: no zero coefficients are stored; the rational constant is
/// reduced, has positive denominator, and is normalized into [0, 2π); the
/// irrational remainder is likewise normalized into [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseExpr {
    coeffs: BTreeMap<String, i64>,
    const_num: i64,
    const_den: u64,
    const_irr: f64,
}

const TAU: f64 = 2.0 * std::f64::consts::PI;

fn normalize_const(num: i64, den: u64) -> (i64, u64) {
    let den = den.max(1);
    let g = (num.unsigned_abs()).gcd(&den).max(1);
    let (n, d) = (num / g as i64, den / g);
    (n.rem_euclid(2 * d as i64), d)
}

impl PhaseExpr {
    pub fn zero() -> Self {
        PhaseExpr {
            coeffs: BTreeMap::new(),
            const_num: 0,
            const_den: 1,
            const_irr: 0.0,
        }
    }

    /// The bare variable `name` with coefficient 1.
    pub fn var(name: impl Into<String>) -> Self {
        Self::var_scaled(name, 1)
    }

    pub fn var_scaled(name: impl Into<String>, coeff: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if coeff != 0 {
            coeffs.insert(name.into(), coeff);
        }
        PhaseExpr {
            coeffs,
            const_num: 0,
            const_den: 1,
            const_irr: 0.0,
        }
    }

    /// `num/den · π`.
    pub fn pi_rational(num: i64, den: u64) -> Self {
        let (n, d) = normalize_const(num, den);
        PhaseExpr {
            coeffs: BTreeMap::new(),
            const_num: n,
            const_den: d,
            const_irr: 0.0,
        }
    }

    pub fn radians(r: f64) -> Self {
        PhaseExpr {
            coeffs: BTreeMap::new(),
            const_num: 0,
            const_den: 1,
            const_irr: r.rem_euclid(TAU),
        }
    }

    pub fn from_angle(v: AngleValue) -> Self {
        match v {
            AngleValue::PiRational(n, d) => Self::pi_rational(n, d),
            AngleValue::Radians(r) => Self::radians(r),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (v, c) in &other.coeffs {
            let e = coeffs.entry(v.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                coeffs.remove(v);
            }
        }
        let num = self.const_num * other.const_den as i64 + other.const_num * self.const_den as i64;
        let (n, d) = normalize_const(num, self.const_den * other.const_den);
        PhaseExpr {
            coeffs,
            const_num: n,
            const_den: d,
            const_irr: (self.const_irr + other.const_irr).rem_euclid(TAU),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiply the whole expression (coefficients and constants) by `k`.
    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(v, c)| (v.clone(), c * k))
            .collect();
        let (n, d) = normalize_const(self.const_num * k, self.const_den);
        PhaseExpr {
            coeffs,
            const_num: n,
            const_den: d,
            const_irr: (self.const_irr * k as f64).rem_euclid(TAU),
        }
    }

    pub fn coeff(&self, var: &str) -> i64 {
        self.coeffs.get(var).copied().unwrap_or(0)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&str, i64)> {
        self.coeffs.iter().map(|(v, c)| (v.as_str(), *c))
    }

    /// Rational-π part of the constant, as (numerator, denominator).
    pub fn const_pi(&self) -> (i64, u64) {
        (self.const_num, self.const_den)
    }

    /// Irrational constant remainder, in radians.
    pub fn const_irr(&self) -> f64 {
        self.const_irr
    }

    /// True when no variables occur.
    pub fn is_ground(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True for ground phases that are integer multiples of π/4.
    pub fn in_pi4_fragment(&self) -> bool {
        self.is_ground() && self.const_irr == 0.0 && matches!(self.const_den, 1 | 2 | 4)
    }

    /// Replace every variable by its assigned angle. The assignment must
    /// cover all variables of the expression.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Self, DiagramError> {
        let mut out = PhaseExpr {
            coeffs: BTreeMap::new(),
            const_num: self.const_num,
            const_den: self.const_den,
            const_irr: self.const_irr,
        };
        for (v, c) in &self.coeffs {
            let val = assignment
                .get(v)
                .ok_or_else(|| DiagramError::UnboundVariable(v.clone()))?;
            out = out.add(&PhaseExpr::from_angle(*val).scale(*c));
        }
        Ok(out)
    }

    /// Radians value of a ground expression.
    pub fn to_radians(&self) -> Option<f64> {
        if !self.is_ground() {
            return None;
        }
        let rational = std::f64::consts::PI * self.const_num as f64 / self.const_den as f64;
        Some((rational + self.const_irr).rem_euclid(TAU))
    }
}

impl fmt::Display for PhaseExpr {
    /// Canonical text form: variables in name order with integer
    /// coefficients, then the rational-π constant, then a radians tail —
    /// e.g. `2a - b + 3/4 pi + 1.25r`. Zero prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (v, c) in &self.coeffs {
            let body = if c.unsigned_abs() == 1 {
                v.clone()
            } else {
                format!("{}{v}", c.unsigned_abs())
            };
            parts.push((*c < 0, body));
        }
        if self.const_num != 0 {
            let body = match (self.const_num, self.const_den) {
                (1, 1) => "pi".to_string(),
                (n, 1) => format!("{n} pi"),
                (1, d) => format!("pi/{d}"),
                (n, d) => format!("{n}/{d} pi"),
            };
            parts.push((false, body));
        }
        if self.const_irr != 0.0 {
            parts.push((false, format!("{}r", fmt_f64_sig(self.const_irr))));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// A ZX diagram term. `Seq(a, b)` feeds the outputs of `a` into the inputs of
/// `b` (so its matrix is ⟦b⟧·⟦a⟧); `Tensor` places `left` on the more
/// significant wires.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagram {
    Z {
        inputs: usize,
        outputs: usize,
        phase: PhaseExpr,
    },
    X {
        inputs: usize,
        outputs: usize,
        phase: PhaseExpr,
    },
    H,
    Id,
    Swap,
    /// 2 → 0, the effect ⟨00| + ⟨11|.
    Cup,
    /// 0 → 2, the state |00⟩ + |11⟩.
    Cap,
    Empty,
    /// 1 → 1 with matrix [[1, 1], [0, 1]]; expressible in the other
    /// generators via [`triangle_expansion`], kept as sugar.
    Triangle,
    Seq {
        first: Box<Diagram>,
        second: Box<Diagram>,
        arity: (usize, usize),
    },
    Tensor {
        left: Box<Diagram>,
        right: Box<Diagram>,
        arity: (usize, usize),
    },
}

pub fn z(inputs: usize, outputs: usize, phase: PhaseExpr) -> Diagram {
    Diagram::Z {
        inputs,
        outputs,
        phase,
    }
}

pub fn z0(inputs: usize, outputs: usize) -> Diagram {
    z(inputs, outputs, PhaseExpr::zero())
}

pub fn x(inputs: usize, outputs: usize, phase: PhaseExpr) -> Diagram {
    Diagram::X {
        inputs,
        outputs,
        phase,
    }
}

pub fn x0(inputs: usize, outputs: usize) -> Diagram {
    x(inputs, outputs, PhaseExpr::zero())
}

pub fn h() -> Diagram {
    Diagram::H
}

pub fn id() -> Diagram {
    Diagram::Id
}

pub fn swap() -> Diagram {
    Diagram::Swap
}

pub fn cup() -> Diagram {
    Diagram::Cup
}

pub fn cap() -> Diagram {
    Diagram::Cap
}

pub fn empty() -> Diagram {
    Diagram::Empty
}

pub fn triangle() -> Diagram {
    Diagram::Triangle
}

/// `k` parallel identity wires (`Empty` for k = 0).
pub fn id_wires(k: usize) -> Diagram {
    tensor_many((0..k).map(|_| id()))
}

/// Sequential composition; fails unless outputs(first) = inputs(second).
pub fn seq(first: Diagram, second: Diagram) -> Result<Diagram, DiagramError> {
    let (fi, fo) = first.arity();
    let (si, so) = second.arity();
    if fo != si {
        return Err(DiagramError::ArityMismatch {
            outputs: fo,
            inputs: si,
        });
    }
    Ok(Diagram::Seq {
        first: Box::new(first),
        second: Box::new(second),
        arity: (fi, so),
    })
}

pub fn tensor(left: Diagram, right: Diagram) -> Diagram {
    let (li, lo) = left.arity();
    let (ri, ro) = right.arity();
    Diagram::Tensor {
        left: Box::new(left),
        right: Box::new(right),
        arity: (li + ri, lo + ro),
    }
}

pub fn tensor_many(items: impl IntoIterator<Item = Diagram>) -> Diagram {
    items
        .into_iter()
        .reduce(tensor)
        .unwrap_or(Diagram::Empty)
}

pub fn seq_many(items: impl IntoIterator<Item = Diagram>) -> Result<Diagram, DiagramError> {
    let mut iter = items.into_iter();
    let first = iter.next().expect("seq_many needs at least one diagram");
    iter.try_fold(first, seq)
}

impl Diagram {
    /// (inputs, outputs); O(1) for composites (cached at construction).
    pub fn arity(&self) -> (usize, usize) {
        match self {
            Diagram::Z {
                inputs, outputs, ..
            }
            | Diagram::X {
                inputs, outputs, ..
            } => (*inputs, *outputs),
            Diagram::H | Diagram::Id | Diagram::Triangle => (1, 1),
            Diagram::Swap => (2, 2),
            Diagram::Cup => (2, 0),
            Diagram::Cap => (0, 2),
            Diagram::Empty => (0, 0),
            Diagram::Seq { arity, .. } | Diagram::Tensor { arity, .. } => *arity,
        }
    }

    pub fn inputs(&self) -> usize {
        self.arity().0
    }

    pub fn outputs(&self) -> usize {
        self.arity().1
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Diagram::Z { phase, .. } | Diagram::X { phase, .. } => {
                out.extend(phase.vars().map(|(v, _)| v));
            }
            Diagram::Seq { first, second, .. } => {
                first.collect_vars(out);
                second.collect_vars(out);
            }
            Diagram::Tensor { left, right, .. } => {
                left.collect_vars(out);
                right.collect_vars(out);
            }
            _ => {}
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut set = BTreeSet::new();
        self.collect_vars(&mut set);
        set.into_iter().map(String::from).collect()
    }

    pub fn is_ground(&self) -> bool {
        let mut set = BTreeSet::new();
        self.collect_vars(&mut set);
        set.is_empty()
    }

    fn try_map_phases(
        &self,
        f: &impl Fn(&PhaseExpr) -> Result<PhaseExpr, DiagramError>,
    ) -> Result<Diagram, DiagramError> {
        Ok(match self {
            Diagram::Z {
                inputs,
                outputs,
                phase,
            } => z(*inputs, *outputs, f(phase)?),
            Diagram::X {
                inputs,
                outputs,
                phase,
            } => x(*inputs, *outputs, f(phase)?),
            Diagram::Seq {
                first,
                second,
                arity,
            } => Diagram::Seq {
                first: Box::new(first.try_map_phases(f)?),
                second: Box::new(second.try_map_phases(f)?),
                arity: *arity,
            },
            Diagram::Tensor { left, right, arity } => Diagram::Tensor {
                left: Box::new(left.try_map_phases(f)?),
                right: Box::new(right.try_map_phases(f)?),
                arity: *arity,
            },
            other => other.clone(),
        })
    }

    /// Substitute angle values for variables in every phase; errors if a
    /// variable of the diagram is missing from the assignment.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Diagram, DiagramError> {
        self.try_map_phases(&|p| p.substitute(assignment))
    }

    /// Multiply every phase (variables and constants) by `k`.
    pub fn scale_phases(&self, k: i64) -> Diagram {
        self.try_map_phases(&|p| Ok(p.scale(k)))
            .expect("scaling cannot fail")
    }

    /// Visit every spider phase in the diagram (left to right, outside in).
    pub fn for_each_phase(&self, f: &mut impl FnMut(&PhaseExpr)) {
        match self {
            Diagram::Z { phase, .. } | Diagram::X { phase, .. } => f(phase),
            Diagram::Seq { first, second, .. } => {
                first.for_each_phase(f);
                second.for_each_phase(f);
            }
            Diagram::Tensor { left, right, .. } => {
                left.for_each_phase(f);
                right.for_each_phase(f);
            }
            _ => {}
        }
    }

    /// Upside-down diagram: reverses the roles of inputs and outputs. Its
    /// interpretation is the transpose of the original. The triangle has no
    /// upside-down generator form, so it flips via its expansion.
    pub fn flip(&self) -> Diagram {
        match self {
            Diagram::Z {
                inputs,
                outputs,
                phase,
            } => z(*outputs, *inputs, phase.clone()),
            Diagram::X {
                inputs,
                outputs,
                phase,
            } => x(*outputs, *inputs, phase.clone()),
            Diagram::H => h(),
            Diagram::Id => id(),
            Diagram::Swap => swap(),
            Diagram::Cup => cap(),
            Diagram::Cap => cup(),
            Diagram::Empty => empty(),
            Diagram::Triangle => triangle_expansion().flip(),
            Diagram::Seq { first, second, .. } => {
                seq(second.flip(), first.flip()).expect("flip preserves composability")
            }
            Diagram::Tensor { left, right, .. } => tensor(left.flip(), right.flip()),
        }
    }

    /// Exchange the spider colors everywhere. The triangle, which has no
    /// opposite-color twin, is wrapped in H so that the interpretation of the
    /// result is always the H-conjugate of the original.
    pub fn color_swap(&self) -> Diagram {
        match self {
            Diagram::Z {
                inputs,
                outputs,
                phase,
            } => x(*inputs, *outputs, phase.clone()),
            Diagram::X {
                inputs,
                outputs,
                phase,
            } => z(*inputs, *outputs, phase.clone()),
            Diagram::Triangle => seq(h(), seq(triangle(), h()).unwrap()).unwrap(),
            Diagram::Seq { first, second, .. } => {
                seq(first.color_swap(), second.color_swap()).expect("same arities")
            }
            Diagram::Tensor { left, right, .. } => tensor(left.color_swap(), right.color_swap()),
            other => other.clone(),
        }
    }
}

/// Wire permutation as a diagram built from adjacent swaps: output position
/// `j` carries input wire `sources[j]` (which must be a permutation of 0..n).
pub fn permutation_diagram(sources: &[usize]) -> Diagram {
    let n = sources.len();
    {
        let mut seen = vec![false; n];
        for &s in sources {
            assert!(s < n && !seen[s], "sources must be a permutation");
            seen[s] = true;
        }
    }
    let mut cur: Vec<usize> = (0..n).collect();
    let mut diagram = id_wires(n);
    for j in 0..n {
        let p = (j..n)
            .find(|&p| cur[p] == sources[j])
            .expect("permutation entry present");
        for k in (j..p).rev() {
            // one layer of n wires with a single swap at positions (k, k+1)
            let layer = tensor_many((0..n - 1).map(|w| if w == k { swap() } else { id() }));
            diagram = seq(diagram, layer).expect("swap layer keeps arity");
            cur.swap(k, k + 1);
        }
    }
    diagram
}

/// Moves a block of `left` wires past a block of `right` wires:
/// inputs [L | R] come out as [R | L].
pub fn block_swap(left: usize, right: usize) -> Diagram {
    let n = left + right;
    let sources: Vec<usize> = (0..right)
        .map(|j| left + j)
        .chain(0..left)
        .collect();
    if n == 0 {
        return empty();
    }
    permutation_diagram(&sources)
}
