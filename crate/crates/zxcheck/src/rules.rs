//! Rewrite rules: a line-oriented file format, soundness checking under
//! phase-scaling functors, closure under flipping and color swapping, and a
//! scalar pair that the π/4-scaling functor separates.
//!
//! A rule file holds blocks separated by blank lines:
//!
//! ```text
//! rule S1
//! vars a b
//! lhs: Z[2,1](a) ; Z[1,2](b)
//! rhs: Z[2,2](a + b)
//! ```
//!
//! An optional `constraint A` line marks a rule whose variables are not free:
//! they must satisfy the cosine-sum relation checked by
//! [`constraint_a_residual`]. Unconstrained rules are decided for all angles
//! at once; constrained rules are checked on sampled solutions of the
//! constraint.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::diagram::gadgets::{
    cnot, inv_sqrt2, loop_zh, sum_splitter, unit_phase, value_half, value_sqrt2, value_two,
    w_branch,
};
use crate::diagram::{
    empty, h, id, seq, seq_many, swap, tensor, tensor_many, triangle, x, x0, z, z0, AngleValue,
    Assignment, Diagram, DiagramError, PhaseExpr,
};
use crate::dsl::{parse_zx, parse_zx_at, print_zx, DslError};
use crate::exactnum::{Cyclotomic, CycloError};
use crate::projector::{decide_forall, DecideError, Method};
use crate::sample::rng_from_seed;
use crate::semantics::{interp_exact, interp_float, InterpError};

/// Variable names a `constraint A` rule must declare.
pub const CONSTRAINT_A_VARS: [&str; 6] = ["alpha", "beta", "gamma", "theta1", "theta2", "theta3"];

/// Default number of sampled constraint solutions per constrained rule.
pub const DEFAULT_BUDGET: usize = 1000;

/// Default sampling seed (overridable everywhere a seed is accepted).
pub const DEFAULT_SEED: u64 = 20220919;

/// Tolerance for sampled soundness checks.
pub const SAMPLE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RulesError {
    #[error(transparent)]
    Syntax(#[from] DslError),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("rule `{rule}`: left side is {lhs_inputs}→{lhs_outputs} but right side is {rhs_inputs}→{rhs_outputs}")]
    ArityMismatch {
        rule: String,
        lhs_inputs: usize,
        lhs_outputs: usize,
        rhs_inputs: usize,
        rhs_outputs: usize,
    },
    #[error("rule `{rule}` uses undeclared variable `{var}`")]
    UndeclaredVar { rule: String, var: String },
    #[error("rule `{rule}` has constraint A but does not declare {missing:?}")]
    MissingConstraintVars { rule: String, missing: Vec<String> },
    #[error("scaling factor {k} is not ≡ 1 (mod 8)")]
    BadScale { k: u64 },
    #[error("rule `{rule}` is missing the variable `{var}` in an assignment")]
    IncompleteAssignment { rule: String, var: String },
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Exact(#[from] CycloError),
}

/// Whether a rule's variables range freely or solve a side condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// All declared variables range over [0, 2π) independently.
    None,
    /// The declared variables include `alpha β gamma theta1..3` satisfying
    /// e^{iθ₃}·cos γ = (e^{iθ₁}·cos α + e^{iθ₂}·cos β)/2.
    A,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    /// Declared variables, in declaration order.
    pub vars: Vec<String>,
    pub lhs: Diagram,
    pub rhs: Diagram,
    pub constraint: Constraint,
}

// ---------------------------------------------------------------------------
// Functors
// ---------------------------------------------------------------------------

/// A phase-side functor applied to both sides of a rule before checking.
///
/// `Scaled(k)` multiplies every phase by `k`; restricting to k ≡ 1 (mod 8)
/// fixes all multiples of π/4, so diagrams built from π/4 constants are left
/// unchanged while other constants move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functor {
    Std,
    Scaled(u64),
}

impl Functor {
    pub fn scaled(k: u64) -> Result<Functor, RulesError> {
        if k % 8 == 1 {
            Ok(Functor::Scaled(k))
        } else {
            Err(RulesError::BadScale { k })
        }
    }

    pub fn apply(&self, d: &Diagram) -> Diagram {
        match self {
            Functor::Std => d.clone(),
            Functor::Scaled(k) => d.scale_phases(*k as i64),
        }
    }
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functor::Std => write!(f, "std"),
            Functor::Scaled(k) => write!(f, "scaled:{k}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Structural closures
// ---------------------------------------------------------------------------

/// The input/output flip: ⟦flip d⟧ = ⟦d⟧ᵀ.
///
/// Every generator flips to a generator except the triangle, whose transpose
/// is its conjugate by X(π).
pub fn flip_diagram(d: &Diagram) -> Diagram {
    let pi = || PhaseExpr::pi_rational(1, 1);
    match d {
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
        Diagram::Cup => crate::diagram::cap(),
        Diagram::Cap => crate::diagram::cup(),
        Diagram::Empty => empty(),
        Diagram::Triangle => {
            seq_many([x(1, 1, pi()), triangle(), x(1, 1, pi())]).expect("1→1 chain")
        }
        Diagram::Seq { first, second, .. } => {
            seq(flip_diagram(second), flip_diagram(first)).expect("flipped composition")
        }
        Diagram::Tensor { left, right, .. } => tensor(flip_diagram(left), flip_diagram(right)),
    }
}

/// The color swap: ⟦swap d⟧ = H^{⊗out}·⟦d⟧·H^{⊗in}.
///
/// Z and X exchange; the cup, cap, swap, and H are fixed (H conjugates them
/// to themselves); the triangle picks up explicit H conjugation.
pub fn color_swap_diagram(d: &Diagram) -> Diagram {
    match d {
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
        Diagram::H => h(),
        Diagram::Id => id(),
        Diagram::Swap => swap(),
        Diagram::Cup => crate::diagram::cup(),
        Diagram::Cap => crate::diagram::cap(),
        Diagram::Empty => empty(),
        Diagram::Triangle => seq_many([h(), triangle(), h()]).expect("1→1 chain"),
        Diagram::Seq { first, second, .. } => {
            seq(color_swap_diagram(first), color_swap_diagram(second))
                .expect("swapped composition")
        }
        Diagram::Tensor { left, right, .. } => {
            tensor(color_swap_diagram(left), color_swap_diagram(right))
        }
    }
}

impl Rule {
    pub fn flipped(&self) -> Rule {
        Rule {
            name: format!("{}.flip", self.name),
            vars: self.vars.clone(),
            lhs: flip_diagram(&self.lhs),
            rhs: flip_diagram(&self.rhs),
            constraint: self.constraint,
        }
    }

    pub fn color_swapped(&self) -> Rule {
        Rule {
            name: format!("{}.cswap", self.name),
            vars: self.vars.clone(),
            lhs: color_swap_diagram(&self.lhs),
            rhs: color_swap_diagram(&self.rhs),
            constraint: self.constraint,
        }
    }

    /// The rule together with its flip, color swap, and both — minus any
    /// variant that coincides with an earlier one.
    pub fn closure(&self) -> Vec<Rule> {
        let mut out: Vec<Rule> = Vec::new();
        for candidate in [
            self.clone(),
            self.flipped(),
            self.color_swapped(),
            self.flipped().color_swapped(),
        ] {
            if !out
                .iter()
                .any(|r| r.lhs == candidate.lhs && r.rhs == candidate.rhs)
            {
                out.push(candidate);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Rule files
// ---------------------------------------------------------------------------

pub fn load_rules(text: &str) -> Result<Vec<Rule>, RulesError> {
    let mut rules = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            if !block.is_empty() {
                rules.push(parse_rule_block(&block)?);
                block.clear();
            }
        } else {
            block.push((idx + 1, raw));
        }
    }
    if !block.is_empty() {
        rules.push(parse_rule_block(&block)?);
    }
    Ok(rules)
}

fn parse_rule_block(lines: &[(usize, &str)]) -> Result<Rule, RulesError> {
    let mut name: Option<String> = None;
    let mut vars: Vec<String> = Vec::new();
    let mut constraint = Constraint::None;
    let mut lhs: Option<Diagram> = None;
    let mut rhs: Option<Diagram> = None;
    let first_line = lines[0].0;

    for &(line_no, raw) in lines {
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let keyword = words.next().unwrap_or("");
        if keyword == "rule" {
            let n = words.next().ok_or(RulesError::Format {
                line: line_no,
                message: "`rule` needs a name".into(),
            })?;
            if words.next().is_some() {
                return Err(RulesError::Format {
                    line: line_no,
                    message: "rule names cannot contain spaces".into(),
                });
            }
            name = Some(n.to_string());
        } else if keyword == "vars" {
            for v in words {
                if v == "pi" || v == "r" {
                    return Err(RulesError::Format {
                        line: line_no,
                        message: format!("`{v}` is reserved and cannot be a variable"),
                    });
                }
                vars.push(v.to_string());
            }
        } else if keyword == "constraint" {
            match words.next() {
                Some("A") => constraint = Constraint::A,
                other => {
                    return Err(RulesError::Format {
                        line: line_no,
                        message: format!("unknown constraint {other:?}"),
                    })
                }
            }
        } else if let Some(colon) = raw.find("lhs:").or(raw.find("rhs:")) {
            // keep column numbers honest by blanking the prefix
            let mut padded = " ".repeat(colon + 4);
            padded.push_str(&raw[colon + 4..]);
            let side = parse_zx_at(&padded, line_no)?;
            if raw[colon..].starts_with("lhs:") {
                lhs = Some(side);
            } else {
                rhs = Some(side);
            }
        } else {
            return Err(RulesError::Format {
                line: line_no,
                message: format!("expected `rule`, `vars`, `constraint`, `lhs:`, or `rhs:`, found `{keyword}`"),
            });
        }
    }

    let name = name.ok_or(RulesError::Format {
        line: first_line,
        message: "block does not start with `rule <name>`".into(),
    })?;
    let lhs = lhs.ok_or(RulesError::Format {
        line: first_line,
        message: format!("rule `{name}` has no `lhs:` line"),
    })?;
    let rhs = rhs.ok_or(RulesError::Format {
        line: first_line,
        message: format!("rule `{name}` has no `rhs:` line"),
    })?;
    let rule = Rule {
        name,
        vars,
        lhs,
        rhs,
        constraint,
    };
    validate_rule(&rule)?;
    Ok(rule)
}

fn validate_rule(rule: &Rule) -> Result<(), RulesError> {
    let (li, lo) = rule.lhs.arity();
    let (ri, ro) = rule.rhs.arity();
    if (li, lo) != (ri, ro) {
        return Err(RulesError::ArityMismatch {
            rule: rule.name.clone(),
            lhs_inputs: li,
            lhs_outputs: lo,
            rhs_inputs: ri,
            rhs_outputs: ro,
        });
    }
    let declared: BTreeSet<&str> = rule.vars.iter().map(|s| s.as_str()).collect();
    for var in rule.lhs.vars().union(&rule.rhs.vars()) {
        if !declared.contains(var.as_str()) {
            return Err(RulesError::UndeclaredVar {
                rule: rule.name.clone(),
                var: var.clone(),
            });
        }
    }
    if rule.constraint == Constraint::A {
        let missing: Vec<String> = CONSTRAINT_A_VARS
            .iter()
            .filter(|v| !declared.contains(**v))
            .map(|v| v.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(RulesError::MissingConstraintVars {
                rule: rule.name.clone(),
                missing,
            });
        }
    }
    Ok(())
}

/// Canonical rule-file text; [`load_rules`] inverts it.
pub fn print_rules(rules: &[Rule]) -> String {
    let mut out = String::new();
    for (i, rule) in rules.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str("rule ");
        out.push_str(&rule.name);
        out.push('\n');
        if !rule.vars.is_empty() {
            out.push_str("vars ");
            out.push_str(&rule.vars.join(" "));
            out.push('\n');
        }
        if rule.constraint == Constraint::A {
            out.push_str("constraint A\n");
        }
        out.push_str("lhs: ");
        out.push_str(&print_zx(&rule.lhs));
        out.push('\n');
        out.push_str("rhs: ");
        out.push_str(&print_zx(&rule.rhs));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// The shipped rule sets
// ---------------------------------------------------------------------------

/// Re-parse a built diagram so the stored tree is the canonical
/// (left-associated) form that loading the printed file produces.
fn canonical(d: Diagram) -> Diagram {
    parse_zx(&print_zx(&d)).expect("printed diagrams re-parse")
}

fn mk_rule(
    name: &str,
    vars: &[&str],
    constraint: Constraint,
    lhs: Diagram,
    rhs: Diagram,
) -> Rule {
    let rule = Rule {
        name: name.to_string(),
        vars: vars.iter().map(|v| v.to_string()).collect(),
        lhs: canonical(lhs),
        rhs: canonical(rhs),
        constraint,
    };
    validate_rule(&rule).expect("shipped rules validate");
    rule
}

fn pi() -> PhaseExpr {
    PhaseExpr::pi_rational(1, 1)
}

fn va(name: &str) -> PhaseExpr {
    PhaseExpr::var(name)
}

/// Controlled phase diag(1,1,1,e^{2iφ}) built linearly in φ: phase φ on each
/// wire and −φ on the parity, so the multiplicity in φ stays at 3.
fn controlled_phase_twice(phi: &PhaseExpr) -> Diagram {
    seq_many([
        tensor(z(1, 1, phi.clone()), z(1, 1, phi.clone())),
        cnot(),
        tensor(id(), z(1, 1, phi.neg())),
        cnot(),
    ])
    .expect("2-wire chain")
}

/// Effect (1, 2e^{iθ}·cos x): split the distinguished entry into the pair
/// e^{i(θ+x)} + e^{i(θ−x)}.
fn cosine_effect(theta: &PhaseExpr, x_var: &PhaseExpr) -> Diagram {
    seq(
        sum_splitter(),
        tensor(
            z(1, 0, theta.add(x_var)),
            z(1, 0, theta.add(&x_var.neg())),
        ),
    )
    .expect("1→0 effect")
}

/// The ten-rule set for π/4 phases: fusion, identities, copy, bialgebra,
/// Euler decomposition, color change, π-commutation, supplementarity, and a
/// unit scalar pair.
pub fn clifford_t_rules() -> Vec<Rule> {
    let a = va("a");
    let b = va("b");
    vec![
        mk_rule(
            "S1",
            &["a", "b"],
            Constraint::None,
            seq(z(2, 1, a.clone()), z(1, 2, b.clone())).unwrap(),
            z(2, 2, a.add(&b)),
        ),
        mk_rule("S2", &[], Constraint::None, z0(1, 1), id()),
        mk_rule("S3", &[], Constraint::None, x0(1, 1), id()),
        mk_rule(
            "E",
            &[],
            Constraint::None,
            tensor(
                loop_zh(PhaseExpr::pi_rational(1, 2)),
                loop_zh(PhaseExpr::pi_rational(3, 2)),
            ),
            empty(),
        ),
        mk_rule(
            "B1",
            &[],
            Constraint::None,
            tensor(seq(x0(0, 1), z0(1, 2)).unwrap(), value_sqrt2()),
            tensor(x0(0, 1), x0(0, 1)),
        ),
        mk_rule(
            "B2",
            &[],
            Constraint::None,
            seq(x0(2, 1), z0(1, 2)).unwrap(),
            tensor(
                seq_many([
                    tensor(z0(1, 2), z0(1, 2)),
                    tensor_many([id(), swap(), id()]),
                    tensor(x0(2, 1), x0(2, 1)),
                ])
                .unwrap(),
                value_sqrt2(),
            ),
        ),
        mk_rule(
            "EU",
            &[],
            Constraint::None,
            h(),
            tensor(
                seq_many([
                    z(1, 1, PhaseExpr::pi_rational(1, 2)),
                    x(1, 1, PhaseExpr::pi_rational(1, 2)),
                    z(1, 1, PhaseExpr::pi_rational(1, 2)),
                ])
                .unwrap(),
                unit_phase(PhaseExpr::pi_rational(-1, 4)),
            ),
        ),
        mk_rule(
            "H",
            &["a"],
            Constraint::None,
            x(2, 1, a.clone()),
            seq_many([tensor(h(), h()), z(2, 1, a.clone()), h()]).unwrap(),
        ),
        mk_rule(
            "K2",
            &["a"],
            Constraint::None,
            seq(z(1, 1, a.clone()), x(1, 1, pi())).unwrap(),
            tensor(
                seq(x(1, 1, pi()), z(1, 1, a.neg())).unwrap(),
                unit_phase(a.clone()),
            ),
        ),
        mk_rule(
            "SUP",
            &["a"],
            Constraint::None,
            seq(
                x0(1, 2),
                tensor(z(1, 0, a.clone()), z(1, 0, a.add(&pi()))),
            )
            .unwrap(),
            tensor_many([x0(1, 0), loop_zh(a.scale(2)), inv_sqrt2()]),
        ),
    ]
}

/// [`clifford_t_rules`] extended with a controlled-phase symmetry, the
/// bialgebra between the merge node and the copy spider, and the constrained
/// cosine-sum rule for arbitrary angles.
pub fn extended_rules() -> Vec<Rule> {
    let mut rules = clifford_t_rules();
    let g = va("g");
    let cp = controlled_phase_twice(&g);
    rules.push(mk_rule(
        "C",
        &["g"],
        Constraint::None,
        seq(swap(), cp.clone()).unwrap(),
        seq(cp, swap()).unwrap(),
    ));
    let merge = flip_diagram(&w_branch());
    rules.push(mk_rule(
        "BW",
        &[],
        Constraint::None,
        seq(merge.clone(), z0(1, 2)).unwrap(),
        seq_many([
            tensor(z0(1, 2), z0(1, 2)),
            tensor_many([id(), swap(), id()]),
            tensor(merge.clone(), merge),
        ])
        .unwrap(),
    ));
    let (t1, t2, t3) = (va("theta1"), va("theta2"), va("theta3"));
    let (al, be, ga) = (va("alpha"), va("beta"), va("gamma"));
    rules.push(mk_rule(
        "A",
        &["alpha", "beta", "gamma", "theta1", "theta2", "theta3"],
        Constraint::A,
        seq_many([
            x(0, 1, pi()),
            sum_splitter(),
            tensor(cosine_effect(&t1, &al), cosine_effect(&t2, &be)),
        ])
        .unwrap(),
        tensor(
            value_two(),
            seq(x(0, 1, pi()), cosine_effect(&t3, &ga)).unwrap(),
        ),
    ));
    rules
}

// ---------------------------------------------------------------------------
// Constraint A sampling
// ---------------------------------------------------------------------------

/// Residual |e^{iθ₃}·cos γ − (e^{iθ₁}·cos α + e^{iθ₂}·cos β)/2| of an
/// assignment, or None when a constraint variable is missing.
pub fn constraint_a_residual(assignment: &Assignment) -> Option<f64> {
    let angle = |name: &str| assignment.get(name).map(|v| v.to_radians());
    let (alpha, beta, gamma) = (angle("alpha")?, angle("beta")?, angle("gamma")?);
    let (t1, t2, t3) = (angle("theta1")?, angle("theta2")?, angle("theta3")?);
    let w = (Complex64::from_polar(alpha.cos(), t1) + Complex64::from_polar(beta.cos(), t2)) / 2.0;
    Some((Complex64::from_polar(gamma.cos(), t3) - w).norm())
}

/// Draw solutions of constraint A: α, β, θ₁, θ₂ uniform in [0, 2π), then
/// θ₃ = arg w and γ = arccos|w| for w = (e^{iθ₁}cos α + e^{iθ₂}cos β)/2,
/// with θ₃ = 0 when w = 0. Every returned assignment has residual ≤ 1e-12.
pub fn sample_constraint_a(count: usize, seed: u64) -> Vec<Assignment> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let alpha = rng.gen_range(0.0..TAU);
            let beta = rng.gen_range(0.0..TAU);
            let t1 = rng.gen_range(0.0..TAU);
            let t2 = rng.gen_range(0.0..TAU);
            let w = (Complex64::from_polar(alpha.cos(), t1)
                + Complex64::from_polar(beta.cos(), t2))
                / 2.0;
            let t3 = if w.norm() == 0.0 {
                0.0
            } else {
                w.arg().rem_euclid(TAU)
            };
            let gamma = w.norm().clamp(0.0, 1.0).acos();
            let assignment: Assignment = [
                ("alpha", alpha),
                ("beta", beta),
                ("gamma", gamma),
                ("theta1", t1),
                ("theta2", t2),
                ("theta3", t3),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), AngleValue::Radians(v)))
            .collect();
            debug_assert!(constraint_a_residual(&assignment).unwrap() <= 1e-12);
            assignment
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Soundness checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMethod {
    /// Decided for all angles at once via the multiplicity grid.
    Forall,
    /// Checked on sampled solutions of the rule's constraint.
    Sampled,
}

impl fmt::Display for CheckMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMethod::Forall => write!(f, "forall"),
            CheckMethod::Sampled => write!(f, "sampled"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RuleCounterexample {
    pub assignment: Assignment,
    /// Max-abs difference of the two sides at the assignment, recomputed
    /// from scratch when the report is built.
    pub discrepancy: f64,
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub rule: String,
    pub functor: Functor,
    pub method: CheckMethod,
    pub sound: bool,
    /// True when a grid decision had to leave exact arithmetic.
    pub float_fallback: bool,
    pub counterexample: Option<RuleCounterexample>,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub budget: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

/// Evaluate both functor-images of a rule at one assignment and return their
/// max-abs difference. Used both to find and to re-verify counterexamples.
pub fn instance_gap(
    rule: &Rule,
    functor: Functor,
    assignment: &Assignment,
) -> Result<f64, RulesError> {
    for var in &rule.vars {
        if !assignment.contains_key(var) {
            return Err(RulesError::IncompleteAssignment {
                rule: rule.name.clone(),
                var: var.clone(),
            });
        }
    }
    let lhs = interp_float(&functor.apply(&rule.lhs).substitute(assignment)?)?;
    let rhs = interp_float(&functor.apply(&rule.rhs).substitute(assignment)?)?;
    Ok(lhs
        .max_abs_diff(&rhs)
        .expect("validated rules have equal shapes"))
}

fn check_rule(rule: &Rule, functor: Functor, opts: &CheckOptions) -> Result<SoundnessReport, RulesError> {
    match rule.constraint {
        Constraint::None => {
            let verdict = decide_forall(
                &functor.apply(&rule.lhs),
                &functor.apply(&rule.rhs),
                Method::Grid,
            )?;
            let counterexample = match verdict.witness {
                Some(w) => Some(RuleCounterexample {
                    discrepancy: instance_gap(rule, functor, &w.assignment)?,
                    assignment: w.assignment,
                }),
                None => None,
            };
            Ok(SoundnessReport {
                rule: rule.name.clone(),
                functor,
                method: CheckMethod::Forall,
                sound: verdict.holds,
                float_fallback: verdict.float_fallback,
                counterexample,
            })
        }
        Constraint::A => {
            let mut counterexample = None;
            for assignment in sample_constraint_a(opts.budget, opts.seed) {
                let gap = instance_gap(rule, functor, &assignment)?;
                if gap > SAMPLE_TOL {
                    // re-verify from scratch before reporting
                    let confirmed = instance_gap(rule, functor, &assignment)?;
                    counterexample = Some(RuleCounterexample {
                        assignment,
                        discrepancy: confirmed,
                    });
                    break;
                }
            }
            Ok(SoundnessReport {
                rule: rule.name.clone(),
                functor,
                method: CheckMethod::Sampled,
                sound: counterexample.is_none(),
                float_fallback: false,
                counterexample,
            })
        }
    }
}

/// Check every rule under the given functor: unconstrained rules are decided
/// for all angles, constrained rules on `opts.budget` sampled solutions.
pub fn check_soundness(
    rules: &[Rule],
    functor: Functor,
    opts: &CheckOptions,
) -> Result<Vec<SoundnessReport>, RulesError> {
    rules
        .iter()
        .map(|rule| check_rule(rule, functor, opts))
        .collect()
}

// ---------------------------------------------------------------------------
// Constraint falsification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct FalsificationReport {
    pub samples: usize,
    /// Violating tuples whose sides nevertheless agreed within 1e-6.
    pub undetected: usize,
    pub min_gap: f64,
    pub min_residual: f64,
}

/// Sample assignments that violate constraint A by residual ≥ 0.1 and check
/// the rule's sides differ on every one of them.
pub fn falsify_constraint_a(
    rule: &Rule,
    count: usize,
    seed: u64,
) -> Result<FalsificationReport, RulesError> {
    let mut rng = rng_from_seed(seed);
    let mut report = FalsificationReport {
        samples: count,
        undetected: 0,
        min_gap: f64::INFINITY,
        min_residual: f64::INFINITY,
    };
    for _ in 0..count {
        let alpha = rng.gen_range(0.0..TAU);
        let beta = rng.gen_range(0.0..TAU);
        let t1 = rng.gen_range(0.0..TAU);
        let t2 = rng.gen_range(0.0..TAU);
        let w = (Complex64::from_polar(alpha.cos(), t1) + Complex64::from_polar(beta.cos(), t2))
            / 2.0;
        let t3 = if w.norm() == 0.0 {
            0.0
        } else {
            w.arg().rem_euclid(TAU)
        };
        let good = w.norm().clamp(0.0, 1.0);
        let off = rng.gen_range(0.1..0.3);
        let bad = if good <= 0.5 { good + off } else { good - off };
        let gamma = bad.clamp(0.0, 1.0).acos();
        let assignment: Assignment = [
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("theta1", t1),
            ("theta2", t2),
            ("theta3", t3),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), AngleValue::Radians(v)))
        .collect();
        let residual = constraint_a_residual(&assignment).expect("all six present");
        let gap = instance_gap(rule, Functor::Std, &assignment)?;
        if gap <= 1e-6 {
            report.undetected += 1;
        }
        report.min_gap = report.min_gap.min(gap);
        report.min_residual = report.min_residual.min(residual);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// The separating scalar pair
// ---------------------------------------------------------------------------

/// Two scalar diagrams that every π/4-sound functor check must treat alike —
/// yet the scaling functor tells them apart.
#[derive(Debug, Clone)]
pub struct ScalarPair {
    pub lhs: Diagram,
    pub rhs: Diagram,
}

/// The pair: (1 + e^{2πi/3})(1 + e^{4πi/3}) on the left — exactly 1 — and the
/// product of the value-2 and value-½ gadgets on the right, also exactly 1.
/// Scaling phases by 9 fixes the right side (all constants are multiples of
/// π/4) but sends the left side to (1+1)(1+1) = 4.
pub fn separating_pair() -> ScalarPair {
    ScalarPair {
        lhs: tensor(
            z(0, 0, PhaseExpr::pi_rational(2, 3)),
            z(0, 0, PhaseExpr::pi_rational(4, 3)),
        ),
        rhs: tensor(value_two(), value_half()),
    }
}

#[derive(Debug, Clone)]
pub struct SeparationRow {
    pub functor: Functor,
    pub lhs: Cyclotomic,
    pub rhs: Cyclotomic,
    pub equal: bool,
}

/// Evaluate the separating pair exactly under `std` and `scaled:9`.
pub fn separation_table() -> Result<Vec<SeparationRow>, RulesError> {
    let pair = separating_pair();
    let mut rows = Vec::new();
    for functor in [Functor::Std, Functor::Scaled(9)] {
        let lhs = interp_exact(&functor.apply(&pair.lhs))?.get(0, 0).clone();
        let rhs = interp_exact(&functor.apply(&pair.rhs))?.get(0, 0).clone();
        let equal = lhs.try_equal(&rhs)?;
        rows.push(SeparationRow {
            functor,
            lhs,
            rhs,
            equal,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::cap;
    use crate::sample::{self, PhasePool};
    use crate::semantics::{interp_float, semantic_eq, EqMode};
    use proptest::prelude::*;

    fn quick() -> CheckOptions {
        CheckOptions {
            budget: 40,
            seed: DEFAULT_SEED,
        }
    }

    #[test]
    fn rule_files_print_and_reload() {
        let rules = extended_rules();
        assert_eq!(rules.len(), 13);
        let text = print_rules(&rules);
        let reloaded = load_rules(&text).unwrap();
        assert_eq!(reloaded, rules);
        // and printing again is stable
        assert_eq!(print_rules(&reloaded), text);
    }

    #[test]
    fn load_rules_reports_positions_and_arities() {
        let err = load_rules("rule bad\nlhs: Z[1,1](2.5a)\nrhs: id\n").unwrap_err();
        match err {
            RulesError::Syntax(DslError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = load_rules("rule bad\nvars a\nlhs: Z[1,1](a)\nrhs: Z[1,2](a)\n").unwrap_err();
        assert!(matches!(err, RulesError::ArityMismatch { .. }));
        let err = load_rules("rule bad\nlhs: Z[1,1](a)\nrhs: id\n").unwrap_err();
        assert!(matches!(err, RulesError::UndeclaredVar { .. }));
        let err =
            load_rules("rule bad\nvars alpha\nconstraint A\nlhs: Z[1,1](alpha)\nrhs: id\n")
                .unwrap_err();
        assert!(matches!(err, RulesError::MissingConstraintVars { .. }));
        let err = load_rules("vars a\n").unwrap_err();
        assert!(matches!(err, RulesError::Format { line: 1, .. }));
        // comments and blank lines separate blocks
        let rules = load_rules("# set\nrule one\nlhs: H\nrhs: H\n\nrule two\nlhs: id\nrhs: id\n")
            .unwrap();
        assert_eq!(rules.len(), 2);
    }

    #[test]
    fn clifford_t_rules_sound_under_std_and_scaled() {
        for functor in [Functor::Std, Functor::Scaled(9)] {
            let reports = check_soundness(&clifford_t_rules(), functor, &quick()).unwrap();
            for r in &reports {
                assert!(r.sound, "rule {} under {}", r.rule, r.functor);
                assert_eq!(r.method, CheckMethod::Forall);
                assert!(!r.float_fallback, "rule {} fell back", r.rule);
            }
        }
    }

    #[test]
    fn extended_rules_sound_under_std() {
        let reports = check_soundness(&extended_rules(), Functor::Std, &quick()).unwrap();
        for r in &reports {
            assert!(r.sound, "rule {}", r.rule);
        }
        let a_report = reports.iter().find(|r| r.rule == "A").unwrap();
        assert_eq!(a_report.method, CheckMethod::Sampled);
    }

    #[test]
    fn scaling_functor_breaks_the_constrained_rule() {
        let rules = extended_rules();
        let a_rule = rules.iter().find(|r| r.name == "A").unwrap();
        let report = check_rule(a_rule, Functor::Scaled(9), &quick()).unwrap();
        assert!(!report.sound);
        let ce = report.counterexample.expect("counterexample");
        assert!(ce.discrepancy > 1e-6, "gap {}", ce.discrepancy);
        // the witness re-verifies from a fresh evaluation
        let again = instance_gap(a_rule, Functor::Scaled(9), &ce.assignment).unwrap();
        assert!((again - ce.discrepancy).abs() < 1e-12);
        // determinism: same seed, same counterexample
        let report2 = check_rule(a_rule, Functor::Scaled(9), &quick()).unwrap();
        assert_eq!(
            report2.counterexample.unwrap().assignment,
            ce.assignment
        );
    }

    #[test]
    fn functor_constructor_enforces_the_residue_class() {
        assert!(Functor::scaled(9).is_ok());
        assert!(Functor::scaled(17).is_ok());
        assert!(matches!(
            Functor::scaled(3),
            Err(RulesError::BadScale { k: 3 })
        ));
        assert_eq!(Functor::Scaled(9).to_string(), "scaled:9");
        assert_eq!(Functor::Std.to_string(), "std");
    }

    #[test]
    fn scaling_fixes_pi4_diagrams_exactly() {
        let mut rng = sample::rng_from_seed(3);
        for _ in 0..20 {
            let d = sample::random_ground_diagram(&mut rng, PhasePool::Pi4, 3, 2);
            let scaled = Functor::Scaled(9).apply(&d);
            assert!(semantic_eq(&d, &scaled, EqMode::Exact).unwrap());
        }
    }

    #[test]
    fn constraint_sampler_solves_the_relation() {
        let samples = sample_constraint_a(200, 5);
        assert_eq!(samples.len(), 200);
        for s in &samples {
            assert!(constraint_a_residual(s).unwrap() <= 1e-12);
        }
        // same seed reproduces the stream
        assert_eq!(samples, sample_constraint_a(200, 5));
        // the degenerate w = 0 case: α = β = π/2 forces γ = π/2, θ₃ = 0
        let degenerate: Assignment = [
            ("alpha", AngleValue::PiRational(1, 2)),
            ("beta", AngleValue::PiRational(1, 2)),
            ("gamma", AngleValue::PiRational(1, 2)),
            ("theta1", AngleValue::Radians(0.3)),
            ("theta2", AngleValue::Radians(1.1)),
            ("theta3", AngleValue::Radians(0.0)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        assert!(constraint_a_residual(&degenerate).unwrap() <= 1e-12);
        let rules = extended_rules();
        let a_rule = rules.iter().find(|r| r.name == "A").unwrap();
        assert!(instance_gap(a_rule, Functor::Std, &degenerate).unwrap() <= 1e-12);
    }

    #[test]
    fn violating_tuples_always_separate_the_sides() {
        let rules = extended_rules();
        let a_rule = rules.iter().find(|r| r.name == "A").unwrap();
        let report = falsify_constraint_a(a_rule, 1000, 17).unwrap();
        assert_eq!(report.samples, 1000);
        assert_eq!(report.undetected, 0);
        assert!(report.min_gap > 1e-6, "min gap {}", report.min_gap);
        assert!(report.min_residual >= 0.1 - 1e-12);
    }

    #[test]
    fn flip_transposes_the_matrix() {
        let mut rng = sample::rng_from_seed(31);
        for _ in 0..25 {
            let d = sample::random_ground_diagram(&mut rng, PhasePool::Mixed, 3, 2);
            let m = interp_float(&d).unwrap();
            let f = interp_float(&flip_diagram(&d)).unwrap();
            assert_eq!((f.rows(), f.cols()), (m.cols(), m.rows()));
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    assert!((m.get(i, j) - f.get(j, i)).norm() < 1e-9);
                }
            }
        }
        // a triangle in isolation
        let f = interp_float(&flip_diagram(&triangle())).unwrap();
        for (i, j, want) in [(0, 0, 1.0), (0, 1, 0.0), (1, 0, 1.0), (1, 1, 1.0)] {
            assert!((f.get(i, j) - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
        assert_eq!(flip_diagram(&cap()), crate::diagram::cup());
    }

    #[test]
    fn color_swap_conjugates_by_hadamards() {
        let mut rng = sample::rng_from_seed(37);
        for _ in 0..25 {
            let d = sample::random_ground_diagram(&mut rng, PhasePool::Mixed, 3, 2);
            let (n, m) = d.arity();
            let h_layer = |k: usize| tensor_many((0..k).map(|_| h()));
            let conj = seq_many([h_layer(n), d.clone(), h_layer(m)]).unwrap();
            let want = interp_float(&conj).unwrap();
            let got = interp_float(&color_swap_diagram(&d)).unwrap();
            let gap = want.max_abs_diff(&got).unwrap();
            assert!(gap < 1e-9, "gap {gap}");
        }
    }

    #[test]
    fn rule_closures_stay_sound() {
        let rules = extended_rules();
        let opts = CheckOptions {
            budget: 15,
            seed: DEFAULT_SEED,
        };
        for name in ["S1", "K2", "BW", "SUP", "A"] {
            let rule = rules.iter().find(|r| r.name == name).unwrap();
            let closure = rule.closure();
            assert!(!closure.is_empty());
            let reports = check_soundness(&closure, Functor::Std, &opts).unwrap();
            for r in &reports {
                assert!(r.sound, "closure member {} unsound", r.rule);
            }
        }
        // closures deduplicate self-symmetric variants
        let s2 = rules.iter().find(|r| r.name == "S2").unwrap();
        assert_eq!(s2.closure().len(), 2); // flip(Z[1,1]) = Z[1,1]; cswap gives X
    }

    #[test]
    fn separating_pair_agrees_under_std_but_not_scaled() {
        let rows = separation_table().unwrap();
        assert_eq!(rows.len(), 2);
        let std_row = &rows[0];
        assert_eq!(std_row.functor, Functor::Std);
        assert!(std_row.equal);
        assert!(std_row.lhs.try_equal(&Cyclotomic::one(8)).unwrap());
        assert!(std_row.rhs.try_equal(&Cyclotomic::one(8)).unwrap());
        let scaled_row = &rows[1];
        assert_eq!(scaled_row.functor, Functor::Scaled(9));
        assert!(!scaled_row.equal);
        assert!(scaled_row
            .lhs
            .try_equal(&Cyclotomic::from_integer(4, 8))
            .unwrap());
        assert!(scaled_row.rhs.try_equal(&Cyclotomic::one(8)).unwrap());
    }

    #[test]
    #[ignore = "writes the shipped rule files; run manually after editing the sets"]
    fn regenerate_rule_files() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/rules");
        std::fs::create_dir_all(dir).unwrap();
        let header = "# Rewrite rules checked by `rules-check`; see rules.rs for provenance.\n\n";
        std::fs::write(
            format!("{dir}/clifford_t.rules"),
            format!("{header}{}", print_rules(&clifford_t_rules())),
        )
        .unwrap();
        std::fs::write(
            format!("{dir}/zxc.rules"),
            format!("{header}{}", print_rules(&extended_rules())),
        )
        .unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn closures_preserve_semantics_pointwise(seed in 0u64..500) {
            let mut rng = sample::rng_from_seed(seed);
            let d = sample::random_ground_diagram(&mut rng, PhasePool::RationalPi, 2, 2);
            // flip twice is the identity on semantics
            let twice = flip_diagram(&flip_diagram(&d));
            let gap = interp_float(&d).unwrap()
                .max_abs_diff(&interp_float(&twice).unwrap())
                .unwrap();
            prop_assert!(gap < 1e-9);
            // color swap twice as well
            let cs_twice = color_swap_diagram(&color_swap_diagram(&d));
            let gap = interp_float(&d).unwrap()
                .max_abs_diff(&interp_float(&cs_twice).unwrap())
                .unwrap();
            prop_assert!(gap < 1e-9);
        }
    }
}
