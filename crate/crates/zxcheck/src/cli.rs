//! Command-line front end over the parser, the evaluators, and the deciders.
//!
//! The exit codes form a stable contract:
//!
//! * `0` — success, or the queried property holds;
//! * `1` — the queried property fails (a witness is printed when one exists);
//! * `2` — usage, input, or parse errors;
//! * `3` — internal evaluation errors.
//!
//! Positional inputs accept a file path, `-` for standard input, or — when
//! the argument names no existing file — the term text itself, so quick
//! checks work without temporary files: `zxcheck interp 'H ; H'`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{self, Read as _, Write};
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::diagram::{Assignment, Diagram, PhaseExpr};
use crate::dsl::{
    parse_zw_document, parse_zx_document, print_zw, print_zx, DslError,
};
use crate::exactnum::CycloError;
use crate::projector::{decide_forall, DecideError, Method, Verdict};
use crate::rules::{
    check_soundness, load_rules, print_rules, separating_pair, separation_table, CheckOptions,
    Functor, RulesError, SoundnessReport, DEFAULT_BUDGET, DEFAULT_SEED,
};
use crate::semantics::{
    fmt_complex, interp, interp_float, semantic_eq, Backend, EqMode, InterpError, Matrix,
};
use crate::zw::{interp_zw, interp_zw_float, roundtrip_check, to_zw, to_zx, ZwDiagram};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

/// Tolerance used whenever a command compares floating-point matrices.
pub const FLOAT_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Failure plumbing
// ---------------------------------------------------------------------------

/// A command failure carrying the exit code it maps to.
#[derive(Debug)]
enum Failure {
    /// Bad input: unreadable files, parse errors, violated preconditions.
    Usage(String),
    /// The input was well formed but evaluation could not complete.
    Eval(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Eval(_) => EXIT_EVAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Eval(m) => m,
        }
    }
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<InterpError> for Failure {
    fn from(e: InterpError) -> Self {
        match e {
            InterpError::NonGround(_) | InterpError::ArityMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Eval(e.to_string()),
        }
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::Param(_) => Failure::Usage(e.to_string()),
            DecideError::Interp(inner) => Failure::from(inner),
            _ => Failure::Eval(e.to_string()),
        }
    }
}

impl From<RulesError> for Failure {
    fn from(e: RulesError) -> Self {
        match e {
            RulesError::Syntax(_)
            | RulesError::Format { .. }
            | RulesError::ArityMismatch { .. }
            | RulesError::UndeclaredVar { .. }
            | RulesError::MissingConstraintVars { .. }
            | RulesError::BadScale { .. } => Failure::Usage(e.to_string()),
            RulesError::Decide(inner) => Failure::from(inner),
            RulesError::Interp(inner) => Failure::from(inner),
            _ => Failure::Eval(e.to_string()),
        }
    }
}

impl From<CycloError> for Failure {
    fn from(e: CycloError) -> Self {
        Failure::Eval(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Eval(format!("write failed: {e}"))
    }
}

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "zxcheck",
    version,
    about = "Parse, evaluate, and verify spider-diagram terms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a document and print its canonical form.
    Parse(ParseArgs),
    /// Evaluate a ground term and print its matrix.
    Interp(InterpArgs),
    /// Decide whether two ground terms denote the same matrix.
    Eq(EqArgs),
    /// Decide whether two parametrized terms agree at every angle.
    ParamEq(ParamEqArgs),
    /// Check every rule in a file for soundness under a functor.
    RulesCheck(RulesCheckArgs),
    /// Translate a ground term into the other calculus.
    Translate(TranslateArgs),
    /// Translate a ground term out and back, then compare the matrices.
    Roundtrip(RoundtripArgs),
    /// Show the scalar pair that separates `std` from `scaled:9`.
    Incompleteness(IncompletenessArgs),
}

#[derive(clap::Args)]
struct ParseArgs {
    /// File path, `-` for stdin, or the document text itself.
    input: String,
    /// Read white-spider terms instead of phase-spider terms.
    #[arg(long)]
    zw: bool,
    /// Read a rule file and print it canonically.
    #[arg(long, conflicts_with = "zw")]
    rules: bool,
}

#[derive(clap::Args)]
struct InterpArgs {
    /// File path, `-` for stdin, or the term text itself.
    input: String,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Phase reinterpretation applied before evaluating: `std` or `scaled:K`.
    #[arg(long, value_parser = parse_functor, default_value = "std", conflicts_with = "zw")]
    functor: Functor,
    /// Read a white-spider term instead of a phase-spider term.
    #[arg(long)]
    zw: bool,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct EqArgs {
    /// First term (file path, `-`, or text). With no second argument this
    /// must be a document holding exactly two terms.
    lhs: String,
    /// Second term (file path or text).
    rhs: Option<String>,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    #[arg(long, value_parser = parse_functor, default_value = "std", conflicts_with = "zw")]
    functor: Functor,
    /// Compare white-spider terms instead of phase-spider terms.
    #[arg(long)]
    zw: bool,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct ParamEqArgs {
    /// First term (file path, `-`, or text). With no second argument this
    /// must be a document holding exactly two terms.
    lhs: String,
    /// Second term (file path or text).
    rhs: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Grid)]
    method: MethodArg,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct RulesCheckArgs {
    /// Rule file path, or `-` for stdin.
    file: String,
    #[arg(long, value_parser = parse_functor, default_value = "std")]
    functor: Functor,
    /// Samples per constrained rule.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct TranslateArgs {
    /// File path, `-` for stdin, or the term text itself.
    input: String,
    /// Target calculus; `zx` expects a white-spider input term.
    #[arg(long, value_enum)]
    to: Target,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct RoundtripArgs {
    /// File path, `-` for stdin, or the term text itself.
    input: String,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct IncompletenessArgs {
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

impl BackendArg {
    fn name(self) -> &'static str {
        match self {
            BackendArg::Exact => "exact",
            BackendArg::Float => "float",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Grid,
    Projector,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Grid => Method::Grid,
            MethodArg::Projector => Method::Projector,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Zw,
    Zx,
}

fn parse_functor(s: &str) -> Result<Functor, String> {
    if s == "std" {
        return Ok(Functor::Std);
    }
    if let Some(rest) = s.strip_prefix("scaled:") {
        let k: u64 = rest
            .parse()
            .map_err(|_| format!("`{rest}` is not a positive integer"))?;
        return Functor::scaled(k).map_err(|e| e.to_string());
    }
    Err("expected `std` or `scaled:K`".to_string())
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Run the CLI against the process arguments, printing to the process
/// streams, and return the exit code.
pub fn run() -> i32 {
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    run_from(std::env::args_os(), &mut out, &mut err)
}

/// Run the CLI against explicit arguments and writers. The first argument is
/// the program name, as in `argv`.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{rendered}");
                return EXIT_OK;
            }
            let _ = write!(err, "{rendered}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Parse(a) => cmd_parse(&a, out),
        Command::Interp(a) => cmd_interp(&a, out),
        Command::Eq(a) => cmd_eq(&a, out),
        Command::ParamEq(a) => cmd_param_eq(&a, out),
        Command::RulesCheck(a) => cmd_rules_check(&a, out),
        Command::Translate(a) => cmd_translate(&a, out),
        Command::Roundtrip(a) => cmd_roundtrip(&a, out),
        Command::Incompleteness(a) => cmd_incompleteness(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.code()
        }
    }
}

// ---------------------------------------------------------------------------
// Input helpers
// ---------------------------------------------------------------------------

/// Resolve a positional input: `-` reads stdin, an existing path reads the
/// file, anything else is taken as the term text itself.
fn read_input(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
        return Ok(text);
    }
    let path = Path::new(arg);
    if path.exists() {
        return std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read `{arg}`: {e}")));
    }
    Ok(arg.to_string())
}

/// Resolve an input that must be a file or stdin (used for rule files).
fn read_file_input(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        return read_input(arg);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Failure::Usage(format!("no such file: `{arg}`")));
    }
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read `{arg}`: {e}")))
}

fn one_zx(text: &str) -> Result<Diagram, Failure> {
    let mut blocks = parse_zx_document(text)?;
    match blocks.len() {
        1 => Ok(blocks.remove(0)),
        n => Err(Failure::Usage(format!(
            "expected exactly one term, found {n}"
        ))),
    }
}

fn one_zw(text: &str) -> Result<ZwDiagram, Failure> {
    let mut blocks = parse_zw_document(text)?;
    match blocks.len() {
        1 => Ok(blocks.remove(0)),
        n => Err(Failure::Usage(format!(
            "expected exactly one term, found {n}"
        ))),
    }
}

/// Fetch the two sides of a comparison: either two separate inputs, or a
/// single document holding exactly two terms.
fn two_texts(lhs: &str, rhs: Option<&str>) -> Result<(String, String), Failure> {
    let left = read_input(lhs)?;
    match rhs {
        Some(r) => Ok((left, read_input(r)?)),
        None => {
            let blocks = split_blocks(&left);
            if blocks.len() == 2 {
                Ok((blocks[0].clone(), blocks[1].clone()))
            } else {
                Err(Failure::Usage(format!(
                    "expected a document with exactly two terms, found {}",
                    blocks.len()
                )))
            }
        }
    }
}

/// Split a document into blank-line-separated blocks, treating comment-only
/// lines as blank, mirroring the document grammar.
fn split_blocks(text: &str) -> Vec<String> {
    let mut blocks: Vec<String> = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        let effective = line.split('#').next().unwrap_or("");
        if effective.trim().is_empty() {
            if !current.trim().is_empty() {
                blocks.push(std::mem::take(&mut current));
            } else {
                current.clear();
            }
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.trim().is_empty() {
        blocks.push(current);
    }
    blocks
}

fn require_ground(d: &Diagram) -> Result<(), Failure> {
    let vars = d.vars();
    if vars.is_empty() {
        Ok(())
    } else {
        let names: Vec<String> = vars.into_iter().collect();
        Err(Failure::Usage(format!(
            "term must be ground; it has variables: {}",
            names.join(", ")
        )))
    }
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

fn matrix_dims(m: &Matrix) -> (usize, usize) {
    match m {
        Matrix::Exact(e) => (e.rows(), e.cols()),
        Matrix::Float(f) => (f.rows(), f.cols()),
    }
}

/// Print a matrix; a 1×1 result prints as a bare scalar.
fn write_matrix(out: &mut dyn Write, m: &Matrix) -> io::Result<()> {
    if matrix_dims(m) == (1, 1) {
        match m {
            Matrix::Exact(e) => writeln!(out, "{}", e.get(0, 0)),
            Matrix::Float(f) => writeln!(out, "{}", fmt_complex(f.get(0, 0))),
        }
    } else {
        write!(out, "{m}")
    }
}

fn render_matrix(m: &Matrix) -> String {
    let mut buf = Vec::new();
    write_matrix(&mut buf, m).expect("writing to a buffer cannot fail");
    String::from_utf8(buf).expect("matrix rendering is UTF-8")
}

fn matrix_entries_json(m: &Matrix) -> serde_json::Value {
    let f = m.to_float();
    let rows: Vec<serde_json::Value> = (0..f.rows())
        .map(|i| {
            let row: Vec<serde_json::Value> = (0..f.cols())
                .map(|j| {
                    let z = f.get(i, j);
                    json!({ "re": z.re, "im": z.im })
                })
                .collect();
            json!(row)
        })
        .collect();
    json!(rows)
}

fn fmt_angle(v: crate::diagram::AngleValue) -> String {
    PhaseExpr::from_angle(v).to_string()
}

fn fmt_assignment(a: &Assignment) -> String {
    a.iter()
        .map(|(var, &val)| format!("{var} = {}", fmt_angle(val)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn assignment_json(a: &Assignment) -> serde_json::Value {
    let map: BTreeMap<&str, f64> = a
        .iter()
        .map(|(var, &val)| (var.as_str(), val.to_radians()))
        .collect();
    json!(map)
}

fn write_json(out: &mut dyn Write, value: &serde_json::Value) -> io::Result<()> {
    writeln!(out, "{value}")
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_parse(a: &ParseArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = if a.rules {
        read_file_input(&a.input)?
    } else {
        read_input(&a.input)?
    };
    if a.rules {
        let rules = load_rules(&text)?;
        write!(out, "{}", print_rules(&rules))?;
    } else if a.zw {
        let blocks = parse_zw_document(&text)?;
        for (i, d) in blocks.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "{}", print_zw(d))?;
        }
    } else {
        let blocks = parse_zx_document(&text)?;
        for (i, d) in blocks.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "{}", print_zx(d))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_interp(a: &InterpArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = read_input(&a.input)?;
    let matrix = if a.zw {
        let d = one_zw(&text)?;
        match a.backend {
            BackendArg::Exact => interp_zw(&d),
            BackendArg::Float => Matrix::Float(interp_zw_float(&d)),
        }
    } else {
        let d = a.functor.apply(&one_zx(&text)?);
        let backend = match a.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        };
        interp(&d, backend)?
    };
    if a.json {
        let (rows, cols) = matrix_dims(&matrix);
        let value = json!({
            "backend": a.backend.name(),
            "functor": a.functor.to_string(),
            "exact": matches!(matrix, Matrix::Exact(_)),
            "rows": rows,
            "cols": cols,
            "entries": matrix_entries_json(&matrix),
            "display": render_matrix(&matrix).trim_end(),
        });
        write_json(out, &value)?;
    } else {
        write_matrix(out, &matrix)?;
    }
    Ok(EXIT_OK)
}

fn cmd_eq(a: &EqArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (left_text, right_text) = two_texts(&a.lhs, a.rhs.as_deref())?;
    let equal = if a.zw {
        let (l, r) = (one_zw(&left_text)?, one_zw(&right_text)?);
        if l.arity() != r.arity() {
            let (li, lo) = l.arity();
            let (ri, ro) = r.arity();
            return Err(Failure::Usage(format!(
                "terms have different arity: {li}→{lo} vs {ri}→{ro}"
            )));
        }
        match a.backend {
            BackendArg::Exact => match (interp_zw(&l), interp_zw(&r)) {
                (Matrix::Exact(ml), Matrix::Exact(mr)) => ml.try_eq(&mr)?,
                (ml, mr) => float_eq(&ml.to_float(), &mr.to_float())?,
            },
            BackendArg::Float => float_eq(&interp_zw_float(&l), &interp_zw_float(&r))?,
        }
    } else {
        let l = a.functor.apply(&one_zx(&left_text)?);
        let r = a.functor.apply(&one_zx(&right_text)?);
        let mode = match a.backend {
            BackendArg::Exact => EqMode::Exact,
            BackendArg::Float => EqMode::Tol(FLOAT_TOL),
        };
        semantic_eq(&l, &r, mode)?
    };
    if a.json {
        let value = json!({
            "equal": equal,
            "backend": a.backend.name(),
            "tolerance": match a.backend {
                BackendArg::Exact => serde_json::Value::Null,
                BackendArg::Float => json!(FLOAT_TOL),
            },
        });
        write_json(out, &value)?;
    } else {
        writeln!(out, "{}", if equal { "equal" } else { "not equal" })?;
    }
    Ok(if equal { EXIT_OK } else { EXIT_FAIL })
}

fn float_eq(
    l: &crate::semantics::FloatMatrix,
    r: &crate::semantics::FloatMatrix,
) -> Result<bool, Failure> {
    let diff = l
        .max_abs_diff(r)
        .ok_or_else(|| Failure::Eval("matrix shapes diverged during comparison".to_string()))?;
    Ok(diff <= FLOAT_TOL)
}

fn cmd_param_eq(a: &ParamEqArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let (left_text, right_text) = two_texts(&a.lhs, a.rhs.as_deref())?;
    let l = one_zx(&left_text)?;
    let r = one_zx(&right_text)?;
    let verdict = decide_forall(&l, &r, a.method.into())?;
    if a.json {
        write_json(out, &verdict_json(&verdict))?;
    } else {
        write_verdict(out, &verdict)?;
    }
    Ok(if verdict.holds { EXIT_OK } else { EXIT_FAIL })
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    json!({
        "holds": v.holds,
        "method": v.method.to_string(),
        "float_fallback": v.float_fallback,
        "mu": v.mu,
        "witness": v.witness.as_ref().map(|w| assignment_json(&w.assignment)),
        "discrepancy": v.witness.as_ref().map(|w| w.discrepancy),
    })
}

fn write_verdict(out: &mut dyn Write, v: &Verdict) -> io::Result<()> {
    if v.holds {
        writeln!(out, "holds for all angles  [method: {}]", v.method)?;
    } else {
        writeln!(out, "fails  [method: {}]", v.method)?;
    }
    if !v.mu.is_empty() {
        let mu: Vec<String> = v.mu.iter().map(|(var, m)| format!("{var} = {m}")).collect();
        writeln!(out, "multiplicity: {}", mu.join(", "))?;
    }
    if v.float_fallback {
        writeln!(out, "note: grid evaluated in floating point")?;
    }
    if let Some(w) = &v.witness {
        writeln!(out, "witness: {}", fmt_assignment(&w.assignment))?;
        writeln!(out, "max |difference| at witness: {:.3e}", w.discrepancy)?;
    }
    Ok(())
}

fn cmd_rules_check(a: &RulesCheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = read_file_input(&a.file)?;
    let rules = load_rules(&text)?;
    let opts = CheckOptions {
        budget: a.budget,
        seed: a.seed,
    };
    let reports = check_soundness(&rules, a.functor, &opts)?;
    let all_sound = reports.iter().all(|r| r.sound);
    if a.json {
        let value = json!({
            "functor": a.functor.to_string(),
            "budget": a.budget,
            "seed": a.seed,
            "all_sound": all_sound,
            "rules": reports.iter().map(report_json).collect::<Vec<_>>(),
        });
        write_json(out, &value)?;
    } else {
        for report in &reports {
            write_report(out, report)?;
        }
        let sound = reports.iter().filter(|r| r.sound).count();
        writeln!(
            out,
            "summary: {} checked, {} sound, {} unsound",
            reports.len(),
            sound,
            reports.len() - sound
        )?;
    }
    Ok(if all_sound { EXIT_OK } else { EXIT_FAIL })
}

fn report_json(r: &SoundnessReport) -> serde_json::Value {
    json!({
        "rule": r.rule,
        "method": r.method.to_string(),
        "sound": r.sound,
        "float_fallback": r.float_fallback,
        "counterexample": r.counterexample.as_ref().map(|c| {
            json!({
                "assignment": assignment_json(&c.assignment),
                "discrepancy": c.discrepancy,
            })
        }),
    })
}

fn write_report(out: &mut dyn Write, r: &SoundnessReport) -> io::Result<()> {
    if r.sound {
        writeln!(out, "{}: sound  [{}, {}]", r.rule, r.method, r.functor)?;
    } else {
        writeln!(out, "{}: UNSOUND  [{}, {}]", r.rule, r.method, r.functor)?;
        if let Some(c) = &r.counterexample {
            writeln!(out, "  counterexample: {}", fmt_assignment(&c.assignment))?;
            writeln!(out, "  max |difference|: {:.3e}", c.discrepancy)?;
        }
    }
    Ok(())
}

fn cmd_translate(a: &TranslateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = read_input(&a.input)?;
    let (printed, deviation) = match a.to {
        Target::Zw => {
            let d = one_zx(&text)?;
            require_ground(&d)?;
            let image = to_zw(&d);
            let dev = interp_float(&d)?
                .max_abs_diff(&interp_zw_float(&image))
                .ok_or_else(|| {
                    Failure::Eval("translation changed the arity; please report".to_string())
                })?;
            (print_zw(&image), dev)
        }
        Target::Zx => {
            let d = one_zw(&text)?;
            let image = to_zx(&d);
            let dev = interp_zw_float(&d)
                .max_abs_diff(&interp_float(&image)?)
                .ok_or_else(|| {
                    Failure::Eval("translation changed the arity; please report".to_string())
                })?;
            (print_zx(&image), dev)
        }
    };
    let holds = deviation <= FLOAT_TOL;
    if a.json {
        let value = json!({
            "to": match a.to { Target::Zw => "zw", Target::Zx => "zx" },
            "output": printed,
            "max_abs_deviation": deviation,
            "holds": holds,
        });
        write_json(out, &value)?;
    } else {
        writeln!(out, "{printed}")?;
        writeln!(out, "max abs deviation: {deviation:.3e}")?;
    }
    Ok(if holds { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_roundtrip(a: &RoundtripArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = read_input(&a.input)?;
    let d = one_zx(&text)?;
    require_ground(&d)?;
    let verdict = roundtrip_check(&d)?;
    if a.json {
        let value = json!({
            "holds": verdict.holds,
            "exact": verdict.exact,
            "max_abs_diff": verdict.max_abs_diff,
        });
        write_json(out, &value)?;
    } else {
        let outcome = if verdict.holds { "holds" } else { "FAILS" };
        match verdict.max_abs_diff {
            Some(diff) => writeln!(out, "round trip {outcome} (float, max |Δ| = {diff:.3e})")?,
            None => writeln!(out, "round trip {outcome} (exact)")?,
        }
    }
    Ok(if verdict.holds { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_incompleteness(a: &IncompletenessArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let pair = separating_pair();
    let rows = separation_table()?;
    if a.json {
        let value = json!({
            "lhs_term": print_zx(&pair.lhs),
            "rhs_term": print_zx(&pair.rhs),
            "rows": rows.iter().map(|row| {
                json!({
                    "functor": row.functor.to_string(),
                    "lhs": row.lhs.to_string(),
                    "rhs": row.rhs.to_string(),
                    "equal": row.equal,
                })
            }).collect::<Vec<_>>(),
        });
        write_json(out, &value)?;
    } else {
        writeln!(out, "lhs: {}", print_zx(&pair.lhs))?;
        writeln!(out, "rhs: {}", print_zx(&pair.rhs))?;
        writeln!(out)?;
        writeln!(out, "{:<10}  {:>4}  {:>4}  equal", "functor", "lhs", "rhs")?;
        for row in &rows {
            writeln!(
                out,
                "{:<10}  {:>4}  {:>4}  {}",
                row.functor.to_string(),
                row.lhs.to_string(),
                row.rhs.to_string(),
                if row.equal { "yes" } else { "no" }
            )?;
        }
    }
    Ok(EXIT_OK)
}
