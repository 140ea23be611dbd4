//! Textual syntax for diagrams: a small line-friendly grammar with `;` for
//! sequential and `*` for parallel composition, plus canonical printers.
//!
//! Grammar (shared by both calculi):
//!
//! ```text
//! term       := tensorExpr (';' tensorExpr)*
//! tensorExpr := atom ('*' atom)*
//! atom       := generator | '(' term ')'
//! ```
//!
//! Phase-spider generators: `Z[n,m](phase)`, `X[n,m](phase)` (the phase may
//! be omitted when 0), `H`, `id`, `swap`, `cup`, `cap`, `empty`, `T`.
//! A phase is a signed sum of integer-coefficient variables (`2a`, `-b`),
//! rational multiples of π (`pi`, `3 pi`, `pi/4`, `3/4 pi`), and decimal
//! radians marked with an `r` suffix (`1.234r`); `r` is reserved and cannot
//! name a variable. White-spider generators: `Zw[n,m](re,im)`, `W11`, `W12`,
//! `fcross`, `wdot(re,im)`, `cup`, `cap`, `swap`, `id`, `empty`.
//!
//! Documents hold several terms separated by blank lines; `#` starts a
//! comment running to the end of the line. Printing is canonical:
//! re-parsing printed text and printing again reproduces it verbatim.

use num_complex::Complex64;
use thiserror::Error;

use crate::diagram::{
    cap, cup, empty, fmt_f64_sig, h, id, seq, swap, tensor, triangle, x, z, Diagram, PhaseExpr,
};
use crate::zw::{zw_id, zw_seq, zw_spider, zw_tensor, zw_wdot, ZwDiagram};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DslError {
    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("arity mismatch at {line}:{col}: cannot feed {outputs} wires into {inputs} inputs")]
    Arity {
        line: usize,
        col: usize,
        outputs: usize,
        inputs: usize,
    },
}

fn perr(line: usize, col: usize, message: impl Into<String>) -> DslError {
    DslError::Parse {
        line,
        col,
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Star,
    Plus,
    Minus,
    Slash,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Float(x) => write!(f, "`{x}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Slash => write!(f, "`/`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, first_line: usize) -> Result<(Vec<Spanned>, (usize, usize)), DslError> {
    let mut toks = Vec::new();
    let mut line = first_line;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
            }
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '(' | ')' | '[' | ']' | ',' | ';' | '*' | '+' | '-' | '/' => {
                let tok = match bump(&mut chars) {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    _ => Tok::Slash,
                };
                toks.push(Spanned {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                let mut is_float = false;
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(bump(&mut chars));
                }
                if chars.peek() == Some(&'.') {
                    is_float = true;
                    s.push(bump(&mut chars));
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        s.push(bump(&mut chars));
                    }
                }
                if chars.peek().is_some_and(|&c| c == 'e' || c == 'E') {
                    // accept exponents only when digits (or sign+digits) follow,
                    // so `2e` in a phase still lexes as a coefficient and a name
                    let mut probe = chars.clone();
                    probe.next();
                    let mut exp = String::from("e");
                    if probe.peek().is_some_and(|&c| c == '+' || c == '-') {
                        exp.push(*probe.peek().unwrap());
                        probe.next();
                    }
                    if probe.peek().is_some_and(|c| c.is_ascii_digit()) {
                        is_float = true;
                        for _ in 0..exp.len() {
                            bump(&mut chars);
                        }
                        s.push_str(&exp);
                        while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                            s.push(bump(&mut chars));
                        }
                    }
                }
                let tok = if is_float {
                    Tok::Float(
                        s.parse()
                            .map_err(|_| perr(tline, tcol, format!("bad number `{s}`")))?,
                    )
                } else {
                    Tok::Int(
                        s.parse()
                            .map_err(|_| perr(tline, tcol, format!("number `{s}` is too large")))?,
                    )
                };
                toks.push(Spanned {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while chars
                    .peek()
                    .is_some_and(|&c| c.is_alphanumeric() || c == '_')
                {
                    s.push(bump(&mut chars));
                }
                toks.push(Spanned {
                    tok: Tok::Ident(s),
                    line: tline,
                    col: tcol,
                });
            }
            other => return Err(perr(tline, tcol, format!("unexpected character `{other}`"))),
        }
    }
    Ok((toks, (line, col)))
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str, first_line: usize) -> Result<Self, DslError> {
        let (toks, end) = lex(text, first_line)?;
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> DslError {
        let (line, col) = self.here();
        perr(line, col, message)
    }

    fn expect(&mut self, want: Tok) -> Result<(), DslError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error_here(format!("expected {want}, found {t}"))),
            None => Err(self.error_here(format!("expected {want}, found end of input"))),
        }
    }

    fn expect_usize(&mut self, what: &str) -> Result<usize, DslError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) if n >= 0 => {
                self.pos += 1;
                Ok(n as usize)
            }
            _ => Err(self.error_here(format!("expected a {what} (a natural number)"))),
        }
    }

    fn finish(&self) -> Result<(), DslError> {
        if self.pos < self.toks.len() {
            let t = &self.toks[self.pos];
            Err(perr(
                t.line,
                t.col,
                format!("unexpected trailing {}", t.tok),
            ))
        } else {
            Ok(())
        }
    }

    // -- shared pieces ------------------------------------------------------

    fn wire_counts(&mut self) -> Result<(usize, usize), DslError> {
        self.expect(Tok::LBracket)?;
        let n = self.expect_usize("wire count")?;
        self.expect(Tok::Comma)?;
        let m = self.expect_usize("wire count")?;
        self.expect(Tok::RBracket)?;
        Ok((n, m))
    }

    fn signed_number(&mut self) -> Result<f64, DslError> {
        let sign = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            -1.0
        } else {
            1.0
        };
        match self.next().map(|s| s.tok) {
            Some(Tok::Int(n)) => Ok(sign * n as f64),
            Some(Tok::Float(x)) => Ok(sign * x),
            _ => Err(self.error_here("expected a number")),
        }
    }

    // -- phases -------------------------------------------------------------

    fn phase(&mut self) -> Result<PhaseExpr, DslError> {
        let mut acc = PhaseExpr::zero();
        let mut sign = 1i64;
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            sign = -1;
        }
        loop {
            let term = self.phase_term(sign)?;
            acc = acc.add(&term);
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn phase_term(&mut self, sign: i64) -> Result<PhaseExpr, DslError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Slash) => {
                        self.pos += 1;
                        let den = self.expect_usize("denominator")?;
                        if den == 0 {
                            return Err(self.error_here("denominator cannot be zero"));
                        }
                        match self.next().map(|s| s.tok) {
                            Some(Tok::Ident(w)) if w == "pi" => {
                                Ok(PhaseExpr::pi_rational(sign * n, den as u64))
                            }
                            _ => Err(self.error_here("expected `pi` after a fraction")),
                        }
                    }
                    Some(Tok::Ident(w)) if w == "pi" => {
                        self.pos += 1;
                        if self.peek() == Some(&Tok::Slash) {
                            self.pos += 1;
                            let den = self.expect_usize("denominator")?;
                            if den == 0 {
                                return Err(self.error_here("denominator cannot be zero"));
                            }
                            Ok(PhaseExpr::pi_rational(sign * n, den as u64))
                        } else {
                            Ok(PhaseExpr::pi_rational(sign * n, 1))
                        }
                    }
                    Some(Tok::Ident(w)) if w == "r" => {
                        self.pos += 1;
                        Ok(PhaseExpr::radians(sign as f64 * n as f64))
                    }
                    Some(Tok::Ident(v)) => {
                        self.pos += 1;
                        Ok(PhaseExpr::var_scaled(v, sign * n))
                    }
                    _ if n == 0 => Ok(PhaseExpr::zero()),
                    _ => Err(self.error_here(
                        "a bare number is not an angle; write `pi`, an `r`-suffixed \
                         radian value, or a variable",
                    )),
                }
            }
            Some(Tok::Float(f)) => {
                self.pos += 1;
                match self.next().map(|s| s.tok) {
                    Some(Tok::Ident(w)) if w == "r" => Ok(PhaseExpr::radians(sign as f64 * f)),
                    Some(Tok::Ident(_)) => Err(self.error_here(
                        "phase coefficients must be integers (fractional multiples of a \
                         variable are not expressible)",
                    )),
                    _ => Err(self.error_here("expected `r` after a decimal number")),
                }
            }
            Some(Tok::Ident(w)) if w == "pi" => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let den = self.expect_usize("denominator")?;
                    if den == 0 {
                        return Err(self.error_here("denominator cannot be zero"));
                    }
                    Ok(PhaseExpr::pi_rational(sign, den as u64))
                } else {
                    Ok(PhaseExpr::pi_rational(sign, 1))
                }
            }
            Some(Tok::Ident(w)) if w == "r" => {
                Err(self.error_here("`r` is the radian suffix and cannot name a variable"))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(PhaseExpr::var_scaled(v, sign))
            }
            _ => Err(self.error_here("expected an angle term")),
        }
    }

    // -- phase-spider terms -------------------------------------------------

    fn zx_term(&mut self) -> Result<Diagram, DslError> {
        let mut d = self.zx_tensor()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let (line, col) = self.here();
            let rhs = self.zx_tensor()?;
            let outputs = d.arity().1;
            let inputs = rhs.arity().0;
            d = seq(d, rhs).map_err(|_| DslError::Arity {
                line,
                col,
                outputs,
                inputs,
            })?;
        }
        Ok(d)
    }

    fn zx_tensor(&mut self) -> Result<Diagram, DslError> {
        let mut d = self.zx_atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            d = tensor(d, self.zx_atom()?);
        }
        Ok(d)
    }

    fn zx_atom(&mut self) -> Result<Diagram, DslError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let d = self.zx_term()?;
                self.expect(Tok::RParen)?;
                Ok(d)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "Z" | "X" => {
                        let (n, m) = self.wire_counts()?;
                        let phase = if self.peek() == Some(&Tok::LParen) {
                            self.pos += 1;
                            let p = self.phase()?;
                            self.expect(Tok::RParen)?;
                            p
                        } else {
                            PhaseExpr::zero()
                        };
                        Ok(if name == "Z" {
                            z(n, m, phase)
                        } else {
                            x(n, m, phase)
                        })
                    }
                    "H" => Ok(h()),
                    "T" => Ok(triangle()),
                    "id" => Ok(id()),
                    "swap" => Ok(swap()),
                    "cup" => Ok(cup()),
                    "cap" => Ok(cap()),
                    "empty" => Ok(empty()),
                    other => Err(self.error_here(format!("unknown generator `{other}`"))),
                }
            }
            Some(t) => Err(self.error_here(format!("expected a generator or `(`, found {t}"))),
            None => Err(self.error_here("expected a generator or `(`, found end of input")),
        }
    }

    // -- white-spider terms -------------------------------------------------

    fn zw_term(&mut self) -> Result<ZwDiagram, DslError> {
        let mut d = self.zw_tensor()?;
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            let (line, col) = self.here();
            let rhs = self.zw_tensor()?;
            d = zw_seq(d, rhs).map_err(|e| {
                let crate::zw::ZwError::ArityMismatch { outputs, inputs } = e;
                DslError::Arity {
                    line,
                    col,
                    outputs,
                    inputs,
                }
            })?;
        }
        Ok(d)
    }

    fn zw_tensor(&mut self) -> Result<ZwDiagram, DslError> {
        let mut d = self.zw_atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            d = zw_tensor(d, self.zw_atom()?);
        }
        Ok(d)
    }

    fn complex_pair(&mut self) -> Result<Complex64, DslError> {
        self.expect(Tok::LParen)?;
        let re = self.signed_number()?;
        self.expect(Tok::Comma)?;
        let im = self.signed_number()?;
        self.expect(Tok::RParen)?;
        Ok(Complex64::new(re, im))
    }

    fn zw_atom(&mut self) -> Result<ZwDiagram, DslError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let d = self.zw_term()?;
                self.expect(Tok::RParen)?;
                Ok(d)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "Zw" => {
                        let (n, m) = self.wire_counts()?;
                        let param = self.complex_pair()?;
                        Ok(zw_spider(n, m, param))
                    }
                    "wdot" => Ok(zw_wdot(self.complex_pair()?)),
                    "W11" => Ok(ZwDiagram::W11),
                    "W12" => Ok(ZwDiagram::W12),
                    "fcross" => Ok(ZwDiagram::FermionicCross),
                    "swap" => Ok(ZwDiagram::Swap),
                    "cup" => Ok(ZwDiagram::Cup),
                    "cap" => Ok(ZwDiagram::Cap),
                    "empty" => Ok(ZwDiagram::Empty),
                    "id" => Ok(zw_id()),
                    other => Err(self.error_here(format!("unknown generator `{other}`"))),
                }
            }
            Some(t) => Err(self.error_here(format!("expected a generator or `(`, found {t}"))),
            None => Err(self.error_here("expected a generator or `(`, found end of input")),
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

pub fn parse_zx(text: &str) -> Result<Diagram, DslError> {
    parse_zx_at(text, 1)
}

pub(crate) fn parse_zx_at(text: &str, first_line: usize) -> Result<Diagram, DslError> {
    let mut p = Parser::new(text, first_line)?;
    let d = p.zx_term()?;
    p.finish()?;
    Ok(d)
}

pub fn parse_zw(text: &str) -> Result<ZwDiagram, DslError> {
    parse_zw_at(text, 1)
}

pub(crate) fn parse_zw_at(text: &str, first_line: usize) -> Result<ZwDiagram, DslError> {
    let mut p = Parser::new(text, first_line)?;
    let d = p.zw_term()?;
    p.finish()?;
    Ok(d)
}

/// Split a document into blocks at blank lines (comment-only lines count as
/// blank) and hand each block to the given parser.
fn parse_blocks<T>(
    text: &str,
    parse: impl Fn(&str, usize) -> Result<T, DslError>,
) -> Result<Vec<T>, DslError> {
    let mut out = Vec::new();
    let mut block = String::new();
    let mut block_start = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            if !block.trim().is_empty() {
                out.push(parse(&block, block_start + 1)?);
            }
            block.clear();
        } else {
            if block.trim().is_empty() {
                block_start = idx;
                block.clear();
            }
            block.push_str(raw);
            block.push('\n');
        }
    }
    if !block.trim().is_empty() {
        out.push(parse(&block, block_start + 1)?);
    }
    Ok(out)
}

/// Parse a document of phase-spider terms separated by blank lines.
pub fn parse_zx_document(text: &str) -> Result<Vec<Diagram>, DslError> {
    parse_blocks(text, parse_zx_at)
}

/// Parse a document of white-spider terms separated by blank lines.
pub fn parse_zw_document(text: &str) -> Result<Vec<ZwDiagram>, DslError> {
    parse_blocks(text, parse_zw_at)
}

// ---------------------------------------------------------------------------
// Printers
// ---------------------------------------------------------------------------

/// Canonical text for a phase-spider term; [`parse_zx`] inverts it.
pub fn print_zx(d: &Diagram) -> String {
    let mut s = String::new();
    print_zx_into(d, false, &mut s);
    s
}

fn print_zx_into(d: &Diagram, tensor_ctx: bool, out: &mut String) {
    match d {
        Diagram::Z {
            inputs,
            outputs,
            phase,
        } => print_spider("Z", *inputs, *outputs, phase, out),
        Diagram::X {
            inputs,
            outputs,
            phase,
        } => print_spider("X", *inputs, *outputs, phase, out),
        Diagram::H => out.push('H'),
        Diagram::Id => out.push_str("id"),
        Diagram::Swap => out.push_str("swap"),
        Diagram::Cup => out.push_str("cup"),
        Diagram::Cap => out.push_str("cap"),
        Diagram::Empty => out.push_str("empty"),
        Diagram::Triangle => out.push('T'),
        Diagram::Seq { first, second, .. } => {
            if tensor_ctx {
                out.push('(');
            }
            print_zx_into(first, false, out);
            out.push_str(" ; ");
            print_zx_into(second, false, out);
            if tensor_ctx {
                out.push(')');
            }
        }
        Diagram::Tensor { left, right, .. } => {
            print_zx_into(left, true, out);
            out.push_str(" * ");
            print_zx_into(right, true, out);
        }
    }
}

fn print_spider(color: &str, n: usize, m: usize, phase: &PhaseExpr, out: &mut String) {
    out.push_str(color);
    out.push('[');
    out.push_str(&n.to_string());
    out.push(',');
    out.push_str(&m.to_string());
    out.push(']');
    if *phase != PhaseExpr::zero() {
        out.push('(');
        out.push_str(&phase.to_string());
        out.push(')');
    }
}

/// Canonical text for a white-spider term; [`parse_zw`] inverts it.
pub fn print_zw(d: &ZwDiagram) -> String {
    let mut s = String::new();
    print_zw_into(d, false, &mut s);
    s
}

fn print_zw_into(d: &ZwDiagram, tensor_ctx: bool, out: &mut String) {
    match d {
        ZwDiagram::ZSpider {
            inputs,
            outputs,
            param,
        } => {
            if *inputs == 1 && *outputs == 1 && *param == Complex64::new(1.0, 0.0) {
                out.push_str("id");
            } else {
                out.push_str("Zw[");
                out.push_str(&inputs.to_string());
                out.push(',');
                out.push_str(&outputs.to_string());
                out.push(']');
                print_complex_pair(*param, out);
            }
        }
        ZwDiagram::W11 => out.push_str("W11"),
        ZwDiagram::W12 => out.push_str("W12"),
        ZwDiagram::Swap => out.push_str("swap"),
        ZwDiagram::FermionicCross => out.push_str("fcross"),
        ZwDiagram::Cup => out.push_str("cup"),
        ZwDiagram::Cap => out.push_str("cap"),
        ZwDiagram::Empty => out.push_str("empty"),
        ZwDiagram::WhiteDotScalar { param } => {
            out.push_str("wdot");
            print_complex_pair(*param, out);
        }
        ZwDiagram::Seq { first, second, .. } => {
            if tensor_ctx {
                out.push('(');
            }
            print_zw_into(first, false, out);
            out.push_str(" ; ");
            print_zw_into(second, false, out);
            if tensor_ctx {
                out.push(')');
            }
        }
        ZwDiagram::Tensor { left, right, .. } => {
            print_zw_into(left, true, out);
            out.push_str(" * ");
            print_zw_into(right, true, out);
        }
    }
}

fn print_complex_pair(v: Complex64, out: &mut String) {
    out.push('(');
    out.push_str(&fmt_f64_sig(v.re));
    out.push(',');
    out.push_str(&fmt_f64_sig(v.im));
    out.push(')');
}
