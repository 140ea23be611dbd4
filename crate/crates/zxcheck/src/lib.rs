//! Exact verification toolkit for ZX- and ZW-diagrammatic linear algebra.
//!
//! The crate is organized around a small number of layers:
//!
//! - [`exactnum`] — arithmetic in cyclotomic fields ℚ(ζ_N) and exact matrices,
//!   so that every rational-π phase evaluates without rounding.
//! - [`diagram`] — the ZX term language: spiders, structural generators, a
//!   triangle generator, and symbolic phases that are affine in named angle
//!   variables.
//! - [`semantics`] — matrix interpretation of ground diagrams, with exact and
//!   floating-point backends plus a phase-scaling reinterpretation.
//! - [`paramlin`] — occurrence counting for angle variables and the rewrite
//!   that pulls a variable out of a diagram onto explicit phase wires.
//! - [`projector`] — finite decision procedures (angle grids and symmetric
//!   projectors) for universally quantified diagram equations.
//! - [`zw`] — a second, white-node generator set with complex parameters,
//!   translations in both directions, and parameter decomposition.
//! - [`rules`] — rewrite rules loaded from text files, soundness checking
//!   under standard and phase-scaled semantics, and a separating example the
//!   scaled functor detects.
//! - [`dsl`] — the textual syntax shared by rule files, documents, and the
//!   command line.
//! - [`cli`] — the `zxcheck` command-line surface.
//!
//! Most capabilities are demonstrated end to end in `examples/`.

pub mod cli;
pub mod diagram;
pub mod dsl;
pub mod exactnum;
pub mod paramlin;
pub mod projector;
pub mod rules;
pub mod sample;
pub mod semantics;
pub mod zw;

pub use diagram::{Diagram, PhaseExpr};
pub use exactnum::{Cyclotomic, ExactMatrix};
