//! Deciding equations that hold *for all* angle parameters.
//!
//! A diagram linear in its variables (π/4-fragment constants, each variable
//! appearing with coefficient ±1) is determined by finitely many evaluations:
//! μ+1 grid points per variable, where μ counts the variable's occurrences.
//! The projector route reaches the same verdict through the symmetric
//! subspace instead of pointwise evaluation — `Method::Both` runs the two and
//! insists they agree.

use zxcheck::diagram::{seq, z, PhaseExpr};
use zxcheck::projector::{decide_forall, Method};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Phase fusion: Z(a) ; Z(b) = Z(a+b) — here in the one-occurrence form
    // Z(a) ; Z(a) vs the explicitly fused spider is *not* linear (a appears
    // with coefficient 2 after fusion), so stick to distinct variables.
    let lhs = seq(z(1, 1, PhaseExpr::var("a")), z(1, 1, PhaseExpr::var("b")))?;
    let rhs = seq(z(1, 1, PhaseExpr::var("b")), z(1, 1, PhaseExpr::var("a")))?;
    let verdict = decide_forall(&lhs, &rhs, Method::Both)?;
    println!("Z(a);Z(b) = Z(b);Z(a): holds = {}", verdict.holds);
    for (var, mu) in &verdict.mu {
        println!("  μ_{var} = {mu}");
    }

    // The classic trap: Z(a) and Z(-a) agree at 0 and π but nowhere else.
    // Pointwise spot checks at those angles would pass; the grid has three
    // points because μ_a = 2, and the middle one separates the sides.
    let lhs = z(1, 1, PhaseExpr::var("a"));
    let rhs = z(1, 1, PhaseExpr::var("a").neg());
    let verdict = decide_forall(&lhs, &rhs, Method::Both)?;
    println!("Z(a) = Z(-a): holds = {}", verdict.holds);
    if let Some(w) = &verdict.witness {
        for (var, angle) in &w.assignment {
            println!("  witness {var} = {}", PhaseExpr::from_angle(*angle));
        }
        println!("  |difference| at witness = {:.3e}", w.discrepancy);
    }
    Ok(())
}
