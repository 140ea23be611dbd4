//! Translating between the two generator languages and back.

use num_complex::Complex64;
use zxcheck::diagram::{seq, tensor, x, z, PhaseExpr};
use zxcheck::dsl::{print_zw, print_zx};
use zxcheck::semantics::interp_float;
use zxcheck::zw::{decompose, interp_zw_float, roundtrip_check, to_zw};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = seq(
        tensor(z(1, 2, PhaseExpr::pi_rational(1, 4)), zxcheck::diagram::id()),
        tensor(zxcheck::diagram::id(), x(2, 1, PhaseExpr::zero())),
    )?;
    println!("source:     {}", print_zx(&d));

    let image = to_zw(&d);
    println!("translated: {}", print_zw(&image));

    let dev = interp_float(&d)?
        .max_abs_diff(&interp_zw_float(&image))
        .expect("translation preserves arity");
    println!("max |Δ| between interpretations: {dev:.3e}");

    let verdict = roundtrip_check(&d)?;
    println!(
        "round trip holds: {} (exact: {})",
        verdict.holds, verdict.exact
    );

    // Every complex number factors as 2ⁿ·cos(β)·e^{iθ} with n ∈ ℕ,
    // β ∈ [0, π/2], θ ∈ [0, 2π) — the normal form scalar translations use.
    for value in [Complex64::new(3.0, -4.0), Complex64::new(-0.01, 0.0)] {
        let parts = decompose(value);
        println!(
            "{value} = 2^{} · cos({:.6}) · e^(i·{:.6})   (error {:.1e})",
            parts.n,
            parts.beta,
            parts.theta,
            (parts.reconstruct() - value).norm(),
        );
    }
    Ok(())
}
