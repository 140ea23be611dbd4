//! Build small diagrams and evaluate them on both numeric backends.
//!
//! Run with `cargo run --example interp_basics`.

use zxcheck::diagram::{h, seq, swap, tensor, z, PhaseExpr};
use zxcheck::dsl::{parse_zx_document, print_zx};
use zxcheck::semantics::{interp_exact, interp_float};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A CNOT built from generators: Z-copy on the control, X-merge on the target.
    let cnot = seq(
        tensor(z(1, 2, PhaseExpr::zero()), zxcheck::diagram::id()),
        tensor(zxcheck::diagram::id(), zxcheck::diagram::x(2, 1, PhaseExpr::zero())),
    )?;
    println!("term: {}", print_zx(&cnot));
    println!("exact:\n{}", interp_exact(&cnot)?);
    println!("float:\n{}", interp_float(&cnot)?);

    // The same construction straight from the term language.
    let parsed = parse_zx_document("(Z[1,2](0) * id) ; (id * X[2,1](0))")?;
    assert_eq!(print_zx(&parsed[0]), print_zx(&cnot));

    // Phases outside the dyadic-rational family only exist on the float backend.
    let rotated = seq(h(), z(1, 1, PhaseExpr::radians(1.234)))?;
    println!("float-only term: {}", print_zx(&rotated));
    println!("{}", interp_float(&rotated)?);

    // Swapping wires is its own inverse; the exact backend proves it.
    let double_swap = seq(swap(), swap())?;
    let id2 = zxcheck::diagram::id_wires(2);
    assert!(interp_exact(&double_swap)?.try_eq(&interp_exact(&id2)?)?);
    println!("swap ; swap = id ⊗ id (exact)");
    Ok(())
}
