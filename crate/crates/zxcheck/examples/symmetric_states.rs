//! Substituting symmetric states for the canonical θ_r premise.
//!
//! If two diagrams agree when fed θ_r(α) for a fresh α, they agree when fed
//! *any* symmetric state on those wires. `check_symmetric_substitution`
//! verifies both halves: the θ_r premise (decided for all α) and the
//! conclusion at the supplied state.

use zxcheck::diagram::{seq, tensor_many, z, PhaseExpr};
use zxcheck::paramlin::theta;
use zxcheck::projector::{check_symmetric_substitution, is_symmetric};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two presentations of the same 2-input map.
    let d1 = z(2, 1, PhaseExpr::pi_rational(1, 4));
    let d2 = seq(z(2, 1, PhaseExpr::zero()), z(1, 1, PhaseExpr::pi_rational(1, 4)))?;

    // A product of identical single-wire states is symmetric; θ_2 is too.
    let product = tensor_many((0..2).map(|_| z(0, 1, PhaseExpr::pi_rational(3, 4))));
    let theta_state = theta(2, PhaseExpr::pi_rational(1, 2));
    for state in [&product, &theta_state] {
        assert!(is_symmetric(state)?);
        let check = check_symmetric_substitution(&d1, &d2, state)?;
        println!(
            "premise holds: {}   conclusion at the state: {}",
            check.premise.holds, check.conclusion_holds,
        );
    }

    // Distinct tensor factors break the symmetry and are rejected up front.
    let lopsided = tensor_many([
        z(0, 1, PhaseExpr::pi_rational(1, 4)),
        z(0, 1, PhaseExpr::pi_rational(5, 4)),
    ]);
    println!("lopsided state symmetric: {}", is_symmetric(&lopsided)?);
    match check_symmetric_substitution(&d1, &d2, &lopsided) {
        Err(e) => println!("substitution refused: {e}"),
        Ok(_) => unreachable!("asymmetric states must be rejected"),
    }
    Ok(())
}
