//! A pair of scalar terms no sound π/4-fragment rule set can relate.
//!
//! The two terms have equal standard interpretations, yet a rescaled
//! interpretation (generator matrices multiplied by an odd scalar K per
//! spider) keeps every rule of the Clifford+T set sound while separating the
//! pair — so no derivation using those rules can connect them.

use zxcheck::rules::{check_soundness, clifford_t_rules, extended_rules, separation_table, CheckOptions, Functor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for row in separation_table()? {
        println!(
            "{:<10} lhs = {:>4}   rhs = {:>4}   equal = {}",
            row.functor.to_string(),
            row.lhs.to_string(),
            row.rhs.to_string(),
            row.equal,
        );
    }

    // The rescaled functor preserves every unconstrained rule …
    let scaled = Functor::scaled(9)?;
    let opts = CheckOptions { budget: 100, seed: 20220919 };
    let clifford = check_soundness(&clifford_t_rules(), scaled, &opts)?;
    assert!(clifford.iter().all(|r| r.sound));
    println!("\nall {} Clifford+T rules stay sound under scaled:9", clifford.len());

    // … but not the constrained A rule, which pins the scale down.
    let extended = check_soundness(&extended_rules(), scaled, &opts)?;
    let a = extended.iter().find(|r| r.rule == "A").unwrap();
    println!("A under scaled:9: sound = {}", a.sound);
    if let Some(cx) = &a.counterexample {
        println!("  counterexample discrepancy: {:.3e}", cx.discrepancy);
    }
    Ok(())
}
