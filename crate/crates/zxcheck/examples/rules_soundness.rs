//! Checking a rewrite-rule set against the matrix semantics.
//!
//! Unconstrained rules are decided for *all* parameter values via the grid;
//! rules with a side condition (the A rule's angle constraint) are checked on
//! sampled satisfying assignments instead, and the report says which method
//! was used for each rule.

use zxcheck::rules::{
    check_soundness, extended_rules, falsify_constraint_a, CheckOptions, Functor,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rules = extended_rules();
    let opts = CheckOptions { budget: 200, seed: 20220919 };
    let reports = check_soundness(&rules, Functor::Std, &opts)?;
    for report in &reports {
        println!(
            "{:<4} {}  [{}, {}]",
            report.rule,
            if report.sound { "sound" } else { "UNSOUND" },
            report.method,
            report.functor,
        );
    }
    assert!(reports.iter().all(|r| r.sound));

    // The constrained rule really needs its constraint: assignments violating
    // it by a margin make the two sides differ, every time.
    let a = rules.iter().find(|r| r.name == "A").expect("A is in the set");
    let falsification = falsify_constraint_a(a, 500, 7)?;
    println!(
        "\nA without its constraint: {} violating samples, {} undetected, min gap {:.3e}",
        falsification.samples, falsification.undetected, falsification.min_gap,
    );
    Ok(())
}
