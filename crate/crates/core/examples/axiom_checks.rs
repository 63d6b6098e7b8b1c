//! Checks single axioms and shows the shrunken witness of a failure.

use prizealloc::axioms::{
    check, check_lipschitz_after, Axiom, ConsistencyMode, MonotonicityMode, SampleBudget,
};
use prizealloc::rules::RuleSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = SampleBudget::default();
    let geometric = RuleSpec::geometric(0.5)?;

    let top = check(
        &geometric,
        Axiom::Consistency(ConsistencyMode::Top),
        &budget,
    )?;
    println!("{top}");
    let full = check(
        &geometric,
        Axiom::Consistency(ConsistencyMode::Full),
        &budget,
    )?;
    println!("{full}");
    if let Some(w) = full.witness() {
        println!("re-verified: {}", w.reverify(&geometric, budget.tolerance)?);
    }

    // Lipschitz continuity is only checked once weak monotonicity holds.
    let arithmetic = RuleSpec::arithmetic();
    let mono = check(
        &arithmetic,
        Axiom::EndowmentMonotonicity(MonotonicityMode::Weak),
        &budget,
    )?;
    println!("{}", check_lipschitz_after(&arithmetic, &budget, &mono)?);
    Ok(())
}
