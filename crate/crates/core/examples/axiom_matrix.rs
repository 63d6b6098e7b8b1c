//! Runs every axiom checker over the bundled rules and prints the matrix.

use prizealloc::axioms::{run_axiom_matrix, SampleBudget};
use prizealloc::rules::bundled;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = SampleBudget::default();
    let matrix = run_axiom_matrix(&bundled(), &budget)?;
    print!("{}", matrix.render());
    for (_, verdicts) in &matrix.rows {
        for v in verdicts.iter().filter(|v| v.failed()) {
            println!("\n{v}");
        }
    }
    Ok(())
}
