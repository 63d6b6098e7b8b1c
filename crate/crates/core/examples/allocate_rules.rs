//! Allocates one endowment under each bundled rule for a named ranking.

use prizealloc::model::Competition;
use prizealloc::rules::{allocate, bundled};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let comp = Competition::from_parts(&["ana", "ben", "cho", "dev"], &[2, 1, 4, 3], 6.0)?;
    println!(
        "ranking {:?}, E = 6",
        comp.ranking()
            .order()
            .iter()
            .map(|c| c.as_str())
            .collect::<Vec<_>>()
    );
    for (label, rule) in bundled() {
        let alloc = allocate(&rule, &comp)?;
        let shown: Vec<String> = alloc
            .entries()
            .iter()
            .map(|(id, p)| format!("{id}={p:.3}"))
            .collect();
        println!("{label:>18}  {}", shown.join("  "));
    }
    Ok(())
}
