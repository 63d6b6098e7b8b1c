//! Prints allocation tables for the unit-step, winner-takes-some,
//! arithmetic, late-dollar and hyperarithmetic rules, n = 2..4.

use prizealloc::io::format_number;
use prizealloc::rules::{prizes_by_position, CounterexampleRule, RuleSpec};
use prizealloc::solver::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tables = [
        ("unit-step", RuleSpec::unit_step(), 6),
        ("wts(1)", RuleSpec::Wts(1.0), 6),
        ("arithmetic", RuleSpec::arithmetic(), 8),
        (
            "late-dollar",
            RuleSpec::Counterexample(CounterexampleRule::LateDollar),
            8,
        ),
        ("hyperarithmetic", RuleSpec::hyperarithmetic(), 8),
    ];
    let cfg = SolverConfig::default();
    for (name, rule, e_max) in tables {
        println!("== {name}");
        for n in 2..=4 {
            let rows: Vec<String> = (1..=e_max)
                .map(|e| {
                    let prizes = prizes_by_position(&rule, n, e as f64, &cfg)?;
                    let cells: Vec<String> = prizes.iter().map(|p| format_number(*p)).collect();
                    Ok(format!("({})", cells.join(", ")))
                })
                .collect::<Result<_, prizealloc::rules::RuleError>>()?;
            println!("n={n}: {}", rows.join(" "));
        }
    }
    Ok(())
}
