//! Traces the allocation path of the arithmetic rule and prints it as CSV.

use prizealloc::io::format_number;
use prizealloc::rules::RuleSpec;
use prizealloc::solver::trace_path;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let trace = trace_path(&RuleSpec::arithmetic(), n, 6.0, 0.5)?;
    let header: Vec<String> = (1..=n).map(|i| format!("prize_{i}")).collect();
    println!("endowment,{}", header.join(","));
    for (e, alloc) in &trace.samples {
        let cells: Vec<String> = alloc
            .by_position()
            .iter()
            .map(|p| format_number(*p))
            .collect();
        println!("{},{}", format_number(*e), cells.join(","));
    }
    Ok(())
}
