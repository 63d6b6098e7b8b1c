//! Fits the bundled poker and golf prize tables and classifies them.

use std::path::Path;

use prizealloc::analysis::{classify, fit_geometric, fit_proportional, Tolerances};
use prizealloc::io::{load_prize_data, DataFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tol = Tolerances::default();
    let poker = load_prize_data(Path::new("wcoop2019.json"), DataFormat::Json, None)?;
    println!("{}", fit_geometric(&poker.events[0], tol.tau_fit)?);
    println!("tier: {}\n", classify(&poker, &tol)?.tier);

    let golf = load_prize_data(Path::new("pga2019.json"), DataFormat::Json, None)?;
    for event in &golf.events {
        println!("{}: {}", event.name, fit_geometric(event, tol.tau_fit)?);
    }
    println!("{}", fit_proportional(&golf, &tol)?);
    println!("tier: {}", classify(&golf, &tol)?.tier);
    Ok(())
}
