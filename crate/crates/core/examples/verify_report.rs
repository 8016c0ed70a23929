//! Run the invariant checks on a lattice and print a summary table.

use quador_fillet::io::load_lattice;
use quador_fillet::verify::{verify_lattice, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures/two_beam_beta1.json".into());
    let lattice = load_lattice(&std::fs::read(&path)?)?;
    let report = verify_lattice(&lattice, &VerifyOptions { samples: 2000, ..Default::default() });
    for c in &report.checks {
        let measured = c.measured.map_or("-".into(), |m| format!("{m:.2e}"));
        println!("{:<34} {:<5} {measured:>10}  {}", c.name, format!("{:?}", c.status).to_lowercase(), c.detail);
    }
    println!("pass {} fail {} warn {}", report.summary.pass, report.summary.fail, report.summary.warn);
    Ok(())
}
