//! Classify points against a lattice with and without its fillet.

use quador_fillet::algebra::Vec3;
use quador_fillet::io::load_lattice;
use quador_fillet::solid::{build_assembly, classify_point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures/two_beam_beta1.json".into());
    let lattice = load_lattice(&std::fs::read(&path)?)?;
    let with = build_assembly(&lattice)?;
    let without = build_assembly(&lattice.without_fillets())?;
    let points = [Vec3::ZERO, Vec3::new(1.05, 1.05, 0.0), Vec3::new(0.9, 0.9, 0.3), Vec3::new(2.0, 0.0, 0.0), Vec3::new(3.0, 3.0, 3.0)];
    for x in points {
        let a = classify_point(&without, x, 1e-9);
        let b = classify_point(&with, x, 1e-9);
        println!("{x}: bare {} {} ({:.4}) | filleted {} {} ({:.4})", a.state, a.label, a.value, b.state, b.label, b.value);
    }
    Ok(())
}
