//! Sample both tangency conics of a fillet and write them as OBJ polylines.

use quador_fillet::fillet::build_fillet;
use quador_fillet::io::{load_lattice, write_obj_polylines, Polyline};
use quador_fillet::lattice::stub_views_at_hub;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures/two_beam_beta1.json".into());
    let lattice = load_lattice(&std::fs::read(&path)?)?;
    let spec = lattice.fillets.first().ok_or("lattice has no fillets")?;
    let stubs = stub_views_at_hub(&lattice, &spec.hub)?;
    let pick = |id: &str| stubs.iter().find(|s| s.beam == id).ok_or("beam not at hub");
    let patch = build_fillet(pick(&spec.beam_i)?, pick(&spec.beam_j)?, spec.beta)?;

    let mut lines = Vec::new();
    for (i, conic) in [&patch.conic1, &patch.conic2].into_iter().enumerate() {
        let samples = conic.sample(64)?;
        println!("conic {}: {} with {} branch(es)", i + 1, conic.kind, samples.branches.len());
        for branch in samples.branches {
            lines.push(Polyline { comments: vec![format!("conic {} {}", i + 1, conic.kind)], points: branch, closed: samples.closed });
        }
    }
    let out = std::env::temp_dir().join("fillet_conics.obj");
    write_obj_polylines(&lines, std::fs::File::create(&out)?)?;
    println!("wrote {}", out.display());
    Ok(())
}
