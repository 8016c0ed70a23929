//! Mesh a lattice with marching cubes and write a binary STL.

use std::time::Instant;

use quador_fillet::io::{load_lattice, write_stl};
use quador_fillet::solid::{auto_bounds, build_assembly, marching_cubes};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "crates/core/fixtures/two_beam_beta1.json".into());
    let n: usize = args.next().map_or(Ok(64), |s| s.parse())?;
    let assembly = build_assembly(&load_lattice(&std::fs::read(&path)?)?)?;
    let bounds = auto_bounds(&assembly, 0.1);
    let start = Instant::now();
    let mesh = marching_cubes(&assembly, bounds, [n; 3])?;
    println!(
        "{} triangles, {} vertices in {:.2?}; watertight {}, volume {:.4}",
        mesh.triangles.len(),
        mesh.vertices.len(),
        start.elapsed(),
        mesh.is_watertight(),
        mesh.signed_volume()
    );
    let out = std::env::temp_dir().join("lattice.stl");
    write_stl(&mesh, std::io::BufWriter::new(std::fs::File::create(&out)?))?;
    println!("wrote {}", out.display());
    Ok(())
}
