//! Sweep the fillet parameter for two perpendicular beams on a unit hub.

use quador_fillet::algebra::{classify_quadric, Vec3, DEFAULT_CLASSIFY_TOL};
use quador_fillet::fillet::{build_fillet, fillet_min_curvature_radius};
use quador_fillet::lattice::{stub_views_at_hub, Beam, Hub, Lattice};

fn main() {
    let lattice = Lattice {
        hubs: vec![
            Hub::new("h0", Vec3::ZERO, 1.0),
            Hub::new("h1", Vec3::new(4.0, 0.0, 0.0), 1.0),
            Hub::new("h2", Vec3::new(0.0, 4.0, 0.0), 1.0),
        ],
        beams: vec![Beam::new("b0", "h0", "h1", 4.0), Beam::new("b1", "h0", "h2", 4.0)],
        fillets: Vec::new(),
    };
    let stubs = stub_views_at_hub(&lattice, "h0").unwrap();
    println!("{:>6} {:>22} {:>10} {:>10} {:>10}", "beta", "class", "extent", "min R", "identity");
    for beta in [0.5, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0] {
        let p = build_fillet(&stubs[0], &stubs[1], beta).unwrap();
        let kind = classify_quadric(&p.q, DEFAULT_CLASSIFY_TOL).unwrap().kind;
        let extent = p.extent.value().map_or("inf".into(), |e| format!("{e:.6}"));
        let radius = fillet_min_curvature_radius(&p).unwrap();
        println!("{beta:>6} {:>22} {extent:>10} {radius:>10.4} {:>10.1e}", kind.to_string(), p.identity_deviation());
    }
}
