//! Build a lattice in code, validate it, and round-trip it through JSON.

use quador_fillet::algebra::Vec3;
use quador_fillet::io::{lattice_to_json, parse_lattice};
use quador_fillet::lattice::{validate_lattice, Beam, FilletSpec, Hub, Lattice};

fn main() {
    let mut lattice = Lattice {
        hubs: vec![
            Hub::new("c", Vec3::ZERO, 1.0),
            Hub::new("e", Vec3::new(4.0, 0.0, 0.0), 1.0),
            Hub::new("n", Vec3::new(0.0, 4.0, 0.0), 1.0),
        ],
        beams: vec![Beam::new("ce", "c", "e", 4.0), Beam::new("cn", "c", "n", 4.0)],
        fillets: vec![FilletSpec::new("c", "ce", "cn", 1.0)],
    };
    let report = validate_lattice(&lattice);
    println!("clean: {} ({} entries)", report.is_clean(), report.entries.len());

    let json = lattice_to_json(&lattice);
    let back = parse_lattice(&json).expect("round trip");
    assert_eq!(back, lattice);
    println!("{json}");

    lattice.beams[1].k = 0.0;
    lattice.fillets.push(FilletSpec::new("e", "ce", "cn", -1.0));
    println!("broken lattice:\n{}", validate_lattice(&lattice));

    match parse_lattice(r#"{"hubs": [{"id": "a", "center": [0, 0], "radius": 1}], "beams": []}"#) {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error: {e}"),
    }
}
