//! Build the quador joining two hubs and show its radius along the axis.

use quador_fillet::algebra::Vec3;
use quador_fillet::lattice::{beam_quador, Hub};

fn main() {
    let a = Hub::new("a", Vec3::ZERO, 1.0);
    let b = Hub::new("b", Vec3::new(4.0, 0.0, 0.0), 2.0);
    for k in [3.0, 4.0, 8.0] {
        println!("k = {k}");
        let q = match beam_quador(&a, &b, k) {
            Ok(q) => q,
            Err(e) => {
                println!("  rejected: {e}");
                continue;
            }
        };
        println!("  H coefficients {:?}", q.h.coefficients());
        println!("  stub planes {:?} / {:?}", q.g_a, q.g_b);
        for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
            match q.radius(s) {
                Some(r) => println!("  s = {s:.2}  radius {r:.4}"),
                None => println!("  s = {s:.2}  empty cross-section"),
            }
        }
    }
}
