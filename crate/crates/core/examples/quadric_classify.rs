//! Classify a handful of quadrics and print their canonical frames.

use quador_fillet::algebra::{classify_quadric, Quadric, DEFAULT_CLASSIFY_TOL};

fn main() {
    let samples: [(&str, [f64; 10]); 5] = [
        // [a11, a22, a33, a12, a13, a23, b1, b2, b3, c]
        ("unit sphere", [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        ("cylinder", [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        ("cone", [1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ("saddle", [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5, 0.0]),
        ("slab", [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
    ];
    for (name, k) in samples {
        let q = Quadric::from_coefficients(k);
        let class = classify_quadric(&q, DEFAULT_CLASSIFY_TOL).expect("finite input");
        println!(
            "{name:<12} {:<22} diag {:?} centre {} const {:.3}",
            class.kind, class.diagonal, class.translation, class.constant
        );
    }
}
