use super::vec3::{Mat3, Vec3};

const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-14;

/// Eigen-decomposition `A = V Λ Vᵀ` of a symmetric 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricEigen {
    /// Sorted descending.
    pub values: [f64; 3],
    /// Columns are unit eigenvectors matching `values`.
    pub vectors: Mat3,
}

impl SymmetricEigen {
    pub fn vector(&self, i: usize) -> Vec3 {
        self.vectors.column(i)
    }

    pub fn reconstruct(&self) -> Mat3 {
        let v = &self.vectors;
        v.mul_mat(&Mat3::diagonal(self.values)).mul_mat(&v.transpose())
    }
}

/// Cyclic Jacobi rotations on a symmetric 3×3 matrix.
///
/// Sweeps stop once the off-diagonal Frobenius mass drops below
/// `1e-14·‖A‖_F` or after 30 sweeps. Eigenvalues come back sorted
/// descending. The first two eigenvector columns are signed so that their
/// largest-magnitude component is positive; the third is their cross
/// product, so `V` is a proper rotation.
pub fn jacobi_eigen3(a: &Mat3) -> SymmetricEigen {
    let mut m = a.symmetrized().0;
    let mut v = Mat3::IDENTITY.0;
    let norm = a.frobenius_norm();
    let threshold = OFF_DIAGONAL_THRESHOLD * norm;

    for _ in 0..MAX_SWEEPS {
        let off = (2.0 * (m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2))).sqrt();
        if off <= threshold {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[p][q] == 0.0 {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            rotate(&mut m, &mut v, p, q, c, s);
        }
    }

    let mut order = [0usize, 1, 2];
    // stable sort keeps equal eigenvalues in index order
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = [m[order[0]][order[0]], m[order[1]][order[1]], m[order[2]][order[2]]];
    let vm = Mat3(v);
    let c0 = sign_fixed(vm.column(order[0]));
    let c1 = sign_fixed(vm.column(order[1]));
    let c2 = c0.cross(c1);
    SymmetricEigen { values, vectors: Mat3::from_columns(c0, c1, c2) }
}

fn rotate(m: &mut [[f64; 3]; 3], v: &mut [[f64; 3]; 3], p: usize, q: usize, c: f64, s: f64) {
    // A ← Jᵀ A J with J the Givens rotation in the (p, q) plane
    for k in 0..3 {
        let mkp = m[k][p];
        let mkq = m[k][q];
        m[k][p] = c * mkp - s * mkq;
        m[k][q] = s * mkp + c * mkq;
    }
    for k in 0..3 {
        let mpk = m[p][k];
        let mqk = m[q][k];
        m[p][k] = c * mpk - s * mqk;
        m[q][k] = s * mpk + c * mqk;
    }
    m[p][q] = 0.0;
    m[q][p] = 0.0;
    for row in v.iter_mut() {
        let vp = row[p];
        let vq = row[q];
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

fn sign_fixed(v: Vec3) -> Vec3 {
    let mut idx = 0;
    for i in 1..3 {
        if v[i].abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        -v
    } else {
        v
    }
}

/// Eigenvalues and rotation angle of the symmetric 2×2 matrix `[[a, b], [b, c]]`.
///
/// Returns `(λ₁, λ₂, θ)` with `λ₁ ≥ λ₂`; the eigenvector of `λ₁` is
/// `(cos θ, sin θ)`.
pub fn symmetric_eigen2(a: f64, b: f64, c: f64) -> (f64, f64, f64) {
    let half_trace = 0.5 * (a + c);
    let half_diff = 0.5 * (a - c);
    let radius = half_diff.hypot(b);
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    (half_trace + radius, half_trace - radius, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Real roots of the characteristic polynomial by the trigonometric
    /// cubic formula, sorted descending.
    fn characteristic_roots(a: &Mat3) -> [f64; 3] {
        let m = &a.0;
        let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
        let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        if p == 0.0 {
            return [q, q, q];
        }
        let bm = a.sub(&Mat3::IDENTITY.scale(q)).scale(1.0 / p);
        let r = (bm.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [e1, 3.0 * q - e1 - e3, e3]
    }

    fn check_decomposition(a: &Mat3) {
        let e = jacobi_eigen3(a);
        let vtv = e.vectors.transpose().mul_mat(&e.vectors);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vtv.0[i][j] - want).abs() <= 1e-12);
            }
        }
        let err = e.reconstruct().sub(a).frobenius_norm();
        assert!(err <= 1e-12 * a.frobenius_norm().max(1e-300), "reconstruction {err}");
        assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
        assert!(e.vectors.determinant() > 0.0);
    }

    #[test]
    fn identity() {
        let e = jacobi_eigen3(&Mat3::IDENTITY);
        assert_eq!(e.values, [1.0, 1.0, 1.0]);
        check_decomposition(&Mat3::IDENTITY);
    }

    #[test]
    fn cylinder_form() {
        let a = Mat3::diagonal([1.0, 1.0, 0.0]);
        let e = jacobi_eigen3(&a);
        assert_eq!(e.values, [1.0, 1.0, 0.0]);
        assert_eq!(e.vector(2).z.abs(), 1.0);
    }

    #[test]
    fn fillet_matrix_matches_cubic_roots() {
        let a = Mat3([
            [-9.0 / 16.0, 15.0 / 16.0, 0.0],
            [15.0 / 16.0, 1.0 - 25.0 / 16.0, 0.0],
            [0.0, 0.0, 1.0],
        ]);
        let e = jacobi_eigen3(&a);
        let roots = characteristic_roots(&a);
        for (got, want) in e.values.iter().zip(roots) {
            assert_relative_eq!(*got, want, epsilon = 1e-13);
        }
        // the xy block has eigenvalues −9/16 ± 15/16
        assert_relative_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 0.375, epsilon = 1e-14);
        assert_relative_eq!(e.values[2], -1.5, epsilon = 1e-14);
        check_decomposition(&a);
    }

    #[test]
    fn general_symmetric_matrices() {
        let mats = [
            Mat3([[4.0, 1.0, -2.0], [1.0, 2.0, 0.0], [-2.0, 0.0, 3.0]]),
            Mat3([[1e-3, 5.0, 5.0], [5.0, 1e-3, 5.0], [5.0, 5.0, 1e-3]]),
            Mat3([[2.0, 1e-9, 0.0], [1e-9, 2.0, 0.0], [0.0, 0.0, 2.0]]),
            Mat3([[0.0; 3]; 3]),
        ];
        for a in &mats {
            check_decomposition(a);
            let e = jacobi_eigen3(a);
            for (got, want) in e.values.iter().zip(characteristic_roots(a)) {
                assert!((got - want).abs() <= 1e-9 * a.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn eigen2() {
        let (l1, l2, th) = symmetric_eigen2(1.0, 0.0, 1.0);
        assert_eq!((l1, l2, th), (1.0, 1.0, 0.0));
        let (l1, l2, th) = symmetric_eigen2(0.0, 1.0, 0.0);
        assert_relative_eq!(l1, 1.0);
        assert_relative_eq!(l2, -1.0);
        assert_relative_eq!(th, std::f64::consts::FRAC_PI_4);
    }
}
