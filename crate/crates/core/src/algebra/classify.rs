//! Canonical forms of quadrics.
//!
//! Every quadric is rewritten in an orthonormal frame `x = t + R y` as
//!
//! ```text
//! Q = Σ λᵢ yᵢ² + 2μ y_k + κ
//! ```
//!
//! where `k` is a null axis of `A` (only present when `μ ≠ 0`) and at most
//! one of `μ`, `κ` is non-zero. The signs and ranks of `(λ, μ, κ)` give the
//! affine class.

use std::fmt;

use super::eigen::jacobi_eigen3;
use super::forms::Quadric;
use super::vec3::{Mat3, Vec3};
use super::AlgebraError;

/// Default relative rank tolerance.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Coefficients with magnitude below this are treated as absent.
const ABSOLUTE_ZERO: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuadricKind {
    Ellipsoid,
    HyperboloidOneSheet,
    HyperboloidTwoSheets,
    EllipticParaboloid,
    HyperbolicParaboloid,
    EllipticCylinder,
    HyperbolicCylinder,
    ParabolicCylinder,
    Cone,
    ParallelPlanes,
    CrossingPlanes,
    SinglePlane,
    Line,
    Point,
    Empty,
}

impl QuadricKind {
    pub const ALL: [QuadricKind; 15] = [
        QuadricKind::Ellipsoid,
        QuadricKind::HyperboloidOneSheet,
        QuadricKind::HyperboloidTwoSheets,
        QuadricKind::EllipticParaboloid,
        QuadricKind::HyperbolicParaboloid,
        QuadricKind::EllipticCylinder,
        QuadricKind::HyperbolicCylinder,
        QuadricKind::ParabolicCylinder,
        QuadricKind::Cone,
        QuadricKind::ParallelPlanes,
        QuadricKind::CrossingPlanes,
        QuadricKind::SinglePlane,
        QuadricKind::Line,
        QuadricKind::Point,
        QuadricKind::Empty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuadricKind::Ellipsoid => "ELLIPSOID",
            QuadricKind::HyperboloidOneSheet => "HYPERBOLOID_ONE_SHEET",
            QuadricKind::HyperboloidTwoSheets => "HYPERBOLOID_TWO_SHEETS",
            QuadricKind::EllipticParaboloid => "ELLIPTIC_PARABOLOID",
            QuadricKind::HyperbolicParaboloid => "HYPERBOLIC_PARABOLOID",
            QuadricKind::EllipticCylinder => "ELLIPTIC_CYLINDER",
            QuadricKind::HyperbolicCylinder => "HYPERBOLIC_CYLINDER",
            QuadricKind::ParabolicCylinder => "PARABOLIC_CYLINDER",
            QuadricKind::Cone => "CONE",
            QuadricKind::ParallelPlanes => "PARALLEL_PLANES",
            QuadricKind::CrossingPlanes => "CROSSING_PLANES",
            QuadricKind::SinglePlane => "SINGLE_PLANE",
            QuadricKind::Line => "LINE",
            QuadricKind::Point => "POINT",
            QuadricKind::Empty => "EMPTY",
        }
    }

    /// Classes with a regular two-dimensional chart.
    pub fn is_regular_surface(self) -> bool {
        matches!(
            self,
            QuadricKind::Ellipsoid
                | QuadricKind::HyperboloidOneSheet
                | QuadricKind::HyperboloidTwoSheets
                | QuadricKind::EllipticParaboloid
                | QuadricKind::HyperbolicParaboloid
                | QuadricKind::EllipticCylinder
                | QuadricKind::HyperbolicCylinder
                | QuadricKind::ParabolicCylinder
                | QuadricKind::Cone
        )
    }

    /// Plane-pair classes; as fillets these are chamfers.
    pub fn is_planar(self) -> bool {
        matches!(
            self,
            QuadricKind::ParallelPlanes | QuadricKind::CrossingPlanes | QuadricKind::SinglePlane
        )
    }
}

impl fmt::Display for QuadricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Class label plus the canonical frame and coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadricClass {
    pub kind: QuadricKind,
    /// Columns are the canonical axes.
    pub rotation: Mat3,
    pub translation: Vec3,
    /// `λᵢ`, descending among non-zero ones; zeroed entries are exactly `0.0`.
    pub diagonal: [f64; 3],
    /// `μ`, the coefficient of `2 y_k`.
    pub linear: f64,
    /// Index `k` of the axis carrying `μ`, when present.
    pub linear_axis: Option<usize>,
    /// `κ`
    pub constant: f64,
}

impl QuadricClass {
    pub fn axis(&self, i: usize) -> Vec3 {
        self.rotation.column(i)
    }

    /// World point from canonical coordinates.
    pub fn to_world(&self, y: Vec3) -> Vec3 {
        self.translation + self.rotation.mul_vec(y)
    }

    /// Canonical coordinates of a world point.
    pub fn to_canonical(&self, x: Vec3) -> Vec3 {
        self.rotation.transpose().mul_vec(x - self.translation)
    }

    /// The quadric described by this canonical form.
    pub fn reconstruct(&self) -> Quadric {
        let r = &self.rotation;
        let a = r.mul_mat(&Mat3::diagonal(self.diagonal)).mul_mat(&r.transpose());
        let t = self.translation;
        let lin_dir = self.linear_axis.map(|k| r.column(k)).unwrap_or(Vec3::ZERO);
        let b = lin_dir * self.linear - a.mul_vec(t);
        let c = a.bilinear(t, t) - 2.0 * self.linear * lin_dir.dot(t) + self.constant;
        Quadric::new(a, b, c)
    }

    /// Indices of the non-zero diagonal entries.
    pub fn nonzero_axes(&self) -> Vec<usize> {
        (0..3).filter(|&i| self.diagonal[i] != 0.0).collect()
    }

    /// Sign that makes positive eigenvalues the majority.
    pub(crate) fn orientation(&self) -> f64 {
        let pos = self.diagonal.iter().filter(|&&l| l > 0.0).count();
        let neg = self.diagonal.iter().filter(|&&l| l < 0.0).count();
        if pos >= neg {
            1.0
        } else {
            -1.0
        }
    }

    /// True when two non-zero eigenvalues coincide (surface of revolution
    /// about the remaining axis).
    pub fn is_circular(&self) -> bool {
        let nz = self.nonzero_axes();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        match nz.len() {
            2 => close(self.diagonal[nz[0]], self.diagonal[nz[1]]),
            3 => {
                let d = &self.diagonal;
                close(d[0], d[1]) || close(d[1], d[2]) || close(d[0], d[2])
            }
            _ => false,
        }
    }
}

/// Classifies `q` and returns its canonical frame.
///
/// Eigenvalues with `|λ| ≤ tol·max|λ|` are treated as zero. The centre is
/// solved in the least-squares sense on the range of `A`.
pub fn classify_quadric(q: &Quadric, tol: f64) -> Result<QuadricClass, AlgebraError> {
    if q.max_coefficient() <= ABSOLUTE_ZERO {
        return Err(AlgebraError::AllZero);
    }
    let eig = jacobi_eigen3(q.a());
    let lambda_max = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut diagonal = [0.0; 3];
    let mut zero_axes = Vec::new();
    for i in 0..3 {
        if eig.values[i].abs() > tol * lambda_max && eig.values[i] != 0.0 {
            diagonal[i] = eig.values[i];
        } else {
            zero_axes.push(i);
        }
    }

    let mut cols = [eig.vector(0), eig.vector(1), eig.vector(2)];
    let b = q.b;
    let mut t = Vec3::ZERO;
    for i in 0..3 {
        if diagonal[i] != 0.0 {
            t -= cols[i] * (cols[i].dot(b) / diagonal[i]);
        }
    }

    let null_linear = zero_axes.iter().fold(Vec3::ZERO, |acc, &i| acc + cols[i] * cols[i].dot(b));
    let lin_scale = b
        .norm()
        .max(lambda_max * t.norm())
        .max((lambda_max * q.c.abs()).sqrt());
    let has_linear = !zero_axes.is_empty() && null_linear.norm() > tol * lin_scale;

    let mut linear_axis = None;
    let mut linear = 0.0;
    if has_linear {
        let w = null_linear.normalized().expect("non-zero null-space linear term");
        match zero_axes.len() {
            1 => {
                let k = zero_axes[0];
                linear_axis = Some(k);
                linear = cols[k].dot(b);
            }
            2 => {
                let (j, k) = (zero_axes[0], zero_axes[1]);
                let nz = 3 - j - k;
                cols[k] = w;
                // keep the frame right-handed whatever the index order
                cols[j] = if (nz, j, k) == (0, 1, 2) || (nz, j, k) == (2, 0, 1) {
                    w.cross(cols[nz])
                } else {
                    cols[nz].cross(w)
                };
                linear_axis = Some(k);
                linear = null_linear.norm();
            }
            _ => {
                let e = least_aligned_axis(w);
                let c0 = w.cross(e).normalized().expect("axis not parallel");
                cols = [c0, w.cross(c0), w];
                linear_axis = Some(2);
                linear = null_linear.norm();
            }
        }
    }

    let rotation = Mat3::from_columns(cols[0], cols[1], cols[2]);
    let mut constant = q.eval(t);
    if let Some(k) = linear_axis {
        t += cols[k] * (-constant / (2.0 * linear));
        constant = 0.0;
    }
    let const_scale = q.c.abs().max(lambda_max * t.norm_squared()).max(b.norm() * t.norm());
    if constant.abs() <= tol * const_scale {
        constant = 0.0;
    }

    let mut class = QuadricClass {
        kind: QuadricKind::Empty,
        rotation,
        translation: t,
        diagonal,
        linear,
        linear_axis,
        constant,
    };
    class.kind = label(&class);
    Ok(class)
}

fn label(c: &QuadricClass) -> QuadricKind {
    use QuadricKind::*;
    let sigma = c.orientation();
    let pos = c.diagonal.iter().filter(|&&l| sigma * l > 0.0).count();
    let neg = c.diagonal.iter().filter(|&&l| sigma * l < 0.0).count();
    let rank = pos + neg;
    let kappa = sigma * c.constant;
    let has_linear = c.linear_axis.is_some();
    match rank {
        3 => match (neg == 0, kappa.partial_cmp(&0.0)) {
            (true, Some(std::cmp::Ordering::Less)) => Ellipsoid,
            (true, Some(std::cmp::Ordering::Equal)) => Point,
            (true, _) => Empty,
            (false, Some(std::cmp::Ordering::Less)) => HyperboloidOneSheet,
            (false, Some(std::cmp::Ordering::Equal)) => Cone,
            (false, _) => HyperboloidTwoSheets,
        },
        2 => {
            if has_linear {
                if neg == 0 {
                    EllipticParaboloid
                } else {
                    HyperbolicParaboloid
                }
            } else if neg == 0 {
                if kappa < 0.0 {
                    EllipticCylinder
                } else if kappa == 0.0 {
                    Line
                } else {
                    Empty
                }
            } else if kappa == 0.0 {
                CrossingPlanes
            } else {
                HyperbolicCylinder
            }
        }
        1 => {
            if has_linear {
                ParabolicCylinder
            } else if kappa < 0.0 {
                ParallelPlanes
            } else if kappa == 0.0 {
                SinglePlane
            } else {
                Empty
            }
        }
        _ => {
            if has_linear {
                SinglePlane
            } else {
                Empty
            }
        }
    }
}

/// The coordinate axis least aligned with `n` (ties resolved x, then y, then z).
pub fn least_aligned_axis(n: Vec3) -> Vec3 {
    let mut idx = 0;
    for i in 1..3 {
        if n[i].abs() < n[idx].abs() {
            idx = i;
        }
    }
    Vec3::axis(idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LinearForm;

    fn diag_quadric(d: [f64; 3], b: [f64; 3], c: f64) -> Quadric {
        Quadric::new(Mat3::diagonal(d), Vec3::from_array(b), c)
    }

    /// Applies a fixed rotation and translation so fixtures are not axis-aligned.
    fn moved(q: &Quadric) -> Quadric {
        let (s1, c1) = (0.3_f64.sin(), 0.3_f64.cos());
        let (s2, c2) = (1.1_f64.sin(), 1.1_f64.cos());
        let rz = Mat3([[c1, -s1, 0.0], [s1, c1, 0.0], [0.0, 0.0, 1.0]]);
        let rx = Mat3([[1.0, 0.0, 0.0], [0.0, c2, -s2], [0.0, s2, c2]]);
        let r = rz.mul_mat(&rx);
        let t = Vec3::new(0.7, -1.2, 2.5);
        // Q'(x) = Q(Rᵀ(x − t))
        let rt = r.transpose();
        let a = r.mul_mat(q.a()).mul_mat(&rt);
        let b = r.mul_vec(q.b) - a.mul_vec(t);
        let c = a.bilinear(t, t) - 2.0 * r.mul_vec(q.b).dot(t) + q.c;
        Quadric::new(a, b, c)
    }

    pub(crate) fn class_fixtures() -> Vec<(QuadricKind, Quadric)> {
        use QuadricKind::*;
        vec![
            (Ellipsoid, diag_quadric([1.0, 4.0, 9.0], [0.0; 3], -1.0)),
            (HyperboloidOneSheet, diag_quadric([1.0, 2.0, -1.0], [0.0; 3], -1.0)),
            (HyperboloidTwoSheets, diag_quadric([1.0, 2.0, -1.0], [0.0; 3], 1.0)),
            (EllipticParaboloid, diag_quadric([1.0, 3.0, 0.0], [0.0, 0.0, -0.5], 0.0)),
            (HyperbolicParaboloid, diag_quadric([1.0, -2.0, 0.0], [0.0, 0.0, 1.0], 0.0)),
            (EllipticCylinder, diag_quadric([2.0, 1.0, 0.0], [0.0; 3], -1.0)),
            (HyperbolicCylinder, diag_quadric([1.0, -1.0, 0.0], [0.0; 3], -1.0)),
            (ParabolicCylinder, diag_quadric([1.0, 0.0, 0.0], [0.0, 0.5, 0.0], 0.0)),
            (Cone, diag_quadric([1.0, 1.0, -1.0], [0.0; 3], 0.0)),
            (ParallelPlanes, diag_quadric([0.0, 0.0, 1.0], [0.0; 3], -1.0)),
            (CrossingPlanes, diag_quadric([1.0, -4.0, 0.0], [0.0; 3], 0.0)),
            (SinglePlane, diag_quadric([0.0, 0.0, 0.0], [0.0, 1.0, 0.0], 2.0)),
            (Line, diag_quadric([1.0, 1.0, 0.0], [0.0; 3], 0.0)),
            (Point, diag_quadric([1.0, 2.0, 3.0], [0.0; 3], 0.0)),
            (Empty, diag_quadric([1.0, 1.0, 1.0], [0.0; 3], 1.0)),
        ]
    }

    #[test]
    fn all_fifteen_classes_round_trip() {
        for (kind, q) in class_fixtures() {
            for q in [q, moved(&q), moved(&q).scale(-3.0)] {
                let class = classify_quadric(&q, DEFAULT_CLASSIFY_TOL).unwrap();
                assert_eq!(class.kind, kind, "{q:?}");
                let back = class.reconstruct();
                let dev = back.relative_deviation(&q);
                assert!(dev <= 1e-10, "{kind}: deviation {dev}");
                let rtr = class.rotation.transpose().mul_mat(&class.rotation);
                assert!(rtr.sub(&Mat3::IDENTITY).max_abs() <= 1e-12, "{kind}");
            }
        }
    }

    #[test]
    fn sphere_and_plane_pairs() {
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        let c = classify_quadric(&s, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(c.kind, QuadricKind::Ellipsoid);
        assert!(c.is_circular());
        assert_eq!(c.diagonal, [1.0, 1.0, 1.0]);
        assert_eq!(c.constant, -1.0);

        let planes = diag_quadric([0.0, 0.0, 1.0], [0.0; 3], -1.0);
        let c = classify_quadric(&planes, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(c.kind, QuadricKind::ParallelPlanes);
    }

    #[test]
    fn beam_paraboloid_is_circular() {
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        let beam = s.subtract_square(&LinearForm::new(Vec3::X, 0.375));
        let c = classify_quadric(&beam, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(c.kind, QuadricKind::EllipticParaboloid);
        assert!(c.is_circular());
        assert_eq!(c.diagonal[..2], [1.0, 1.0]);
        assert_eq!(c.linear_axis, Some(2));
        assert_eq!(c.axis(2).x.abs(), 1.0);
    }

    #[test]
    fn all_zero_is_rejected() {
        assert_eq!(classify_quadric(&Quadric::zero(), 1e-9), Err(AlgebraError::AllZero));
    }
}
