//! Affine and quadratic functions on model space.
//!
//! A [`LinearForm`] is `L(x) = g·x + c₀`; its zero set is a plane whenever
//! `g ≠ 0`. A [`Quadric`] is `Q(x) = xᵀAx + 2bᵀx + c` with `A` stored exactly
//! symmetric. Surfaces are identified with the function that vanishes on
//! them, and solids with the region where that function is non-positive.

use super::vec3::{Mat3, Vec3};

/// Affine function `g·x + c₀`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinearForm {
    pub g: Vec3,
    pub c0: f64,
}

impl LinearForm {
    pub const fn new(g: Vec3, c0: f64) -> Self {
        Self { g, c0 }
    }

    pub const fn constant(c0: f64) -> Self {
        Self { g: Vec3::ZERO, c0 }
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.g.dot(x) + self.c0
    }

    pub fn gradient(&self) -> Vec3 {
        self.g
    }

    pub fn add(&self, o: &LinearForm) -> LinearForm {
        LinearForm::new(self.g + o.g, self.c0 + o.c0)
    }

    pub fn sub(&self, o: &LinearForm) -> LinearForm {
        LinearForm::new(self.g - o.g, self.c0 - o.c0)
    }

    pub fn scale(&self, s: f64) -> LinearForm {
        LinearForm::new(self.g * s, self.c0 * s)
    }

    pub fn neg(&self) -> LinearForm {
        self.scale(-1.0)
    }

    /// Signed distance of `x` to the zero plane (positive where the form is positive).
    pub fn signed_distance(&self, x: Vec3) -> f64 {
        self.eval(x) / self.g.norm()
    }

    /// The product `self · other` as a quadric.
    pub fn product(&self, o: &LinearForm) -> Quadric {
        let a = Mat3::outer(self.g, o.g).add(&Mat3::outer(o.g, self.g)).scale(0.5);
        let b = (self.g * o.c0 + o.g * self.c0) * 0.5;
        Quadric::new(a, b, self.c0 * o.c0)
    }

    pub fn is_finite(&self) -> bool {
        self.g.is_finite() && self.c0.is_finite()
    }
}

/// Quadratic function `xᵀAx + 2bᵀx + c`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadric {
    a: Mat3,
    pub b: Vec3,
    pub c: f64,
}

impl Quadric {
    /// Builds a quadric; `a` is symmetrized by averaging mirrored entries.
    pub fn new(a: Mat3, b: Vec3, c: f64) -> Self {
        Self { a: a.symmetrized(), b, c }
    }

    /// Builds from the ten independent coefficients
    /// `[a11, a22, a33, a12, a13, a23, b1, b2, b3, c]`.
    pub fn from_coefficients(k: [f64; 10]) -> Self {
        let a = Mat3([[k[0], k[3], k[4]], [k[3], k[1], k[5]], [k[4], k[5], k[2]]]);
        Self { a, b: Vec3::new(k[6], k[7], k[8]), c: k[9] }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `|x − center|² − radius²`
    pub fn sphere(center: Vec3, radius: f64) -> Self {
        Self { a: Mat3::IDENTITY, b: -center, c: center.norm_squared() - radius * radius }
    }

    pub fn a(&self) -> &Mat3 {
        &self.a
    }

    pub fn eval(&self, x: Vec3) -> f64 {
        self.a.bilinear(x, x) + 2.0 * self.b.dot(x) + self.c
    }

    /// `2Ax + 2b`
    pub fn gradient(&self, x: Vec3) -> Vec3 {
        (self.a.mul_vec(x) + self.b) * 2.0
    }

    /// Constant Hessian `2A`.
    pub fn hessian(&self) -> Mat3 {
        self.a.scale(2.0)
    }

    /// `Q − L²`: the quadric touching `Q = 0` along its intersection with `L = 0`.
    pub fn subtract_square(&self, l: &LinearForm) -> Quadric {
        Quadric {
            a: self.a.sub(&Mat3::outer(l.g, l.g)),
            b: self.b - l.g * l.c0,
            c: self.c - l.c0 * l.c0,
        }
    }

    pub fn add(&self, o: &Quadric) -> Quadric {
        Quadric { a: self.a.add(&o.a), b: self.b + o.b, c: self.c + o.c }
    }

    pub fn sub(&self, o: &Quadric) -> Quadric {
        Quadric { a: self.a.sub(&o.a), b: self.b - o.b, c: self.c - o.c }
    }

    pub fn scale(&self, s: f64) -> Quadric {
        Quadric { a: self.a.scale(s), b: self.b * s, c: self.c * s }
    }

    /// `[a11, a22, a33, a12, a13, a23, b1, b2, b3, c]`
    pub fn coefficients(&self) -> [f64; 10] {
        let a = &self.a.0;
        [a[0][0], a[1][1], a[2][2], a[0][1], a[0][2], a[1][2], self.b.x, self.b.y, self.b.z, self.c]
    }

    /// Euclidean norm of [`Self::coefficients`].
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `‖self − other‖ / max(‖self‖, ‖other‖)` over the coefficient vector;
    /// zero when both are zero.
    pub fn relative_deviation(&self, o: &Quadric) -> f64 {
        let scale = self.coefficient_norm().max(o.coefficient_norm());
        if scale == 0.0 {
            return 0.0;
        }
        self.sub(o).coefficient_norm() / scale
    }

    pub fn is_finite(&self) -> bool {
        self.coefficients().iter().all(|v| v.is_finite())
    }

    /// Magnitude of the function near `x`, used to scale residual tolerances.
    pub fn value_scale(&self, x: Vec3) -> f64 {
        let r = x.norm();
        let a = self.a.max_abs();
        (a * r * r).max(self.b.max_abs() * r).max(self.c.abs()).max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn linear_examples() {
        assert_eq!(LinearForm::new(Vec3::X, 0.0).eval(Vec3::new(2.0, 3.0, 4.0)), 2.0);
        assert_eq!(LinearForm::constant(7.0).eval(Vec3::new(-3.0, 1e3, 0.5)), 7.0);
        // (5y − 3x)/4 at (0.9, 0.9, 0.9): (4.5 − 2.7)/4
        let e1 = LinearForm::new(Vec3::new(-0.75, 1.25, 0.0), 0.0);
        assert_relative_eq!(e1.eval(Vec3::new(0.9, 0.9, 0.9)), 0.45, epsilon = 1e-15);
    }

    #[test]
    fn quadric_examples() {
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        assert_eq!(s.eval(Vec3::ZERO), -1.0);
        let cyl = Quadric::from_coefficients([0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(cyl.eval(Vec3::new(3.0, 0.5, 0.0)), -0.75);
        let beam = Quadric::from_coefficients([
            0.0, 1.0, 1.0, 0.0, 0.0, 0.0, -0.375, 0.0, 0.0, -73.0 / 64.0,
        ]);
        assert_eq!(beam.eval(Vec3::ZERO), -1.140625);
    }

    #[test]
    fn gradient_examples() {
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        let p = Vec3::new(0.0, 0.6, 0.8);
        assert_eq!(s.gradient(p), Vec3::new(0.0, 1.2, 1.6));
        let h1 = s.subtract_square(&LinearForm::new(Vec3::X, 0.0));
        assert_eq!(h1.gradient(p), Vec3::new(0.0, 1.2, 1.6));
    }

    #[test]
    fn subtract_square_examples() {
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        let h1 = s.subtract_square(&LinearForm::new(Vec3::X, 0.0));
        assert_eq!(
            h1.coefficients(),
            [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]
        );
        // β = 1/2 plane E1 = y flattens the cylinder to z² − 1
        let flat = h1.subtract_square(&LinearForm::new(Vec3::Y, 0.0));
        assert_eq!(
            flat.coefficients(),
            [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]
        );
        // y² + z² − 1 − (5y − 3x)²/16, expanded by hand:
        // −9/16 x² + (1 − 25/16) y² + z² + 30/16 xy − 1
        let e1 = LinearForm::new(Vec3::new(-0.75, 1.25, 0.0), 0.0);
        let q = h1.subtract_square(&e1);
        let expected = [-9.0 / 16.0, -9.0 / 16.0, 1.0, 15.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        for (got, want) in q.coefficients().iter().zip(expected) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn product_matches_pointwise() {
        let l = LinearForm::new(Vec3::new(1.0, -2.0, 0.5), 0.3);
        let m = LinearForm::new(Vec3::new(0.2, 0.7, -1.0), -1.1);
        let p = l.product(&m);
        let x = Vec3::new(0.4, -1.3, 2.2);
        assert_relative_eq!(p.eval(x), l.eval(x) * m.eval(x), epsilon = 1e-14);
    }

    #[test]
    fn symmetric_storage_is_exact() {
        let q = Quadric::new(Mat3([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]), Vec3::ZERO, 0.0);
        assert!(q.a().is_symmetric());
    }
}
