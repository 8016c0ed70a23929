use super::classify::least_aligned_axis;
use super::eigen::symmetric_eigen2;
use super::forms::Quadric;
use super::vec3::Vec3;
use super::AlgebraError;

const SINGULAR_TOL: f64 = 1e-12;

/// Principal curvatures of the level set of `q` through `x`.
///
/// The normal is `+∇Q`, so a sphere written as `|x − c|² − r²` has
/// curvatures `(1/r, 1/r)`. Sorted so that `|κ₁| ≥ |κ₂|`.
pub fn principal_curvatures(q: &Quadric, x: Vec3) -> Result<(f64, f64), AlgebraError> {
    let grad = q.gradient(x);
    let grad_norm = grad.norm();
    let scale = 2.0 * (q.a().max_abs() * x.norm()).max(q.b.norm());
    if grad_norm <= SINGULAR_TOL * scale || grad_norm == 0.0 {
        return Err(AlgebraError::SingularPoint);
    }
    let n = grad / grad_norm;
    let t1 = n.cross(least_aligned_axis(n)).normalized().ok_or(AlgebraError::SingularPoint)?;
    let t2 = n.cross(t1);
    let h = q.hessian();
    let m11 = h.bilinear(t1, t1) / grad_norm;
    let m12 = h.bilinear(t1, t2) / grad_norm;
    let m22 = h.bilinear(t2, t2) / grad_norm;
    let (k1, k2, _) = symmetric_eigen2(m11, m12, m22);
    Ok(if k1.abs() >= k2.abs() { (k1, k2) } else { (k2, k1) })
}
