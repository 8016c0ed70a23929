//! Quadric fillets between two stubs at a hub.
//!
//! For stubs `H₁ = S − G₁²` and `H₂ = S − G₂²` put `F₊ = G₂ + G₁`,
//! `F₋ = G₂ − G₁` and
//!
//! ```text
//! E₁ = αF₊ + βF₋,   E₂ = αF₊ − βF₋.
//! ```
//!
//! Then `(H₁ − E₁²) − (H₂ − E₂²) = (1 − 4αβ)F₊F₋`, so with `α = 1/(4β)` both
//! expressions are the same quadric `Q`. `Q` touches `H₁` along the conic
//! `H₁ ∩ {E₁ = 0}` and `H₂` along `H₂ ∩ {E₂ = 0}`.

use crate::algebra::{
    classify_quadric, principal_curvatures, AlgebraError, LinearForm, QuadricKind, Quadric, Vec3,
    DEFAULT_CLASSIFY_TOL,
};
use crate::conics::{intersect_quadric_plane, Conic, ConicError, ConicKind};
use crate::lattice::StubView;

/// Relative coefficient tolerance of the single-quadric cross-check.
pub const IDENTITY_TOL: f64 = 1e-12;

/// `|∇G₁ × ∇G₂|` must exceed this fraction of `|∇G₁||∇G₂|`.
pub const PARALLEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilletError {
    #[error("beta must be positive and finite, got {0}")]
    NonPositiveBeta(f64),
    #[error("stub tangency planes are parallel; there is no corner to fill")]
    ParallelStubs,
    #[error("stubs belong to different hubs (`{0}` and `{1}`)")]
    HubMismatch(String, String),
    #[error("fillet identity violated: relative coefficient deviation {0:e}")]
    IdentityViolation(f64),
    #[error("fillet planes disagree in sign at the bisector probe (E1 = {e1:e}, E2 = {e2:e})")]
    Orientation { e1: f64, e2: f64 },
    #[error("tangency conic with stub {stub} is {kind}; the fillet does not touch that stub")]
    EmptyConic { stub: usize, kind: ConicKind },
    #[error("outward bisector ray does not meet the fillet surface")]
    NoBisectorIntersection,
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The planes `E₁`, `E₂` and the forms they are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilletPlanes {
    pub alpha: f64,
    pub beta: f64,
    pub f_plus: LinearForm,
    pub f_minus: LinearForm,
    pub e1: LinearForm,
    pub e2: LinearForm,
}

/// `α = 1/(4β)`, `E₁ = αF₊ + βF₋`, `E₂ = αF₊ − βF₋`.
pub fn fillet_planes(g1: &LinearForm, g2: &LinearForm, beta: f64) -> Result<FilletPlanes, FilletError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(FilletError::NonPositiveBeta(beta));
    }
    if g1.g.cross(g2.g).norm() <= PARALLEL_TOL * g1.g.norm() * g2.g.norm() {
        return Err(FilletError::ParallelStubs);
    }
    Ok(planes_with(g1, g2, 1.0 / (4.0 * beta), beta))
}

/// The plane pair for arbitrary `α`, `β` (no product constraint).
pub fn planes_with(g1: &LinearForm, g2: &LinearForm, alpha: f64, beta: f64) -> FilletPlanes {
    let f_plus = g2.add(g1);
    let f_minus = g2.sub(g1);
    FilletPlanes {
        alpha,
        beta,
        f_plus,
        f_minus,
        e1: f_plus.scale(alpha).add(&f_minus.scale(beta)),
        e2: f_plus.scale(alpha).sub(&f_minus.scale(beta)),
    }
}

/// `(H₁ − E₁²) − (H₂ − E₂²)`
pub fn fillet_residual(h1: &Quadric, h2: &Quadric, e1: &LinearForm, e2: &LinearForm) -> Quadric {
    h1.subtract_square(e1).sub(&h2.subtract_square(e2))
}

/// How far along the stubs a fillet reaches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Bounded(f64),
    Unbounded,
}

impl Extent {
    pub fn value(self) -> Option<f64> {
        match self {
            Extent::Bounded(v) => Some(v),
            Extent::Unbounded => None,
        }
    }
}

/// One fillet quadric with everything derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FilletPatch {
    pub hub: String,
    pub beams: (String, String),
    pub hub_center: Vec3,
    pub hub_radius: f64,
    /// Unit stub axes toward the far hubs.
    pub axes: (Vec3, Vec3),
    pub alpha: f64,
    pub beta: f64,
    pub f_plus: LinearForm,
    pub f_minus: LinearForm,
    pub e1: LinearForm,
    pub e2: LinearForm,
    pub h1: Quadric,
    pub h2: Quadric,
    /// `H₁ − E₁²`
    pub q: Quadric,
    /// `H₁ ∩ {E₁ = 0}`
    pub conic1: Conic,
    /// `H₂ ∩ {E₂ = 0}`
    pub conic2: Conic,
    pub extent: Extent,
}

impl FilletPatch {
    /// Relative coefficient deviation between `q` and `H₂ − E₂²`.
    pub fn identity_deviation(&self) -> f64 {
        self.q.relative_deviation(&self.h2.subtract_square(&self.e2))
    }

    /// The point `c + r·(u₁ + u₂)/|u₁ + u₂|` used to orient the planes.
    pub fn probe(&self) -> Option<Vec3> {
        bisector(self.axes.0, self.axes.1).map(|w| self.hub_center + w * self.hub_radius)
    }

    /// Whether the fillet quadric is a plane pair (a chamfer).
    pub fn is_chamfer(&self) -> bool {
        classify_quadric(&self.q, DEFAULT_CLASSIFY_TOL).map(|c| c.kind.is_planar()).unwrap_or(false)
    }
}

fn bisector(u1: Vec3, u2: Vec3) -> Option<Vec3> {
    (u1 + u2).normalized()
}

/// Builds the fillet between two stubs at the same hub.
pub fn build_fillet(stub1: &StubView, stub2: &StubView, beta: f64) -> Result<FilletPatch, FilletError> {
    if stub1.hub != stub2.hub {
        return Err(FilletError::HubMismatch(stub1.hub.clone(), stub2.hub.clone()));
    }
    let mut planes = fillet_planes(&stub1.g, &stub2.g, beta)?;
    let probe = bisector(stub1.axis, stub2.axis).map(|w| stub1.hub_center + w * stub1.hub_radius);
    if let Some(p) = probe {
        let (v1, v2) = (planes.e1.eval(p), planes.e2.eval(p));
        if v1 < 0.0 && v2 < 0.0 {
            // Q depends only on E², so a joint flip keeps it
            planes.e1 = planes.e1.neg();
            planes.e2 = planes.e2.neg();
        } else if !(v1 > 0.0 && v2 > 0.0) {
            return Err(FilletError::Orientation { e1: v1, e2: v2 });
        }
    }

    let q = stub1.h.subtract_square(&planes.e1);
    let deviation = q.relative_deviation(&stub2.h.subtract_square(&planes.e2));
    if deviation > IDENTITY_TOL {
        return Err(FilletError::IdentityViolation(deviation));
    }

    let conic1 = intersect_quadric_plane(&stub1.h, &planes.e1)?;
    let conic2 = intersect_quadric_plane(&stub2.h, &planes.e2)?;
    for (stub, c) in [(1, &conic1), (2, &conic2)] {
        if !c.kind.is_curve() {
            return Err(FilletError::EmptyConic { stub, kind: c.kind });
        }
    }

    let mut patch = FilletPatch {
        hub: stub1.hub.clone(),
        beams: (stub1.beam.clone(), stub2.beam.clone()),
        hub_center: stub1.hub_center,
        hub_radius: stub1.hub_radius,
        axes: (stub1.axis, stub2.axis),
        alpha: planes.alpha,
        beta: planes.beta,
        f_plus: planes.f_plus,
        f_minus: planes.f_minus,
        e1: planes.e1,
        e2: planes.e2,
        h1: stub1.h,
        h2: stub2.h,
        q,
        conic1,
        conic2,
        extent: Extent::Unbounded,
    };
    patch.extent = fillet_extent(&patch);
    Ok(patch)
}

/// The two tangency conics of a patch.
pub fn tangency_conics(patch: &FilletPatch) -> (Conic, Conic) {
    (patch.conic1, patch.conic2)
}

/// Largest hub-centre distance over both tangency conics; unbounded when
/// either conic is not an ellipse.
pub fn fillet_extent(patch: &FilletPatch) -> Extent {
    let c = patch.hub_center;
    match (patch.conic1.max_distance_from(c), patch.conic2.max_distance_from(c)) {
        (Some(a), Some(b)) => Extent::Bounded(a.max(b)),
        _ => Extent::Unbounded,
    }
}

/// The point where the outward bisector ray from the hub centre first
/// crosses the fillet surface.
pub fn bisector_probe(patch: &FilletPatch) -> Result<Vec3, FilletError> {
    let w = bisector(patch.axes.0, patch.axes.1).ok_or(FilletError::NoBisectorIntersection)?;
    let c = patch.hub_center;
    let q = &patch.q;
    // Q(c + s w) = a s² + 2 b s + k
    let a = q.a().bilinear(w, w);
    let b = w.dot(q.a().mul_vec(c) + q.b);
    let k = q.eval(c);
    let scale = q.a().max_abs().max(1e-300);
    let s = if a.abs() <= 1e-14 * scale {
        if b == 0.0 {
            return Err(FilletError::NoBisectorIntersection);
        }
        let s = -k / (2.0 * b);
        (s > 0.0).then_some(s)
    } else {
        let disc = b * b - a * k;
        if disc < 0.0 {
            return Err(FilletError::NoBisectorIntersection);
        }
        // numerically stable pair of roots
        let t = -(b + b.signum() * disc.sqrt());
        let r1 = t / a;
        let r2 = if t != 0.0 { k / t } else { r1 };
        [r1.min(r2), r1.max(r2)].into_iter().find(|&s| s > 0.0)
    };
    s.map(|s| c + w * s).ok_or(FilletError::NoBisectorIntersection)
}

/// `1 / max|κ|` at the bisector probe. Plane-pair fillets have zero
/// curvature and report `+∞`.
pub fn fillet_min_curvature_radius(patch: &FilletPatch) -> Result<f64, FilletError> {
    if let Ok(class) = classify_quadric(&patch.q, DEFAULT_CLASSIFY_TOL) {
        if class.kind.is_planar() || class.kind == QuadricKind::Empty {
            return Ok(f64::INFINITY);
        }
    }
    let p = bisector_probe(patch)?;
    let (k1, _) = principal_curvatures(&patch.q, p)?;
    Ok(if k1 == 0.0 { f64::INFINITY } else { 1.0 / k1.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{stub_views_at_hub, Beam, Hub, Lattice};
    use approx::assert_relative_eq;

    fn lx() -> LinearForm {
        LinearForm::new(Vec3::X, 0.0)
    }
    fn ly() -> LinearForm {
        LinearForm::new(Vec3::Y, 0.0)
    }

    fn perpendicular_stubs() -> (StubView, StubView) {
        let lat = Lattice {
            hubs: vec![
                Hub::new("h0", Vec3::ZERO, 1.0),
                Hub::new("h1", Vec3::new(4.0, 0.0, 0.0), 1.0),
                Hub::new("h2", Vec3::new(0.0, 4.0, 0.0), 1.0),
            ],
            beams: vec![Beam::new("b0", "h0", "h1", 4.0), Beam::new("b1", "h0", "h2", 4.0)],
            fillets: vec![],
        };
        let v = stub_views_at_hub(&lat, "h0").unwrap();
        (v[0].clone(), v[1].clone())
    }

    #[test]
    fn plane_examples() {
        let p = fillet_planes(&lx(), &ly(), 0.5).unwrap();
        assert_eq!(p.alpha, 0.5);
        assert_eq!(p.e1, ly());
        assert_eq!(p.e2, lx());
        let p = fillet_planes(&lx(), &ly(), 1.0).unwrap();
        assert_eq!(p.alpha, 0.25);
        assert_eq!(p.e1, LinearForm::new(Vec3::new(-0.75, 1.25, 0.0), 0.0));
        assert_eq!(p.e2, LinearForm::new(Vec3::new(1.25, -0.75, 0.0), 0.0));
        for beta in [0.1, 0.3, 0.7, 1.9, 12.5] {
            let p = fillet_planes(&lx(), &ly(), beta).unwrap();
            assert_relative_eq!(p.alpha * p.beta, 0.25, max_relative = 1e-15);
        }
        assert_eq!(fillet_planes(&lx(), &lx().scale(2.0), 1.0), Err(FilletError::ParallelStubs));
        assert_eq!(fillet_planes(&lx(), &ly(), 0.0), Err(FilletError::NonPositiveBeta(0.0)));
    }

    #[test]
    fn residual_examples() {
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        let (h1, h2) = (s.subtract_square(&lx()), s.subtract_square(&ly()));
        let p = fillet_planes(&lx(), &ly(), 0.7).unwrap();
        assert!(fillet_residual(&h1, &h2, &p.e1, &p.e2).max_coefficient() <= 1e-15);

        let p = planes_with(&lx(), &ly(), 1.0, 1.0);
        let r = fillet_residual(&h1, &h2, &p.e1, &p.e2);
        // −3(y² − x²)
        assert_eq!(r.coefficients(), [3.0, -3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let e = LinearForm::new(Vec3::new(0.3, 0.1, -0.2), 0.4);
        let r = fillet_residual(&h1, &h2, &e, &e);
        assert_eq!(r, h1.sub(&h2));
        assert_eq!(r, p.f_plus.product(&p.f_minus));
    }

    #[test]
    fn chamfer_case() {
        let (s1, s2) = perpendicular_stubs();
        let patch = build_fillet(&s1, &s2, 0.5).unwrap();
        assert_eq!(patch.q.coefficients(), [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert!(patch.is_chamfer());
        assert_eq!(patch.conic1.kind, ConicKind::ParallelLines);
        assert_eq!(patch.conic2.kind, ConicKind::ParallelLines);
        assert_eq!(patch.extent, Extent::Unbounded);
        assert_eq!(fillet_min_curvature_radius(&patch), Ok(f64::INFINITY));
    }

    #[test]
    fn unit_beta_case() {
        let (s1, s2) = perpendicular_stubs();
        let patch = build_fillet(&s1, &s2, 1.0).unwrap();
        let want = [-9.0 / 16.0, -9.0 / 16.0, 1.0, 15.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0];
        let other = s2.h.subtract_square(&patch.e2);
        for ((a, b), w) in patch.q.coefficients().iter().zip(other.coefficients()).zip(want) {
            assert_relative_eq!(*a, w, epsilon = 1e-15);
            assert_relative_eq!(b, w, epsilon = 1e-15);
        }
        assert!(patch.identity_deviation() <= 1e-15);
        assert_eq!(patch.conic1.kind, ConicKind::Ellipse);
        // ∇Q = ∇S where G1 = E1 = 0 on the sphere: (0, 0, ±1)
        let s = Quadric::sphere(Vec3::ZERO, 1.0);
        for p in [Vec3::Z, -Vec3::Z] {
            assert!((patch.q.gradient(p) - s.gradient(p)).norm() <= 1e-15);
        }
        assert_relative_eq!(patch.extent.value().unwrap(), 34.0_f64.sqrt() / 3.0, epsilon = 1e-12);
        let probe = bisector_probe(&patch).unwrap();
        let t = (4.0_f64 / 3.0).sqrt();
        assert_relative_eq!(probe.x, t, epsilon = 1e-14);
        assert_relative_eq!(probe.y, t, epsilon = 1e-14);
        let g = patch.q.gradient(probe);
        assert_relative_eq!(g.x, 0.75 * t, epsilon = 1e-14);
        assert_relative_eq!(g.norm(), 1.5_f64.sqrt(), epsilon = 1e-14);
        let r = fillet_min_curvature_radius(&patch).unwrap();
        assert_relative_eq!(r, 1.5_f64.sqrt() / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn beta_two_extent() {
        let (s1, s2) = perpendicular_stubs();
        let patch = build_fillet(&s1, &s2, 2.0).unwrap();
        assert_relative_eq!(patch.extent.value().unwrap(), 514.0_f64.sqrt() / 15.0, epsilon = 1e-12);
    }

    #[test]
    fn hub_mismatch() {
        let (s1, mut s2) = perpendicular_stubs();
        s2.hub = "other".into();
        assert!(matches!(build_fillet(&s1, &s2, 1.0), Err(FilletError::HubMismatch(..))));
    }

    #[test]
    fn corrupted_patch_is_detected() {
        let (s1, s2) = perpendicular_stubs();
        let mut patch = build_fillet(&s1, &s2, 1.0).unwrap();
        let mut k = patch.q.coefficients();
        k[9] += 1e-6;
        patch.q = Quadric::from_coefficients(k);
        assert!(patch.identity_deviation() > IDENTITY_TOL);
    }
}
