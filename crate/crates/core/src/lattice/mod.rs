//! Hubs, beams and fillet specifications, and the construction of beam
//! quadors tangent to both endpoint spheres.

mod validate;

pub(crate) use validate::sphere_directions;
pub use validate::{validate_lattice, IssueCode, Severity, ValidationIssue, ValidationReport};

use crate::algebra::{LinearForm, Quadric, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("unknown hub `{0}`")]
    UnknownHub(String),
    #[error("unknown beam `{0}`")]
    UnknownBeam(String),
    #[error("beam family parameter k is zero")]
    DegenerateK,
    #[error("beam connects a hub to itself or to a coincident hub")]
    CoincidentHubs,
    #[error("tangency plane misses the sphere of hub `{0}`")]
    PlaneMissesSphere(String),
}

/// A lattice joint: a sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct Hub {
    pub id: String,
    pub center: Vec3,
    pub radius: f64,
}

impl Hub {
    pub fn new(id: impl Into<String>, center: Vec3, radius: f64) -> Self {
        Self { id: id.into(), center, radius }
    }
}

/// A beam between two hubs; `k` selects one quador from the family tangent
/// to both hub spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub id: String,
    pub hub_a: String,
    pub hub_b: String,
    pub k: f64,
}

impl Beam {
    pub fn new(id: impl Into<String>, hub_a: impl Into<String>, hub_b: impl Into<String>, k: f64) -> Self {
        Self { id: id.into(), hub_a: hub_a.into(), hub_b: hub_b.into(), k }
    }

    pub fn touches(&self, hub: &str) -> bool {
        self.hub_a == hub || self.hub_b == hub
    }

    /// The hub at the other end, if `hub` is an endpoint.
    pub fn far_hub(&self, hub: &str) -> Option<&str> {
        if self.hub_a == hub {
            Some(&self.hub_b)
        } else if self.hub_b == hub {
            Some(&self.hub_a)
        } else {
            None
        }
    }
}

/// A fillet between two beams at a shared hub.
#[derive(Debug, Clone, PartialEq)]
pub struct FilletSpec {
    pub hub: String,
    pub beam_i: String,
    pub beam_j: String,
    pub beta: f64,
}

impl FilletSpec {
    pub fn new(hub: impl Into<String>, beam_i: impl Into<String>, beam_j: impl Into<String>, beta: f64) -> Self {
        Self { hub: hub.into(), beam_i: beam_i.into(), beam_j: beam_j.into(), beta }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lattice {
    pub hubs: Vec<Hub>,
    pub beams: Vec<Beam>,
    pub fillets: Vec<FilletSpec>,
}

impl Lattice {
    pub fn hub(&self, id: &str) -> Result<&Hub, LatticeError> {
        self.hubs.iter().find(|h| h.id == id).ok_or_else(|| LatticeError::UnknownHub(id.to_string()))
    }

    pub fn beam(&self, id: &str) -> Result<&Beam, LatticeError> {
        self.beams.iter().find(|b| b.id == id).ok_or_else(|| LatticeError::UnknownBeam(id.to_string()))
    }

    pub fn beams_at<'a>(&'a self, hub: &'a str) -> impl Iterator<Item = &'a Beam> + 'a {
        self.beams.iter().filter(move |b| b.touches(hub))
    }

    /// The same lattice with every fillet removed.
    pub fn without_fillets(&self) -> Lattice {
        Lattice { hubs: self.hubs.clone(), beams: self.beams.clone(), fillets: Vec::new() }
    }

    /// Builds the quador of beam `id`.
    pub fn beam_quador(&self, id: &str) -> Result<BeamQuador, LatticeError> {
        let beam = self.beam(id)?;
        beam_quador(self.hub(&beam.hub_a)?, self.hub(&beam.hub_b)?, beam.k)
    }
}

/// `|x − c|² − r²`, negative inside the hub.
pub fn sphere_quadric(hub: &Hub) -> Quadric {
    Quadric::sphere(hub.center, hub.radius)
}

/// A beam quador with the tangency planes at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamQuador {
    /// `H = S_a − G_a² = S_b − G_b²`
    pub h: Quadric,
    /// Zero on the tangency plane at hub `a`, positive toward hub `b`.
    pub g_a: LinearForm,
    /// Zero on the tangency plane at hub `b`, positive toward hub `a`.
    pub g_b: LinearForm,
    pub center_a: Vec3,
    pub center_b: Vec3,
    pub radius_a: f64,
    pub radius_b: f64,
}

/// Quador tangent to both hub spheres.
///
/// `L = S_a − S_b` is affine; with `G_a = (L/k + k)/2` and `G_b = G_a − k`
/// the difference `S_a − G_a² − (S_b − G_b²) = L − 2kG_a + k²` vanishes
/// identically. Both planes are then signed to be positive toward the far
/// hub, which leaves `H` unchanged.
pub fn beam_quador(hub_a: &Hub, hub_b: &Hub, k: f64) -> Result<BeamQuador, LatticeError> {
    if k == 0.0 {
        return Err(LatticeError::DegenerateK);
    }
    if hub_a.center == hub_b.center {
        return Err(LatticeError::CoincidentHubs);
    }
    let s_a = sphere_quadric(hub_a);
    let s_b = sphere_quadric(hub_b);
    // S_a − S_b = 2(b_a − b_b)·x + (c_a − c_b)
    let l = LinearForm::new((s_a.b - s_b.b) * 2.0, s_a.c - s_b.c);
    let mut g_a = l.scale(0.5 / k).add(&LinearForm::constant(0.5 * k));
    let mut g_b = g_a.sub(&LinearForm::constant(k));
    if g_a.eval(hub_b.center) < 0.0 {
        g_a = g_a.neg();
    }
    if g_b.eval(hub_a.center) < 0.0 {
        g_b = g_b.neg();
    }
    for (g, hub) in [(&g_a, hub_a), (&g_b, hub_b)] {
        if g.eval(hub.center).abs() / g.g.norm() >= hub.radius {
            return Err(LatticeError::PlaneMissesSphere(hub.id.clone()));
        }
    }
    Ok(BeamQuador {
        h: s_a.subtract_square(&g_a),
        g_a,
        g_b,
        center_a: hub_a.center,
        center_b: hub_b.center,
        radius_a: hub_a.radius,
        radius_b: hub_b.radius,
    })
}

impl BeamQuador {
    pub fn length(&self) -> f64 {
        self.center_a.distance(self.center_b)
    }

    /// Unit vector from hub `a` to hub `b`.
    pub fn axis(&self) -> Vec3 {
        (self.center_b - self.center_a) / self.length()
    }

    /// Section radius at axial distance `s` from the centre of hub `a`, or
    /// `None` where the quador has no real section.
    ///
    /// On the section circle `S_a = s² + ρ² − r_a²` and `G_a = g₀ + λs`, so
    /// `H = 0` gives `ρ² = r_a² + (λs + g₀)² − s²`.
    pub fn radius(&self, s: f64) -> Option<f64> {
        let lambda = self.g_a.g.dot(self.axis());
        let g0 = self.g_a.eval(self.center_a);
        let rho2 = self.radius_a * self.radius_a + (lambda * s + g0).powi(2) - s * s;
        (rho2 >= 0.0).then(|| rho2.sqrt())
    }
}

/// A beam seen from one of its hubs.
#[derive(Debug, Clone, PartialEq)]
pub struct StubView {
    pub hub: String,
    pub beam: String,
    pub hub_center: Vec3,
    pub hub_radius: f64,
    /// Tangency plane at this hub, positive toward the far hub.
    pub g: LinearForm,
    /// `S_hub − G²`, exactly.
    pub h: Quadric,
    /// Unit vector toward the far hub.
    pub axis: Vec3,
}

impl StubView {
    pub fn sphere(&self) -> Quadric {
        Quadric::sphere(self.hub_center, self.hub_radius)
    }
}

/// One view per beam incident to `hub`, in beam order.
pub fn stub_views_at_hub(lattice: &Lattice, hub: &str) -> Result<Vec<StubView>, LatticeError> {
    let h = lattice.hub(hub)?;
    let sphere = sphere_quadric(h);
    lattice
        .beams_at(hub)
        .map(|beam| {
            let q = beam_quador(lattice.hub(&beam.hub_a)?, lattice.hub(&beam.hub_b)?, beam.k)?;
            let (g, far) = if beam.hub_a == hub { (q.g_a, q.center_b) } else { (q.g_b, q.center_a) };
            Ok(StubView {
                hub: hub.to_string(),
                beam: beam.id.clone(),
                hub_center: h.center,
                hub_radius: h.radius,
                g,
                h: sphere.subtract_square(&g),
                axis: (far - h.center).normalized().ok_or(LatticeError::CoincidentHubs)?,
            })
        })
        .collect()
}

/// Radius of the ball around a hub that bounds its fillets: the distance to
/// the nearest far hub times `multiplier`, or twice the hub radius when no
/// beam meets the hub.
pub fn locality_radius(lattice: &Lattice, hub: &str, multiplier: f64) -> f64 {
    let Ok(h) = lattice.hub(hub) else { return 0.0 };
    lattice
        .beams_at(hub)
        .filter_map(|b| lattice.hub(b.far_hub(hub)?).ok())
        .map(|far| far.center.distance(h.center) * multiplier)
        .reduce(f64::min)
        .unwrap_or(2.0 * h.radius)
}

/// `n` points on the tangency circle `{S = 0, G = 0}` of a stub.
pub fn tangency_circle(stub: &StubView, n: usize) -> Vec<Vec3> {
    let gn = stub.g.g.norm();
    let normal = stub.g.g / gn;
    let dist = stub.g.eval(stub.hub_center) / gn;
    let foot = stub.hub_center - normal * dist;
    let rho = (stub.hub_radius * stub.hub_radius - dist * dist).max(0.0).sqrt();
    let e1 = normal.cross(crate::algebra::least_aligned_axis(normal)).normalized().unwrap_or(Vec3::X);
    let e2 = normal.cross(e1);
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            foot + (e1 * t.cos() + e2 * t.sin()) * rho
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn hub(id: &str, x: f64, y: f64, r: f64) -> Hub {
        Hub::new(id, Vec3::new(x, y, 0.0), r)
    }

    #[test]
    fn sphere_examples() {
        let s = sphere_quadric(&hub("h", 0.0, 0.0, 1.0));
        assert_eq!(s.eval(Vec3::ZERO), -1.0);
        let h = hub("h", 4.0, 0.0, 2.0);
        let s = sphere_quadric(&h);
        assert_eq!(s.coefficients(), [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, -4.0, 0.0, 0.0, 12.0]);
        assert_eq!(s.eval(Vec3::new(6.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn symmetric_beam_is_a_cylinder() {
        let q = beam_quador(&hub("a", 0.0, 0.0, 1.0), &hub("b", 4.0, 0.0, 1.0), 4.0).unwrap();
        assert_eq!(q.h.coefficients(), [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(q.g_a, LinearForm::new(Vec3::X, 0.0));
        assert_eq!(q.g_b, LinearForm::new(-Vec3::X, 4.0));
        for s in [0.0, 1.0, 2.5, 4.0] {
            assert_eq!(q.radius(s), Some(1.0));
        }
    }

    #[test]
    fn asymmetric_beam_is_a_paraboloid() {
        let q = beam_quador(&hub("a", 0.0, 0.0, 1.0), &hub("b", 4.0, 0.0, 2.0), 4.0).unwrap();
        assert_eq!(q.g_a, LinearForm::new(Vec3::X, 0.375));
        assert_eq!(q.g_b, LinearForm::new(-Vec3::X, 29.0 / 8.0));
        let want = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0, -0.375, 0.0, 0.0, -73.0 / 64.0];
        assert_eq!(q.h.coefficients(), want);
        assert_relative_eq!(q.radius(0.0).unwrap(), 73.0_f64.sqrt() / 8.0, epsilon = 1e-15);
        assert_relative_eq!(q.radius(4.0).unwrap(), 4.140625_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn zero_k_is_rejected() {
        let r = beam_quador(&hub("a", 0.0, 0.0, 1.0), &hub("b", 4.0, 0.0, 1.0), 0.0);
        assert_eq!(r, Err(LatticeError::DegenerateK));
    }

    #[test]
    fn plane_missing_the_sphere() {
        // k far below the distance pushes the plane at `a` outside its sphere
        let r = beam_quador(&hub("a", 0.0, 0.0, 1.0), &hub("b", 4.0, 0.0, 1.0), 0.5);
        assert_eq!(r, Err(LatticeError::PlaneMissesSphere("a".into())));
    }

    #[test]
    fn radius_none_without_real_section() {
        // k > distance closes the quador into an ellipsoid
        let q = beam_quador(&hub("a", 0.0, 0.0, 1.0), &hub("b", 4.0, 0.0, 1.0), 4.5).unwrap();
        assert!(q.radius(2.0).is_some());
        assert!(q.radius(6.0).is_none());
    }

    fn two_beam() -> Lattice {
        Lattice {
            hubs: vec![hub("h0", 0.0, 0.0, 1.0), hub("h1", 4.0, 0.0, 1.0), hub("h2", 0.0, 4.0, 1.0), hub("lone", 9.0, 9.0, 1.0)],
            beams: vec![Beam::new("b0", "h0", "h1", 4.0), Beam::new("b1", "h0", "h2", 4.0)],
            fillets: vec![],
        }
    }

    #[test]
    fn stub_views() {
        let lat = two_beam();
        let views = stub_views_at_hub(&lat, "h0").unwrap();
        assert_eq!(views.len(), 2);
        assert_eq!(views[0].g, LinearForm::new(Vec3::X, 0.0));
        assert_eq!(views[1].g, LinearForm::new(Vec3::Y, 0.0));
        assert_eq!(views[0].axis, Vec3::X);
        assert!(stub_views_at_hub(&lat, "lone").unwrap().is_empty());
        assert_eq!(stub_views_at_hub(&lat, "nope"), Err(LatticeError::UnknownHub("nope".into())));
        // far-end view uses G_b
        let far = stub_views_at_hub(&lat, "h1").unwrap();
        assert_eq!(far[0].g, LinearForm::new(-Vec3::X, 4.0));
        assert_eq!(far[0].h, sphere_quadric(lat.hub("h1").unwrap()).subtract_square(&far[0].g));
    }

    #[test]
    fn sphere_stub_gradients_agree_on_the_circle() {
        let lat = two_beam();
        for hub in ["h0", "h1", "h2"] {
            for stub in stub_views_at_hub(&lat, hub).unwrap() {
                let s = stub.sphere();
                for p in tangency_circle(&stub, 32) {
                    let gs = s.gradient(p);
                    assert!((stub.h.gradient(p) - gs).norm() <= 1e-12 * gs.norm());
                }
            }
        }
    }
}
