//! Invariant checks over a lattice, collected into a JSON report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{LinearForm, Quadric, Vec3};
use crate::conics::Conic;
use crate::fillet::{build_fillet, fillet_min_curvature_radius, fillet_residual, planes_with, FilletPatch, IDENTITY_TOL};
use crate::lattice::{
    beam_quador, sphere_quadric, stub_views_at_hub, tangency_circle, validate_lattice, Lattice, StubView,
    ValidationIssue,
};
use crate::solid::{auto_bounds, build_assembly, field_value, Assembly};

/// β values used for the fan checks.
pub const BETA_GRID: [f64; 5] = [0.6, 0.8, 1.0, 1.25, 1.5];

pub const SURFACE_TOL: f64 = 1e-10;
pub const PLANE_TOL: f64 = 1e-12;
pub const ANGLE_TOL: f64 = 1e-7;
pub const GRADIENT_TOL: f64 = 1e-12;
/// Samples per tangency curve.
pub const CURVE_SAMPLES: usize = 32;
/// Random fillet configurations for the identity and residual checks.
pub const RANDOM_CONFIGS: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Boundary band for point classification.
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    /// Perturbs one coefficient of the first fillet quadric before checking.
    pub corrupt_fillet: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tol: 1e-9, samples: 10_000, seed: 0, corrupt_fillet: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Largest observed residual, where one applies.
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub warn: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub validation: Vec<ValidationIssue>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerifyReport {
    /// 0 when nothing failed, 1 on validation errors, 3 on a failed check.
    pub fn exit_code(&self) -> i32 {
        if self.validation.iter().any(|v| v.severity == crate::lattice::Severity::Error) {
            1
        } else if self.summary.fail > 0 {
            3
        } else {
            0
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn bounded(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        status: if measured <= tolerance { Status::Pass } else { Status::Fail },
        measured: Some(measured),
        tolerance: Some(tolerance),
        detail: detail.into(),
    }
}

/// Runs every check. Validation errors stop the run after validation.
pub fn verify_lattice(lattice: &Lattice, options: &VerifyOptions) -> VerifyReport {
    let validation = validate_lattice(lattice);
    let mut checks = Vec::new();
    if validation.is_clean() {
        match build_assembly(lattice) {
            Ok(mut assembly) => {
                if options.corrupt_fillet {
                    if let Some(f) = assembly.fillets.first_mut() {
                        corrupt(&mut f.patch);
                    }
                }
                run_checks(lattice, &assembly, options, &mut checks);
            }
            Err(e) => checks.push(Check {
                name: "assembly".into(),
                status: Status::Fail,
                measured: None,
                tolerance: None,
                detail: e.to_string(),
            }),
        }
    }
    let mut summary = Summary::default();
    for c in &checks {
        match c.status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Warn => summary.warn += 1,
        }
    }
    VerifyReport {
        seed: options.seed,
        samples: options.samples,
        tol: options.tol,
        validation: validation.entries,
        checks,
        summary,
    }
}

fn corrupt(patch: &mut FilletPatch) {
    let mut k = patch.q.coefficients();
    k[9] += 1e-6 * patch.q.max_coefficient().max(1.0);
    patch.q = Quadric::from_coefficients(k);
}

fn run_checks(lattice: &Lattice, assembly: &Assembly, options: &VerifyOptions, checks: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    // S_a − G_a² against S_b − G_b² for every beam
    let mut worst = 0.0_f64;
    for beam in &lattice.beams {
        let (a, b) = (lattice.hub(&beam.hub_a).unwrap(), lattice.hub(&beam.hub_b).unwrap());
        let q = beam_quador(a, b, beam.k).unwrap();
        let from_a = sphere_quadric(a).subtract_square(&q.g_a);
        let from_b = sphere_quadric(b).subtract_square(&q.g_b);
        worst = worst.max(from_a.relative_deviation(&from_b));
    }
    checks.push(bounded("two_sphere_tangency", worst, IDENTITY_TOL, format!("{} beams", lattice.beams.len())));

    // ∇H = ∇S on the tangency circles
    let mut worst = 0.0_f64;
    let mut count = 0;
    for hub in &lattice.hubs {
        for stub in stub_views_at_hub(lattice, &hub.id).unwrap() {
            let s = stub.sphere();
            for p in tangency_circle(&stub, CURVE_SAMPLES) {
                let gs = s.gradient(p);
                worst = worst.max((stub.h.gradient(p) - gs).norm() / gs.norm());
                count += 1;
            }
        }
    }
    checks.push(bounded("sphere_stub_gradient", worst, GRADIENT_TOL, format!("{count} circle points")));

    let patches: Vec<&FilletPatch> = assembly.fillets.iter().map(|f| &f.patch).collect();
    let mut worst = 0.0_f64;
    for p in &patches {
        worst = worst.max(p.identity_deviation());
    }
    let mut check = bounded("fillet_identity", worst, IDENTITY_TOL, format!("{} fillets", patches.len()));
    if check.status == Status::Fail {
        check.detail = format!("IDENTITY_VIOLATION: {}", check.detail);
    }
    checks.push(check);

    let configs: Vec<RandomConfig> = (0..RANDOM_CONFIGS).map(|_| RandomConfig::sample(&mut rng)).collect();
    let worst = configs.iter().map(RandomConfig::identity_deviation).fold(0.0, f64::max);
    checks.push(bounded(
        "fillet_identity_random",
        worst,
        IDENTITY_TOL,
        format!("{RANDOM_CONFIGS} random configurations"),
    ));

    let mut worst = 0.0_f64;
    for c in &configs {
        for t in [0.5, 2.0] {
            worst = worst.max(c.residual_law_deviation(t));
        }
    }
    for p in &patches {
        for t in [0.5, 2.0] {
            worst = worst.max(residual_law_deviation(&p.h1, &p.h2, &p.f_plus, &p.f_minus, p.alpha * t, p.beta));
        }
    }
    checks.push(bounded("residual_law", worst, IDENTITY_TOL, "alpha scaled by 0.5 and 2"));

    let mut tangency = TangencyStats::default();
    for p in &patches {
        tangency.add(p);
    }
    checks.push(bounded("conic_surface_residual", tangency.surface, SURFACE_TOL, "|H| and |Q| over value scale"));
    checks.push(bounded("conic_plane_residual", tangency.plane, PLANE_TOL, "|E| over value scale"));
    checks.push(bounded(
        "conic_gradient_angle",
        tangency.angle,
        ANGLE_TOL,
        format!("{} conic samples (radians)", tangency.points),
    ));

    checks.push(material_check(assembly, options, &mut rng));

    let chamfers: Vec<String> =
        patches.iter().filter(|p| p.is_chamfer()).map(|p| format!("{}:{}+{}", p.hub, p.beams.0, p.beams.1)).collect();
    if !chamfers.is_empty() {
        checks.push(Check {
            name: "chamfer_fillets".into(),
            status: Status::Warn,
            measured: None,
            tolerance: None,
            detail: format!("degenerate (chamfer): {}", chamfers.join(", ")),
        });
    }

    for spec in &lattice.fillets {
        let views = stub_views_at_hub(lattice, &spec.hub).unwrap();
        let pick = |id: &str| views.iter().find(|v| v.beam == id).unwrap();
        checks.extend(fan_checks(pick(&spec.beam_i), pick(&spec.beam_j), &format!("{}:{}+{}", spec.hub, spec.beam_i, spec.beam_j)));
    }
}

#[derive(Default)]
struct TangencyStats {
    surface: f64,
    plane: f64,
    angle: f64,
    points: usize,
}

impl TangencyStats {
    fn add(&mut self, p: &FilletPatch) {
        for (conic, h, e) in [(&p.conic1, &p.h1, &p.e1), (&p.conic2, &p.h2, &p.e2)] {
            self.add_curve(conic, h, &p.q, e);
        }
    }

    fn add_curve(&mut self, conic: &Conic, h: &Quadric, q: &Quadric, e: &LinearForm) {
        let Ok(samples) = conic.sample(CURVE_SAMPLES) else {
            self.surface = f64::INFINITY;
            return;
        };
        for x in samples.points() {
            let scale = h.value_scale(x).max(q.value_scale(x));
            self.surface = self.surface.max(h.eval(x).abs() / scale).max(q.eval(x).abs() / scale);
            let e_scale = (e.g.norm() * x.norm()).max(e.c0.abs()).max(1.0);
            self.plane = self.plane.max(e.eval(x).abs() / e_scale);
            self.angle = self.angle.max(q.gradient(x).angle_to(h.gradient(x)));
            self.points += 1;
        }
    }
}

fn material_check(assembly: &Assembly, options: &VerifyOptions, rng: &mut ChaCha8Rng) -> Check {
    let bare = assembly.without_fillets();
    let b = auto_bounds(assembly, 0.1);
    let mut lost = 0;
    let mut gained = 0;
    for _ in 0..options.samples {
        let x = Vec3::new(
            rng.gen_range(b.min.x..=b.max.x),
            rng.gen_range(b.min.y..=b.max.y),
            rng.gen_range(b.min.z..=b.max.z),
        );
        let (before, after) = (field_value(&bare, x), field_value(assembly, x));
        if before < -options.tol && after >= 0.0 {
            lost += 1;
        }
        if before > options.tol && after < -options.tol {
            gained += 1;
        }
    }
    Check {
        name: "material_monotonicity".into(),
        status: if lost == 0 { Status::Pass } else { Status::Fail },
        measured: Some(lost as f64),
        tolerance: Some(0.0),
        detail: format!("{} samples; {lost} lost, {gained} gained by fillets", options.samples),
    }
}

/// Identity, tangency and monotonicity across [`BETA_GRID`]. Extent must
/// be strictly monotone when every patch is bounded; curvature radius is
/// only reported.
fn fan_checks(s1: &StubView, s2: &StubView, subject: &str) -> Vec<Check> {
    let mut out = Vec::new();
    let mut extents = Vec::new();
    let mut radii = Vec::new();
    let mut worst_identity = 0.0_f64;
    let mut tangency = TangencyStats::default();
    for beta in BETA_GRID {
        match build_fillet(s1, s2, beta) {
            Ok(p) => {
                worst_identity = worst_identity.max(p.identity_deviation());
                tangency.add(&p);
                extents.push(p.extent.value());
                radii.push(fillet_min_curvature_radius(&p).ok());
            }
            Err(e) => {
                out.push(Check {
                    name: format!("fan[{subject}]"),
                    status: Status::Warn,
                    measured: None,
                    tolerance: None,
                    detail: format!("beta {beta}: {e}"),
                });
                return out;
            }
        }
    }
    let ok = worst_identity <= IDENTITY_TOL
        && tangency.surface <= SURFACE_TOL
        && tangency.plane <= PLANE_TOL
        && tangency.angle <= ANGLE_TOL;
    out.push(Check {
        name: format!("fan[{subject}]"),
        status: if ok { Status::Pass } else { Status::Fail },
        measured: Some(worst_identity.max(tangency.surface)),
        tolerance: Some(IDENTITY_TOL.max(SURFACE_TOL)),
        detail: format!("beta grid {BETA_GRID:?}; identity {worst_identity:e}, angle {:e}", tangency.angle),
    });

    let list = |v: &[Option<f64>]| v.iter().map(|x| x.map_or("unbounded".to_string(), |x| format!("{x:.6}"))).collect::<Vec<_>>().join(", ");
    let bounded_extents: Option<Vec<f64>> = extents.iter().copied().collect();
    out.push(match bounded_extents.as_deref().map(monotone_direction) {
        Some(Some(dir)) => Check {
            name: format!("extent_monotonicity[{subject}]"),
            status: Status::Pass,
            measured: None,
            tolerance: None,
            detail: format!("strictly {dir} in beta: {}", list(&extents)),
        },
        Some(None) => Check {
            name: format!("extent_monotonicity[{subject}]"),
            status: Status::Fail,
            measured: None,
            tolerance: None,
            detail: format!("not monotone: {}", list(&extents)),
        },
        None => Check {
            name: format!("extent_monotonicity[{subject}]"),
            status: Status::Warn,
            measured: None,
            tolerance: None,
            detail: format!("unbounded patches on the grid: {}", list(&extents)),
        },
    });

    let finite: Option<Vec<f64>> = radii.iter().copied().collect();
    let dir = finite.as_deref().and_then(monotone_direction);
    out.push(Check {
        name: format!("curvature_monotonicity[{subject}]"),
        status: if dir.is_some() { Status::Pass } else { Status::Warn },
        measured: None,
        tolerance: None,
        detail: match dir {
            Some(d) => format!("strictly {d} in beta: {}", list(&radii)),
            None => format!("not monotone: {}", list(&radii)),
        },
    });
    out
}

/// `Some("increasing")` / `Some("decreasing")` for strictly monotone
/// sequences.
pub fn monotone_direction(v: &[f64]) -> Option<&'static str> {
    if v.windows(2).all(|w| w[1] > w[0]) {
        Some("increasing")
    } else if v.windows(2).all(|w| w[1] < w[0]) {
        Some("decreasing")
    } else {
        None
    }
}

/// Deviation of `(H₁ − E₁²) − (H₂ − E₂²)` from `(1 − 4αβ)F₊F₋`.
pub fn residual_law_deviation(
    h1: &Quadric,
    h2: &Quadric,
    f_plus: &LinearForm,
    f_minus: &LinearForm,
    alpha: f64,
    beta: f64,
) -> f64 {
    let g1 = f_plus.sub(f_minus).scale(0.5);
    let g2 = f_plus.add(f_minus).scale(0.5);
    let planes = planes_with(&g1, &g2, alpha, beta);
    let residual = fillet_residual(h1, h2, &planes.e1, &planes.e2);
    let expected = f_plus.product(f_minus).scale(1.0 - 4.0 * alpha * beta);
    residual.relative_deviation(&expected)
}

/// A hub sphere with two stub planes that cut it, plus a β.
#[derive(Debug, Clone, Copy)]
pub struct RandomConfig {
    pub sphere: Quadric,
    pub g1: LinearForm,
    pub g2: LinearForm,
    pub beta: f64,
}

impl RandomConfig {
    /// Hub radius in `[0.5, 2]`, plane gradients of length `[0.5, 2]` at
    /// least ~6° apart, plane offsets inside the sphere, β in `[0.1, 2]`.
    pub fn sample(rng: &mut impl Rng) -> Self {
        let r = rng.gen_range(0.5..=2.0);
        let c = Vec3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let n1 = random_unit(rng);
        let n2 = loop {
            let n = random_unit(rng);
            if n.cross(n1).norm() > 0.1 {
                break n;
            }
        };
        let mut plane = |n: Vec3| {
            let lambda = rng.gen_range(0.5..=2.0);
            let d = rng.gen_range(-0.9..0.9) * r;
            // G(c) = −λd, so the plane sits at distance |d| < r from c
            LinearForm::new(n * lambda, -lambda * (n.dot(c) + d))
        };
        let (g1, g2) = (plane(n1), plane(n2));
        Self { sphere: Quadric::sphere(c, r), g1, g2, beta: rng.gen_range(0.1..=2.0) }
    }

    pub fn stubs(&self) -> (Quadric, Quadric) {
        (self.sphere.subtract_square(&self.g1), self.sphere.subtract_square(&self.g2))
    }

    pub fn identity_deviation(&self) -> f64 {
        let (h1, h2) = self.stubs();
        let p = planes_with(&self.g1, &self.g2, 1.0 / (4.0 * self.beta), self.beta);
        h1.subtract_square(&p.e1).relative_deviation(&h2.subtract_square(&p.e2))
    }

    /// Residual law with `α` scaled by `t`.
    pub fn residual_law_deviation(&self, t: f64) -> f64 {
        let (h1, h2) = self.stubs();
        let alpha = t / (4.0 * self.beta);
        residual_law_deviation(&h1, &h2, &self.g2.add(&self.g1), &self.g2.sub(&self.g1), alpha, self.beta)
    }
}

fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Beam, FilletSpec, Hub};

    fn fixture(beta: f64) -> Lattice {
        Lattice {
            hubs: vec![
                Hub::new("h0", Vec3::ZERO, 1.0),
                Hub::new("h1", Vec3::new(4.0, 0.0, 0.0), 1.0),
                Hub::new("h2", Vec3::new(0.0, 4.0, 0.0), 1.0),
            ],
            beams: vec![Beam::new("b0", "h0", "h1", 4.0), Beam::new("b1", "h0", "h2", 4.0)],
            fillets: vec![FilletSpec::new("h0", "b0", "b1", beta)],
        }
    }

    fn quick() -> VerifyOptions {
        VerifyOptions { samples: 2000, ..Default::default() }
    }

    #[test]
    fn fixture_passes() {
        let r = verify_lattice(&fixture(1.0), &quick());
        assert_eq!(r.exit_code(), 0, "{}", r.to_json());
        assert!(r.check("fillet_identity").unwrap().measured.unwrap() <= 1e-12);
        assert!(r.check("extent_monotonicity[h0:b0+b1]").unwrap().detail.contains("decreasing"));
    }

    #[test]
    fn corruption_fails() {
        let r = verify_lattice(&fixture(1.0), &VerifyOptions { corrupt_fillet: true, ..quick() });
        assert_eq!(r.exit_code(), 3);
        let c = r.check("fillet_identity").unwrap();
        assert_eq!(c.status, Status::Fail);
        assert!(c.detail.starts_with("IDENTITY_VIOLATION"));
    }

    #[test]
    fn invalid_lattice_exits_one() {
        let mut l = fixture(1.0);
        l.beams[0].k = 0.0;
        let r = verify_lattice(&l, &quick());
        assert_eq!(r.exit_code(), 1);
        assert!(r.checks.is_empty());
    }

    #[test]
    fn chamfer_is_flagged() {
        let r = verify_lattice(&fixture(0.5), &quick());
        assert_eq!(r.exit_code(), 0, "{}", r.to_json());
        assert!(r.check("chamfer_fillets").unwrap().detail.contains("chamfer"));
    }

    #[test]
    fn same_seed_same_report() {
        let a = verify_lattice(&fixture(1.0), &quick()).to_json();
        let b = verify_lattice(&fixture(1.0), &quick()).to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn monotone_directions() {
        assert_eq!(monotone_direction(&[1.0, 2.0, 3.0]), Some("increasing"));
        assert_eq!(monotone_direction(&[3.0, 2.0]), Some("decreasing"));
        assert_eq!(monotone_direction(&[1.0, 1.0]), None);
    }
}
