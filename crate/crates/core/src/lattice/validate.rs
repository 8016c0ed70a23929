use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{beam_quador, locality_radius, stub_views_at_hub, Lattice, LatticeError};
use crate::algebra::Vec3;
use crate::fillet::{build_fillet, FilletPatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    DuplicateId,
    UnknownHub,
    UnknownBeam,
    NonPositiveRadius,
    NonFinite,
    SameHub,
    DegenerateK,
    PlaneMissesSphere,
    FilletPairMismatch,
    FilletSameBeam,
    NonPositiveBeta,
    FilletConstruction,
    OverlappingHubs,
    FilletWedgeOverlap,
    FilletActiveAtLocality,
    Chamfer,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::DuplicateId => "DUPLICATE_ID",
            IssueCode::UnknownHub => "UNKNOWN_HUB",
            IssueCode::UnknownBeam => "UNKNOWN_BEAM",
            IssueCode::NonPositiveRadius => "NON_POSITIVE_RADIUS",
            IssueCode::NonFinite => "NON_FINITE",
            IssueCode::SameHub => "SAME_HUB",
            IssueCode::DegenerateK => "DEGENERATE_K",
            IssueCode::PlaneMissesSphere => "PLANE_MISSES_SPHERE",
            IssueCode::FilletPairMismatch => "FILLET_PAIR_MISMATCH",
            IssueCode::FilletSameBeam => "FILLET_SAME_BEAM",
            IssueCode::NonPositiveBeta => "NON_POSITIVE_BETA",
            IssueCode::FilletConstruction => "FILLET_CONSTRUCTION",
            IssueCode::OverlappingHubs => "OVERLAPPING_HUBS",
            IssueCode::FilletWedgeOverlap => "FILLET_WEDGE_OVERLAP",
            IssueCode::FilletActiveAtLocality => "FILLET_ACTIVE_AT_LOCALITY",
            IssueCode::Chamfer => "CHAMFER",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: IssueCode,
    /// Id of the offending item (`hub`, `beam` or `hub:beam_i+beam_j`).
    pub subject: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev} {} [{}]: {}", self.code, self.subject, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationIssue>,
}

impl ValidationReport {
    /// No error entries (warnings are allowed).
    pub fn is_clean(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.entries.iter().filter(|e| e.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.entries.iter().filter(|e| e.severity == Severity::Warning)
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.entries.iter().any(|e| e.code == code)
    }

    fn push(&mut self, severity: Severity, code: IssueCode, subject: impl Into<String>, message: impl Into<String>) {
        self.entries.push(ValidationIssue { severity, code, subject: subject.into(), message: message.into() });
    }

    fn error(&mut self, code: IssueCode, subject: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, code, subject, message);
    }

    fn warn(&mut self, code: IssueCode, subject: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Warning, code, subject, message);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Points on the sphere used by the sampled checks.
const SHELL_SAMPLES: usize = 2000;

/// Checks ids, references, parameter ranges and that every beam and fillet
/// can be built. Geometry that is legal but suspicious becomes a warning.
pub fn validate_lattice(lattice: &Lattice) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = HashSet::new();
    for hub in &lattice.hubs {
        if !seen.insert(hub.id.as_str()) {
            report.error(IssueCode::DuplicateId, &hub.id, format!("hub id `{}` is used more than once", hub.id));
        }
        if !(hub.center.is_finite() && hub.radius.is_finite()) {
            report.error(IssueCode::NonFinite, &hub.id, "hub centre or radius is not finite");
        } else if hub.radius <= 0.0 {
            report.error(
                IssueCode::NonPositiveRadius,
                &hub.id,
                format!("hub `{}` has radius {} (must be positive)", hub.id, hub.radius),
            );
        }
    }
    let mut seen = HashSet::new();
    for beam in &lattice.beams {
        if !seen.insert(beam.id.as_str()) {
            report.error(IssueCode::DuplicateId, &beam.id, format!("beam id `{}` is used more than once", beam.id));
        }
    }

    let hub_ok = |id: &str| {
        lattice.hubs.iter().filter(|h| h.id == id).count() == 1
            && lattice.hub(id).map(|h| h.radius > 0.0 && h.radius.is_finite() && h.center.is_finite()).unwrap_or(false)
    };

    let mut good_beams = HashSet::new();
    for beam in &lattice.beams {
        let mut ok = true;
        for end in [&beam.hub_a, &beam.hub_b] {
            if lattice.hub(end).is_err() {
                report.error(IssueCode::UnknownHub, &beam.id, format!("beam `{}` references unknown hub `{end}`", beam.id));
                ok = false;
            } else if !hub_ok(end) {
                ok = false;
            }
        }
        if !beam.k.is_finite() {
            report.error(IssueCode::NonFinite, &beam.id, "beam parameter k is not finite");
            ok = false;
        }
        if beam.hub_a == beam.hub_b {
            report.error(IssueCode::SameHub, &beam.id, format!("beam `{}` connects hub `{}` to itself", beam.id, beam.hub_a));
            ok = false;
        }
        if !ok {
            continue;
        }
        let (a, b) = (lattice.hub(&beam.hub_a).unwrap(), lattice.hub(&beam.hub_b).unwrap());
        match beam_quador(a, b, beam.k) {
            Ok(_) => {
                good_beams.insert(beam.id.as_str());
            }
            Err(LatticeError::DegenerateK) => {
                report.error(IssueCode::DegenerateK, &beam.id, format!("beam `{}` has k = 0", beam.id))
            }
            Err(LatticeError::CoincidentHubs) => report.error(
                IssueCode::SameHub,
                &beam.id,
                format!("beam `{}` joins hubs with the same centre", beam.id),
            ),
            Err(LatticeError::PlaneMissesSphere(h)) => report.error(
                IssueCode::PlaneMissesSphere,
                &beam.id,
                format!("with k = {} the tangency plane of beam `{}` misses hub `{h}`", beam.k, beam.id),
            ),
            Err(e) => report.error(IssueCode::SameHub, &beam.id, e.to_string()),
        }
    }

    for (i, a) in lattice.hubs.iter().enumerate() {
        for b in &lattice.hubs[i + 1..] {
            if hub_ok(&a.id) && hub_ok(&b.id) && a.center.distance(b.center) < a.radius + b.radius {
                report.warn(
                    IssueCode::OverlappingHubs,
                    format!("{}+{}", a.id, b.id),
                    format!("hub spheres `{}` and `{}` overlap", a.id, b.id),
                );
            }
        }
    }

    let mut patches: BTreeMap<&str, Vec<FilletPatch>> = BTreeMap::new();
    for spec in &lattice.fillets {
        let subject = format!("{}:{}+{}", spec.hub, spec.beam_i, spec.beam_j);
        let mut ok = true;
        if lattice.hub(&spec.hub).is_err() {
            report.error(IssueCode::UnknownHub, &subject, format!("fillet references unknown hub `{}`", spec.hub));
            ok = false;
        }
        for id in [&spec.beam_i, &spec.beam_j] {
            match lattice.beam(id) {
                Err(_) => {
                    report.error(IssueCode::UnknownBeam, &subject, format!("fillet references unknown beam `{id}`"));
                    ok = false;
                }
                Ok(b) if !b.touches(&spec.hub) => {
                    report.error(
                        IssueCode::FilletPairMismatch,
                        &subject,
                        format!("beam `{id}` does not meet hub `{}`", spec.hub),
                    );
                    ok = false;
                }
                Ok(_) => ok &= good_beams.contains(id.as_str()),
            }
        }
        if spec.beam_i == spec.beam_j {
            report.error(IssueCode::FilletSameBeam, &subject, "fillet names the same beam twice");
            ok = false;
        }
        if !spec.beta.is_finite() {
            report.error(IssueCode::NonFinite, &subject, "fillet beta is not finite");
            ok = false;
        } else if spec.beta <= 0.0 {
            report.error(IssueCode::NonPositiveBeta, &subject, format!("beta = {} (must be positive)", spec.beta));
            ok = false;
        }
        if !ok {
            continue;
        }
        let views = match stub_views_at_hub(lattice, &spec.hub) {
            Ok(v) => v,
            Err(e) => {
                report.error(IssueCode::FilletConstruction, &subject, e.to_string());
                continue;
            }
        };
        let find = |id: &str| views.iter().find(|v| v.beam == id).unwrap();
        match build_fillet(find(&spec.beam_i), find(&spec.beam_j), spec.beta) {
            Ok(patch) => {
                if patch.is_chamfer() {
                    report.warn(IssueCode::Chamfer, &subject, "fillet quadric is a plane pair (chamfer)");
                }
                let rho = locality_radius(lattice, &spec.hub, 1.0);
                if active_at_locality(&patch, rho) {
                    report.warn(
                        IssueCode::FilletActiveAtLocality,
                        &subject,
                        format!("fillet surface is still active at the locality radius {rho}"),
                    );
                }
                patches.entry(spec.hub.as_str()).or_default().push(patch);
            }
            Err(e) => report.error(IssueCode::FilletConstruction, &subject, e.to_string()),
        }
    }

    for (hub, list) in &patches {
        let rho = locality_radius(lattice, hub, 1.0);
        for (i, p) in list.iter().enumerate() {
            for q in &list[i + 1..] {
                if wedges_overlap(p, q, rho) {
                    report.warn(
                        IssueCode::FilletWedgeOverlap,
                        *hub,
                        format!(
                            "fillets {}+{} and {}+{} share material at hub `{hub}`",
                            p.beams.0, p.beams.1, q.beams.0, q.beams.1
                        ),
                    );
                }
            }
        }
    }
    report
}

/// Roughly uniform unit vectors (golden-angle spiral).
pub(crate) fn sphere_directions(n: usize) -> impl Iterator<Item = Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..n).map(move |i| {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let r = (1.0 - z * z).sqrt();
        let t = golden * i as f64;
        Vec3::new(r * t.cos(), r * t.sin(), z)
    })
}

fn wedge_value(p: &FilletPatch, x: Vec3) -> f64 {
    p.q.eval(x).max(-p.e1.eval(x)).max(-p.e2.eval(x))
}

fn active_at_locality(p: &FilletPatch, rho: f64) -> bool {
    sphere_directions(SHELL_SAMPLES).any(|d| wedge_value(p, p.hub_center + d * rho) < 0.0)
}

fn wedges_overlap(p: &FilletPatch, q: &FilletPatch, rho: f64) -> bool {
    let c = p.hub_center;
    let r0 = p.hub_radius;
    (1..=8).any(|shell| {
        let r = r0 + (rho - r0) * shell as f64 / 9.0;
        sphere_directions(SHELL_SAMPLES / 4).any(|d| {
            let x = c + d * r;
            wedge_value(p, x) < 0.0 && wedge_value(q, x) < 0.0
        })
    })
}
