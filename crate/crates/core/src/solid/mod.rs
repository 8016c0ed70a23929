//! The filleted lattice as a solid: a min/max field over hub, beam and
//! fillet parts, point classification, bounds and polygonization.

mod mesh;

pub use mesh::{marching_cubes, marching_cubes_fn, Mesh, MeshError};

use std::fmt;

use serde::Serialize;

use crate::algebra::{Quadric, Vec3};
use crate::fillet::{build_fillet, Extent, FilletError, FilletPatch};
use crate::lattice::{
    locality_radius, sphere_directions, sphere_quadric, stub_views_at_hub, validate_lattice, BeamQuador,
    Lattice, LatticeError, ValidationReport,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolidError {
    #[error("lattice failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("fillet at hub `{hub}`: {source}")]
    Fillet { hub: String, source: FilletError },
    #[error("locality radius {rho} of hub `{hub}` does not exceed its radius {radius}")]
    LocalityTooSmall { hub: String, rho: f64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Scales the distance to the nearest neighbouring hub to give the
    /// radius of the ball that clips each hub's fillets.
    pub locality_multiplier: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self { locality_multiplier: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HubPart {
    pub id: String,
    pub center: Vec3,
    pub radius: f64,
    pub sphere: Quadric,
    pub locality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamPart {
    pub id: String,
    pub quador: BeamQuador,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilletPart {
    pub patch: FilletPatch,
    pub locality: f64,
}

impl HubPart {
    pub fn value(&self, x: Vec3) -> f64 {
        self.sphere.eval(x)
    }
}

impl BeamPart {
    /// The quador clipped to the slab between its tangency planes.
    pub fn value(&self, x: Vec3) -> f64 {
        let q = &self.quador;
        q.h.eval(x).max(-q.g_a.eval(x)).max(-q.g_b.eval(x))
    }
}

impl FilletPart {
    /// The fillet quadric clipped to its wedge and the hub's locality ball.
    pub fn value(&self, x: Vec3) -> f64 {
        let p = &self.patch;
        let loc = (x - p.hub_center).norm_squared() - self.locality * self.locality;
        p.q.eval(x).max(-p.e1.eval(x)).max(-p.e2.eval(x)).max(loc)
    }

    pub fn label(&self) -> RegionLabel {
        RegionLabel::Fillet {
            hub: self.patch.hub.clone(),
            beams: (self.patch.beams.0.clone(), self.patch.beams.1.clone()),
        }
    }
}

/// Every part of a lattice, ready for evaluation. Parts are kept sorted by
/// id within each kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Assembly {
    pub hubs: Vec<HubPart>,
    pub beams: Vec<BeamPart>,
    pub fillets: Vec<FilletPart>,
}

pub fn build_assembly(lattice: &Lattice) -> Result<Assembly, SolidError> {
    build_assembly_with(lattice, AssemblyOptions::default())
}

pub fn build_assembly_with(lattice: &Lattice, options: AssemblyOptions) -> Result<Assembly, SolidError> {
    let report = validate_lattice(lattice);
    if !report.is_clean() {
        return Err(SolidError::Invalid(report));
    }
    let mut hubs = Vec::with_capacity(lattice.hubs.len());
    for h in &lattice.hubs {
        let rho = locality_radius(lattice, &h.id, options.locality_multiplier);
        if !(rho > h.radius) {
            return Err(SolidError::LocalityTooSmall { hub: h.id.clone(), rho, radius: h.radius });
        }
        hubs.push(HubPart { id: h.id.clone(), center: h.center, radius: h.radius, sphere: sphere_quadric(h), locality: rho });
    }
    let beams = lattice
        .beams
        .iter()
        .map(|b| Ok(BeamPart { id: b.id.clone(), quador: lattice.beam_quador(&b.id)? }))
        .collect::<Result<Vec<_>, SolidError>>()?;
    let mut fillets = Vec::with_capacity(lattice.fillets.len());
    for spec in &lattice.fillets {
        let views = stub_views_at_hub(lattice, &spec.hub)?;
        let pick = |id: &str| views.iter().find(|v| v.beam == id).ok_or_else(|| LatticeError::UnknownBeam(id.into()));
        let patch = build_fillet(pick(&spec.beam_i)?, pick(&spec.beam_j)?, spec.beta)
            .map_err(|source| SolidError::Fillet { hub: spec.hub.clone(), source })?;
        let locality = hubs.iter().find(|h| h.id == spec.hub).map(|h| h.locality).unwrap_or(0.0);
        fillets.push(FilletPart { patch, locality });
    }
    hubs.sort_by(|a, b| a.id.cmp(&b.id));
    let mut beams = beams;
    beams.sort_by(|a, b| a.id.cmp(&b.id));
    fillets.sort_by_key(|f| f.label().to_string());
    Ok(Assembly { hubs, beams, fillets })
}

impl Assembly {
    /// Evaluates every part in tie-break order: hubs, beams, fillets.
    fn parts(&self, x: Vec3) -> impl Iterator<Item = (PartRef, f64)> + '_ {
        let hubs = self.hubs.iter().enumerate().map(move |(i, h)| (PartRef::Hub(i), h.value(x)));
        let beams = self.beams.iter().enumerate().map(move |(i, b)| (PartRef::Beam(i), b.value(x)));
        let fillets = self.fillets.iter().enumerate().map(move |(i, f)| (PartRef::Fillet(i), f.value(x)));
        hubs.chain(beams).chain(fillets)
    }

    fn label_of(&self, part: PartRef) -> RegionLabel {
        match part {
            PartRef::Hub(i) => RegionLabel::Hub(self.hubs[i].id.clone()),
            PartRef::Beam(i) => RegionLabel::Beam(self.beams[i].id.clone()),
            PartRef::Fillet(i) => self.fillets[i].label(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.hubs.is_empty() && self.beams.is_empty() && self.fillets.is_empty()
    }

    /// The same assembly without fillet parts.
    pub fn without_fillets(&self) -> Assembly {
        Assembly { hubs: self.hubs.clone(), beams: self.beams.clone(), fillets: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy)]
enum PartRef {
    Hub(usize),
    Beam(usize),
    Fillet(usize),
}

/// Minimum over all parts: negative inside the solid. An empty assembly is
/// `+∞` everywhere.
pub fn field_value(assembly: &Assembly, x: Vec3) -> f64 {
    assembly.parts(x).map(|(_, v)| v).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionLabel {
    Hub(String),
    Beam(String),
    Fillet { hub: String, beams: (String, String) },
    Outside,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionLabel::Hub(id) => write!(f, "HUB({id})"),
            RegionLabel::Beam(id) => write!(f, "BEAM({id})"),
            RegionLabel::Fillet { hub, beams } => write!(f, "FILLET({hub}:{}+{})", beams.0, beams.1),
            RegionLabel::Outside => f.write_str("OUTSIDE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointState {
    Inside,
    Outside,
    Boundary,
}

impl PointState {
    pub fn as_str(self) -> &'static str {
        match self {
            PointState::Inside => "inside",
            PointState::Outside => "outside",
            PointState::Boundary => "boundary",
        }
    }
}

impl fmt::Display for PointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointClass {
    pub state: PointState,
    pub label: RegionLabel,
    pub value: f64,
}

/// Classifies `x` by the sign of the field; `|f| ≤ tol` is the boundary.
/// The label names the part attaining the minimum, ties going to hubs, then
/// beams, then fillets, each by id. Outside points are labelled `OUTSIDE`.
pub fn classify_point(assembly: &Assembly, x: Vec3, tol: f64) -> PointClass {
    let mut best: Option<(PartRef, f64)> = None;
    for (part, v) in assembly.parts(x) {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((part, v));
        }
    }
    let value = best.map_or(f64::INFINITY, |(_, v)| v);
    let state = if value.abs() <= tol {
        PointState::Boundary
    } else if value < 0.0 {
        PointState::Inside
    } else {
        PointState::Outside
    };
    let label = match (state, best) {
        (PointState::Outside, _) | (_, None) => RegionLabel::Outside,
        (_, Some((part, _))) => assembly.label_of(part),
    };
    PointClass { state, label, value }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl Bounds {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    fn empty() -> Self {
        let inf = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        Self { min: inf, max: -inf }
    }

    pub fn size(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.size().norm()
    }

    pub fn contains(&self, x: Vec3) -> bool {
        (0..3).all(|i| x[i] >= self.min[i] && x[i] <= self.max[i])
    }

    pub fn include_point(&mut self, p: Vec3) {
        self.min = self.min.component_min(p);
        self.max = self.max.component_max(p);
    }

    pub fn include_ball(&mut self, c: Vec3, r: f64) {
        let d = Vec3::new(r, r, r);
        self.include_point(c - d);
        self.include_point(c + d);
    }

    pub fn inflate(&self, pad: f64) -> Bounds {
        let d = Vec3::new(pad, pad, pad);
        Bounds { min: self.min - d, max: self.max + d }
    }

    /// Finite with positive extent on every axis.
    pub fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && (0..3).all(|i| self.max[i] > self.min[i])
    }
}

/// Stations per beam when sizing its swept disc.
const BEAM_STATIONS: usize = 33;
/// Steps along each ray when sampling a fillet part.
const FILLET_RAY_STEPS: usize = 200;
const FILLET_RAYS: usize = 2000;

/// A box around the solid, padded by `margin` times the largest hub or
/// beam radius. Covers the hub spheres, each beam's swept disc (radius taken
/// as the largest section over 33 stations) and the sampled extent of each
/// fillet part. An empty assembly gives the unit box.
pub fn auto_bounds(assembly: &Assembly, margin: f64) -> Bounds {
    if assembly.is_empty() {
        return Bounds::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0));
    }
    let mut b = Bounds::empty();
    let mut largest: f64 = 0.0;
    for h in &assembly.hubs {
        b.include_ball(h.center, h.radius);
        largest = largest.max(h.radius);
    }
    for beam in &assembly.beams {
        let q = &beam.quador;
        let len = q.length();
        let rho = (0..BEAM_STATIONS)
            .filter_map(|i| q.radius(len * i as f64 / (BEAM_STATIONS - 1) as f64))
            .fold(0.0, f64::max);
        largest = largest.max(rho);
        let axis = q.axis();
        // extent of a disc of radius ρ normal to `axis`, per coordinate
        let ext = Vec3::new(
            rho * (1.0 - axis.x * axis.x).max(0.0).sqrt(),
            rho * (1.0 - axis.y * axis.y).max(0.0).sqrt(),
            rho * (1.0 - axis.z * axis.z).max(0.0).sqrt(),
        );
        for c in [q.center_a, q.center_b] {
            b.include_point(c - ext);
            b.include_point(c + ext);
        }
    }
    for f in &assembly.fillets {
        include_fillet(&mut b, f);
    }
    b.inflate(margin * largest)
}

fn include_fillet(b: &mut Bounds, f: &FilletPart) {
    let c = f.patch.hub_center;
    let reach = match f.patch.extent {
        Extent::Bounded(e) => f.locality.min(e * 2.0),
        Extent::Unbounded => f.locality,
    };
    let step = reach / FILLET_RAY_STEPS as f64;
    for d in sphere_directions(FILLET_RAYS) {
        let far = (1..=FILLET_RAY_STEPS).rev().map(|i| i as f64 * step).find(|&t| f.value(c + d * t) < 0.0);
        if let Some(t) = far {
            b.include_point(c + d * (t + step).min(reach));
        }
    }
}
