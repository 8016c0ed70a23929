//! Plane sections of quadrics.
//!
//! A plane `E = 0` is given a deterministic orthonormal frame; substituting
//! `x = o + s·u + t·v` into a quadric gives the exact 2D conic
//! `a s² + 2b st + c t² + 2d s + 2e t + f`, which is classified and
//! parametrized in closed form.

use std::f64::consts::TAU;
use std::fmt;

use crate::algebra::{least_aligned_axis, symmetric_eigen2, LinearForm, Quadric, SurfaceChart, Vec3};

/// Default relative zero threshold for conic classification.
pub const DEFAULT_CONIC_TOL: f64 = 1e-10;

/// Default half-range of the parameter used to sample unbounded conics.
pub const DEFAULT_UNBOUNDED_RANGE: f64 = 4.0;

/// Largest tolerated surface residual, relative to the value scale, for a
/// point handed to a chart inversion.
const ON_SURFACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ConicError {
    #[error("plane form has zero gradient")]
    ZeroGradient,
    #[error("all conic coefficients are zero")]
    AllZero,
    #[error("conic class {0} is not a curve")]
    NotACurve(ConicKind),
    #[error("sample {index} is not on the chart surface (residual {residual:e})")]
    PointOffSurface { index: usize, residual: f64 },
}

/// Orthonormal frame of a plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    /// Foot of the perpendicular from the global origin.
    pub origin: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl PlaneFrame {
    pub fn normal(&self) -> Vec3 {
        self.u.cross(self.v)
    }

    pub fn to_world(&self, s: f64, t: f64) -> Vec3 {
        self.origin + self.u * s + self.v * t
    }
}

/// Frame with `n = ∇E/|∇E|`, `u = n × e` for the coordinate axis `e` least
/// aligned with `n`, and `v = n × u`.
pub fn plane_frame(e: &LinearForm) -> Result<PlaneFrame, ConicError> {
    let g2 = e.g.norm_squared();
    if g2 == 0.0 || !g2.is_finite() {
        return Err(ConicError::ZeroGradient);
    }
    let n = e.g / g2.sqrt();
    let origin = e.g * (-e.c0 / g2);
    let u = n.cross(least_aligned_axis(n)).normalized().ok_or(ConicError::ZeroGradient)?;
    let v = n.cross(u);
    Ok(PlaneFrame { origin, u, v })
}

/// `a s² + 2b st + c t² + 2d s + 2e t + f`
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConicCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl ConicCoefficients {
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        self.a * s * s
            + 2.0 * self.b * s * t
            + self.c * t * t
            + 2.0 * self.d * s
            + 2.0 * self.e * t
            + self.f
    }

    pub fn max_abs(&self) -> f64 {
        [self.a, self.b, self.c, self.d, self.e, self.f]
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
            e: self.e * k,
            f: self.f * k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConicKind {
    Ellipse,
    Circle,
    Parabola,
    Hyperbola,
    ParallelLines,
    CrossingLines,
    SingleLine,
    Point,
    Empty,
}

impl ConicKind {
    pub fn name(self) -> &'static str {
        match self {
            ConicKind::Ellipse => "ELLIPSE",
            ConicKind::Circle => "CIRCLE",
            ConicKind::Parabola => "PARABOLA",
            ConicKind::Hyperbola => "HYPERBOLA",
            ConicKind::ParallelLines => "PARALLEL_LINES",
            ConicKind::CrossingLines => "CROSSING_LINES",
            ConicKind::SingleLine => "SINGLE_LINE",
            ConicKind::Point => "POINT",
            ConicKind::Empty => "EMPTY",
        }
    }

    /// Closed, bounded curves.
    pub fn is_compact(self) -> bool {
        matches!(self, ConicKind::Ellipse | ConicKind::Circle)
    }

    pub fn is_curve(self) -> bool {
        !matches!(self, ConicKind::Point | ConicKind::Empty)
    }
}

impl fmt::Display for ConicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed-form description of a conic in plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConicShape {
    /// `center + a cos θ · axes[0] + b sin θ · axes[1]`
    Ellipse { center: [f64; 2], axes: [[f64; 2]; 2], semi: [f64; 2] },
    /// `center ± a cosh τ · axes[0] + b sinh τ · axes[1]`
    Hyperbola { center: [f64; 2], axes: [[f64; 2]; 2], semi: [f64; 2] },
    /// `vertex + τ · tangent + p τ² · axis`
    Parabola { vertex: [f64; 2], tangent: [f64; 2], axis: [f64; 2], p: f64 },
    /// `center ± offset + τ · direction`
    ParallelLines { center: [f64; 2], direction: [f64; 2], offset: [f64; 2] },
    /// `center + τ · directions[i]`
    CrossingLines { center: [f64; 2], directions: [[f64; 2]; 2] },
    /// `point + τ · direction`
    SingleLine { point: [f64; 2], direction: [f64; 2] },
    Point { center: [f64; 2] },
    Empty,
}

/// A plane section of a quadric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    pub frame: PlaneFrame,
    pub coefficients: ConicCoefficients,
    pub kind: ConicKind,
    pub shape: ConicShape,
}

/// Substitutes the plane frame of `e` into `q`.
pub fn intersect_quadric_plane(q: &Quadric, e: &LinearForm) -> Result<Conic, ConicError> {
    let frame = plane_frame(e)?;
    let a = q.a();
    let o = frame.origin;
    let lin = a.mul_vec(o) + q.b;
    let coefficients = ConicCoefficients {
        a: a.bilinear(frame.u, frame.u),
        b: a.bilinear(frame.u, frame.v),
        c: a.bilinear(frame.v, frame.v),
        d: frame.u.dot(lin),
        e: frame.v.dot(lin),
        f: q.eval(o),
    };
    let (kind, shape) = analyze(&coefficients, DEFAULT_CONIC_TOL)?;
    Ok(Conic { frame, coefficients, kind, shape })
}

/// Discriminant/rank classification with relative zero threshold `tol`.
pub fn classify_conic(coefficients: &ConicCoefficients, tol: f64) -> Result<ConicKind, ConicError> {
    analyze(coefficients, tol).map(|(k, _)| k)
}

fn analyze(k: &ConicCoefficients, tol: f64) -> Result<(ConicKind, ConicShape), ConicError> {
    let m = k.max_abs();
    if m <= 1e-300 || !m.is_finite() {
        return Err(ConicError::AllZero);
    }
    let n = k.scaled(1.0 / m);
    let (l1, l2, theta) = symmetric_eigen2(n.a, n.b, n.c);
    let (cs, sn) = (theta.cos(), theta.sin());
    let e1 = [cs, sn];
    let e2 = [-sn, cs];
    // linear coefficients along the eigen-directions
    let d1 = n.d * cs + n.e * sn;
    let d2 = -n.d * sn + n.e * cs;
    let at = |x: f64, y: f64| [x * e1[0] + y * e2[0], x * e1[1] + y * e2[1]];

    let z1 = l1.abs() <= tol;
    let z2 = l2.abs() <= tol;

    let result = match (z1, z2) {
        (false, false) => {
            let (x0, y0) = (-d1 / l1, -d2 / l2);
            let center = at(x0, y0);
            let f_scale = 1.0_f64.max(d1 * d1 / l1.abs()).max(d2 * d2 / l2.abs());
            let mut fc = n.f - d1 * d1 / l1 - d2 * d2 / l2;
            if fc.abs() <= tol * f_scale {
                fc = 0.0;
            }
            if l1 * l2 > 0.0 {
                if fc == 0.0 {
                    (ConicKind::Point, ConicShape::Point { center })
                } else if fc * l1 > 0.0 {
                    (ConicKind::Empty, ConicShape::Empty)
                } else {
                    let semi = [(-fc / l1).sqrt(), (-fc / l2).sqrt()];
                    let kind = if (l1 - l2).abs() <= tol * l1.abs().max(l2.abs()) {
                        ConicKind::Circle
                    } else {
                        ConicKind::Ellipse
                    };
                    (kind, ConicShape::Ellipse { center, axes: [e1, e2], semi })
                }
            } else if fc == 0.0 {
                let slope = (-l1 / l2).sqrt();
                let norm = (1.0 + slope * slope).sqrt();
                let d_plus = at(1.0 / norm, slope / norm);
                let d_minus = at(1.0 / norm, -slope / norm);
                (ConicKind::CrossingLines, ConicShape::CrossingLines { center, directions: [d_plus, d_minus] })
            } else {
                let (main, other, lm, lo) = if -fc / l1 > 0.0 { (e1, e2, l1, l2) } else { (e2, e1, l2, l1) };
                let semi = [(-fc / lm).sqrt(), (fc / lo).sqrt()];
                (ConicKind::Hyperbola, ConicShape::Hyperbola { center, axes: [main, other], semi })
            }
        }
        (true, true) => {
            let g = d1.hypot(d2);
            if g <= tol {
                (ConicKind::Empty, ConicShape::Empty)
            } else {
                // 2d s + 2e t + f = 0
                let gn = n.d.hypot(n.e);
                let point = [-n.f * n.d / (2.0 * gn * gn), -n.f * n.e / (2.0 * gn * gn)];
                let direction = [-n.e / gn, n.d / gn];
                (ConicKind::SingleLine, ConicShape::SingleLine { point, direction })
            }
        }
        (nz1, _) => {
            // exactly one non-zero eigenvalue
            let (lam, dl, dz, el, ez) = if !nz1 { (l1, d1, d2, e1, e2) } else { (l2, d2, d1, e2, e1) };
            let along = |x: f64, y: f64| [x * el[0] + y * ez[0], x * el[1] + y * ez[1]];
            let x0 = -dl / lam;
            if dz.abs() > tol {
                // lam X² + 2 dl X + 2 dz Y + f = 0
                let y0 = -(n.f - dl * dl / lam) / (2.0 * dz);
                let vertex = along(x0, y0);
                let p = -lam / (2.0 * dz);
                (ConicKind::Parabola, ConicShape::Parabola { vertex, tangent: el, axis: ez, p })
            } else {
                let f_scale = 1.0_f64.max(dl * dl / lam.abs());
                let mut fc = n.f - dl * dl / lam;
                if fc.abs() <= tol * f_scale {
                    fc = 0.0;
                }
                // centre the lines on the point nearest the frame origin
                let center = along(x0, 0.0);
                if fc == 0.0 {
                    (ConicKind::SingleLine, ConicShape::SingleLine { point: center, direction: ez })
                } else if fc * lam > 0.0 {
                    (ConicKind::Empty, ConicShape::Empty)
                } else {
                    let w = (-fc / lam).sqrt();
                    (
                        ConicKind::ParallelLines,
                        ConicShape::ParallelLines { center, direction: ez, offset: [w * el[0], w * el[1]] },
                    )
                }
            }
        }
    };
    Ok(result)
}

/// Points of a sampled conic, one polyline per connected branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicSamples {
    pub branches: Vec<Vec<Vec3>>,
    /// Whether each branch is a closed loop (first point not repeated).
    pub closed: bool,
    /// Parameter interval used on every branch.
    pub parameter_range: (f64, f64),
}

impl ConicSamples {
    pub fn points(&self) -> Vec<Vec3> {
        self.branches.iter().flatten().copied().collect()
    }
}

impl Conic {
    /// 3D point from plane coordinates.
    pub fn point(&self, st: [f64; 2]) -> Vec3 {
        self.frame.to_world(st[0], st[1])
    }

    /// Samples with the default unbounded range.
    pub fn sample(&self, n: usize) -> Result<ConicSamples, ConicError> {
        self.sample_with_range(n, DEFAULT_UNBOUNDED_RANGE)
    }

    /// Ellipses by uniform angle; unbounded conics by a uniform parameter on
    /// `[−range, range]` per branch (two-branch curves split `n` evenly).
    pub fn sample_with_range(&self, n: usize, range: f64) -> Result<ConicSamples, ConicError> {
        let n = n.max(2);
        let uniform = |count: usize| -> Vec<f64> {
            if count == 1 {
                return vec![0.0];
            }
            (0..count).map(|i| -range + 2.0 * range * i as f64 / (count - 1) as f64).collect()
        };
        let lerp = |p: [f64; 2], d: [f64; 2], t: f64| [p[0] + t * d[0], p[1] + t * d[1]];
        let split = (n.div_ceil(2), n / 2);
        let open = |branches: Vec<Vec<Vec3>>| ConicSamples { branches, closed: false, parameter_range: (-range, range) };

        match self.shape {
            ConicShape::Ellipse { center, axes, semi } => {
                let pts = (0..n)
                    .map(|i| {
                        let th = TAU * i as f64 / n as f64;
                        let (c, s) = (semi[0] * th.cos(), semi[1] * th.sin());
                        self.point([
                            center[0] + c * axes[0][0] + s * axes[1][0],
                            center[1] + c * axes[0][1] + s * axes[1][1],
                        ])
                    })
                    .collect();
                Ok(ConicSamples { branches: vec![pts], closed: true, parameter_range: (0.0, TAU) })
            }
            ConicShape::Hyperbola { center, axes, semi } => {
                let branch = |sign: f64, count: usize| -> Vec<Vec3> {
                    uniform(count)
                        .into_iter()
                        .map(|t| {
                            let (c, s) = (sign * semi[0] * t.cosh(), semi[1] * t.sinh());
                            self.point([
                                center[0] + c * axes[0][0] + s * axes[1][0],
                                center[1] + c * axes[0][1] + s * axes[1][1],
                            ])
                        })
                        .collect()
                };
                Ok(open(vec![branch(1.0, split.0), branch(-1.0, split.1)]))
            }
            ConicShape::Parabola { vertex, tangent, axis, p } => {
                let pts = uniform(n)
                    .into_iter()
                    .map(|t| {
                        let q = p * t * t;
                        self.point([
                            vertex[0] + t * tangent[0] + q * axis[0],
                            vertex[1] + t * tangent[1] + q * axis[1],
                        ])
                    })
                    .collect();
                Ok(open(vec![pts]))
            }
            ConicShape::ParallelLines { center, direction, offset } => {
                let line = |sign: f64, count: usize| -> Vec<Vec3> {
                    let base = [center[0] + sign * offset[0], center[1] + sign * offset[1]];
                    uniform(count).into_iter().map(|t| self.point(lerp(base, direction, t))).collect()
                };
                Ok(open(vec![line(1.0, split.0), line(-1.0, split.1)]))
            }
            ConicShape::CrossingLines { center, directions } => {
                let line = |d: [f64; 2], count: usize| -> Vec<Vec3> {
                    uniform(count).into_iter().map(|t| self.point(lerp(center, d, t))).collect()
                };
                Ok(open(vec![line(directions[0], split.0), line(directions[1], split.1)]))
            }
            ConicShape::SingleLine { point, direction } => {
                Ok(open(vec![uniform(n).into_iter().map(|t| self.point(lerp(point, direction, t))).collect()]))
            }
            ConicShape::Point { .. } | ConicShape::Empty => Err(ConicError::NotACurve(self.kind)),
        }
    }

    /// The centre of an ellipse or circle in world coordinates.
    pub fn center(&self) -> Option<Vec3> {
        match self.shape {
            ConicShape::Ellipse { center, .. }
            | ConicShape::Hyperbola { center, .. }
            | ConicShape::CrossingLines { center, .. }
            | ConicShape::Point { center } => Some(self.point(center)),
            _ => None,
        }
    }

    /// Largest distance from `x` to a point of a compact conic, or `None`
    /// for unbounded (or empty) conics.
    ///
    /// The squared distance along an ellipse is a trigonometric polynomial
    /// of degree two; its maxima are bracketed on a dense angle grid and
    /// polished with Newton steps on the derivative.
    pub fn max_distance_from(&self, x: Vec3) -> Option<f64> {
        let ConicShape::Ellipse { center, axes, semi } = self.shape else {
            return None;
        };
        let c = self.point(center) - x;
        let a = (self.frame.u * axes[0][0] + self.frame.v * axes[0][1]) * semi[0];
        let b = (self.frame.u * axes[1][0] + self.frame.v * axes[1][1]) * semi[1];
        // |c + a cosθ + b sinθ|²
        let f = |t: f64| (c + a * t.cos() + b * t.sin()).norm_squared();
        let df = |t: f64| 2.0 * (c + a * t.cos() + b * t.sin()).dot(b * t.cos() - a * t.sin());
        let d2f = |t: f64| {
            let p = c + a * t.cos() + b * t.sin();
            let dp = b * t.cos() - a * t.sin();
            let ddp = -(a * t.cos() + b * t.sin());
            2.0 * (dp.dot(dp) + p.dot(ddp))
        };
        const GRID: usize = 720;
        let vals: Vec<f64> = (0..GRID).map(|i| f(TAU * i as f64 / GRID as f64)).collect();
        let mut best = vals.iter().copied().fold(0.0_f64, f64::max);
        for i in 0..GRID {
            let prev = vals[(i + GRID - 1) % GRID];
            let next = vals[(i + 1) % GRID];
            if vals[i] >= prev && vals[i] >= next {
                let mut t = TAU * i as f64 / GRID as f64;
                for _ in 0..50 {
                    let h = d2f(t);
                    if h >= 0.0 {
                        break;
                    }
                    let step = df(t) / h;
                    t -= step;
                    if step.abs() < 1e-15 {
                        break;
                    }
                }
                best = best.max(f(t));
            }
        }
        Some(best.sqrt())
    }
}

/// `n` samples of a conic that is a real curve.
pub fn sample_conic(conic: &Conic, n: usize) -> Result<Vec<Vec3>, ConicError> {
    conic.sample(n).map(|s| s.points())
}

/// Trimming curve of `conic` in the parameter space of `chart`.
///
/// Angular parameters are unwrapped so that consecutive samples never jump
/// by a full period.
pub fn pcurve(conic: &Conic, chart: &SurfaceChart, n: usize) -> Result<Vec<(f64, f64)>, ConicError> {
    let surface = chart.class.reconstruct();
    let points = sample_conic(conic, n)?;
    let domain = chart.domain();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for (index, p) in points.iter().enumerate() {
        let residual = surface.eval(*p).abs();
        if residual > ON_SURFACE_TOL * surface.value_scale(*p) {
            return Err(ConicError::PointOffSurface { index, residual });
        }
        let (mut u, mut v) = chart.inverse(*p);
        if let Some(&(pu, pv)) = out.last() {
            if domain.u_periodic {
                u += TAU * ((pu - u) / TAU).round();
            }
            if domain.v_periodic {
                v += TAU * ((pv - v) / TAU).round();
            }
        }
        out.push((u, v));
    }
    Ok(out)
}
