//! Closed-form parametrizations of non-degenerate quadrics.
//!
//! Each chart works in the canonical frame of [`QuadricClass`]; `forward`
//! maps parameters to world points and `inverse` maps on-surface world
//! points back to parameters. Two-component surfaces (hyperbolic cylinder,
//! two-sheeted hyperboloid) use secant/tangent forms so that a single
//! parameter interval covers both components.

use std::f64::consts::{FRAC_PI_2, PI};

use super::classify::{QuadricClass, QuadricKind};
use super::forms::Quadric;
use super::vec3::Vec3;
use super::AlgebraError;

/// Parameter ranges of a chart. Unbounded directions use infinities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDomain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub u_periodic: bool,
    pub v_periodic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// `(a cos u cos v, b sin u cos v, c sin v)`
    Ellipsoid { semi: [f64; 3] },
    /// `(a cosh v cos u, b cosh v sin u, c sinh v)` on axes `(p1, p2, n)`
    OneSheet { axes: [usize; 3], semi: [f64; 3] },
    /// `(a tan v cos u, b tan v sin u, c sec v)`; `v < π/2` is one sheet, `v > π/2` the other
    TwoSheets { axes: [usize; 3], semi: [f64; 3] },
    /// `(v cos u / √λ₁, v sin u / √λ₂, −v²/2μ)` on axes `(p1, p2, k)`
    EllipticParaboloid { axes: [usize; 3], inv_sqrt: [f64; 2], mu: f64 },
    /// `(u, v, −(λ₁u² + λ₂v²)/2μ)`
    HyperbolicParaboloid { axes: [usize; 3], lambda: [f64; 2], mu: f64 },
    /// `(a cos u, b sin u, v)`
    EllipticCylinder { axes: [usize; 3], semi: [f64; 2] },
    /// `(a sec u, b tan u, v)`; the two branches are `|u| < π/2` and `|u − π| < π/2`
    HyperbolicCylinder { axes: [usize; 3], semi: [f64; 2] },
    /// `(u, −λu²/2μ, v)` on axes `(p, k, other)`
    ParabolicCylinder { axes: [usize; 3], lambda: f64, mu: f64 },
    /// `(v s₁ cos u, v s₂ sin u, v)` on axes `(p1, p2, n)`
    Cone { axes: [usize; 3], slope: [f64; 2] },
}

/// A parametrization of one quadric surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceChart {
    pub class: QuadricClass,
    shape: Shape,
}

/// Standard chart for a regular quadric surface.
pub fn parametrize(q: &Quadric, class: &QuadricClass) -> Result<SurfaceChart, AlgebraError> {
    debug_assert!(class.reconstruct().relative_deviation(q) <= 1e-6);
    let d = class.diagonal;
    let sigma = class.orientation();
    let kappa = sigma * class.constant;
    let nz = class.nonzero_axes();
    let pos: Vec<usize> = (0..3).filter(|&i| sigma * d[i] > 0.0).collect();
    let neg: Vec<usize> = (0..3).filter(|&i| sigma * d[i] < 0.0).collect();
    let zero: Vec<usize> = (0..3).filter(|&i| d[i] == 0.0).collect();
    let lam = |i: usize| sigma * d[i];

    let shape = match class.kind {
        QuadricKind::Ellipsoid => Shape::Ellipsoid {
            semi: [0, 1, 2].map(|i| (-kappa / lam(i)).sqrt()),
        },
        QuadricKind::HyperboloidOneSheet => {
            let axes = [pos[0], pos[1], neg[0]];
            Shape::OneSheet {
                axes,
                semi: [
                    (-kappa / lam(axes[0])).sqrt(),
                    (-kappa / lam(axes[1])).sqrt(),
                    (kappa / lam(axes[2])).sqrt(),
                ],
            }
        }
        QuadricKind::HyperboloidTwoSheets => {
            let axes = [pos[0], pos[1], neg[0]];
            Shape::TwoSheets {
                axes,
                semi: [
                    (kappa / lam(axes[0])).sqrt(),
                    (kappa / lam(axes[1])).sqrt(),
                    (-kappa / lam(axes[2])).sqrt(),
                ],
            }
        }
        QuadricKind::EllipticParaboloid => {
            let k = class.linear_axis.ok_or(AlgebraError::UnsupportedClass(class.kind))?;
            Shape::EllipticParaboloid {
                axes: [nz[0], nz[1], k],
                inv_sqrt: [1.0 / lam(nz[0]).sqrt(), 1.0 / lam(nz[1]).sqrt()],
                mu: sigma * class.linear,
            }
        }
        QuadricKind::HyperbolicParaboloid => {
            let k = class.linear_axis.ok_or(AlgebraError::UnsupportedClass(class.kind))?;
            Shape::HyperbolicParaboloid {
                axes: [nz[0], nz[1], k],
                lambda: [d[nz[0]], d[nz[1]]],
                mu: class.linear,
            }
        }
        QuadricKind::EllipticCylinder => {
            let axes = [nz[0], nz[1], zero[0]];
            Shape::EllipticCylinder {
                axes,
                semi: [(-kappa / lam(axes[0])).sqrt(), (-kappa / lam(axes[1])).sqrt()],
            }
        }
        QuadricKind::HyperbolicCylinder => {
            // the secant axis is the one where −κ/λ > 0
            let (main, other) = if -class.constant / d[nz[0]] > 0.0 {
                (nz[0], nz[1])
            } else {
                (nz[1], nz[0])
            };
            Shape::HyperbolicCylinder {
                axes: [main, other, zero[0]],
                semi: [
                    (-class.constant / d[main]).sqrt(),
                    (class.constant / d[other]).sqrt(),
                ],
            }
        }
        QuadricKind::ParabolicCylinder => {
            let k = class.linear_axis.ok_or(AlgebraError::UnsupportedClass(class.kind))?;
            let p = nz[0];
            let other = 3 - p - k;
            Shape::ParabolicCylinder { axes: [p, k, other], lambda: d[p], mu: class.linear }
        }
        QuadricKind::Cone => {
            let axes = [pos[0], pos[1], neg[0]];
            Shape::Cone {
                axes,
                slope: [
                    (-lam(axes[2]) / lam(axes[0])).sqrt(),
                    (-lam(axes[2]) / lam(axes[1])).sqrt(),
                ],
            }
        }
        kind => return Err(AlgebraError::UnsupportedClass(kind)),
    };
    Ok(SurfaceChart { class: *class, shape })
}

fn place(axes: [usize; 3], vals: [f64; 3]) -> Vec3 {
    let mut y = [0.0; 3];
    for (a, v) in axes.iter().zip(vals) {
        y[*a] = v;
    }
    Vec3::from_array(y)
}

fn pick(axes: [usize; 3], y: Vec3) -> [f64; 3] {
    [y[axes[0]], y[axes[1]], y[axes[2]]]
}

impl SurfaceChart {
    pub fn kind(&self) -> QuadricKind {
        self.class.kind
    }

    pub fn forward(&self, u: f64, v: f64) -> Vec3 {
        let y = match self.shape {
            Shape::Ellipsoid { semi } => Vec3::new(
                semi[0] * u.cos() * v.cos(),
                semi[1] * u.sin() * v.cos(),
                semi[2] * v.sin(),
            ),
            Shape::OneSheet { axes, semi } => place(
                axes,
                [semi[0] * v.cosh() * u.cos(), semi[1] * v.cosh() * u.sin(), semi[2] * v.sinh()],
            ),
            Shape::TwoSheets { axes, semi } => place(
                axes,
                [semi[0] * v.tan() * u.cos(), semi[1] * v.tan() * u.sin(), semi[2] / v.cos()],
            ),
            Shape::EllipticParaboloid { axes, inv_sqrt, mu } => place(
                axes,
                [v * u.cos() * inv_sqrt[0], v * u.sin() * inv_sqrt[1], -v * v / (2.0 * mu)],
            ),
            Shape::HyperbolicParaboloid { axes, lambda, mu } => {
                place(axes, [u, v, -(lambda[0] * u * u + lambda[1] * v * v) / (2.0 * mu)])
            }
            Shape::EllipticCylinder { axes, semi } => {
                place(axes, [semi[0] * u.cos(), semi[1] * u.sin(), v])
            }
            Shape::HyperbolicCylinder { axes, semi } => {
                place(axes, [semi[0] / u.cos(), semi[1] * u.tan(), v])
            }
            Shape::ParabolicCylinder { axes, lambda, mu } => {
                place(axes, [u, -lambda * u * u / (2.0 * mu), v])
            }
            Shape::Cone { axes, slope } => {
                place(axes, [v * slope[0] * u.cos(), v * slope[1] * u.sin(), v])
            }
        };
        self.class.to_world(y)
    }

    /// Parameters of an on-surface point. Off-surface points are mapped to
    /// nearby parameters without any residual check.
    pub fn inverse(&self, x: Vec3) -> (f64, f64) {
        let y = self.class.to_canonical(x);
        match self.shape {
            Shape::Ellipsoid { semi } => {
                let (a, b, c) = (y.x / semi[0], y.y / semi[1], y.z / semi[2]);
                (b.atan2(a), c.atan2(a.hypot(b)))
            }
            Shape::OneSheet { axes, semi } => {
                let p = pick(axes, y);
                let (a, b) = (p[0] / semi[0], p[1] / semi[1]);
                (b.atan2(a), (p[2] / semi[2]).asinh())
            }
            Shape::TwoSheets { axes, semi } => {
                let p = pick(axes, y);
                let (a, b) = (p[0] / semi[0], p[1] / semi[1]);
                let rho = a.hypot(b);
                let cos_v = semi[2] / p[2];
                let sin_v = rho * cos_v.abs();
                let v = sin_v.atan2(cos_v);
                let u = if cos_v >= 0.0 { b.atan2(a) } else { (-b).atan2(-a) };
                (u, v)
            }
            Shape::EllipticParaboloid { axes, inv_sqrt, .. } => {
                let p = pick(axes, y);
                let (a, b) = (p[0] / inv_sqrt[0], p[1] / inv_sqrt[1]);
                (b.atan2(a), a.hypot(b))
            }
            Shape::HyperbolicParaboloid { axes, .. } => {
                let p = pick(axes, y);
                (p[0], p[1])
            }
            Shape::EllipticCylinder { axes, semi } => {
                let p = pick(axes, y);
                ((p[1] / semi[1]).atan2(p[0] / semi[0]), p[2])
            }
            Shape::HyperbolicCylinder { axes, semi } => {
                let p = pick(axes, y);
                let cos_u = semi[0] / p[0];
                let sin_u = (p[1] / semi[1]) * cos_u;
                (sin_u.atan2(cos_u), p[2])
            }
            Shape::ParabolicCylinder { axes, .. } => {
                let p = pick(axes, y);
                (p[0], p[2])
            }
            Shape::Cone { axes, slope } => {
                let p = pick(axes, y);
                let v = p[2];
                if v == 0.0 {
                    (0.0, 0.0)
                } else {
                    ((p[1] / (slope[1] * v)).atan2(p[0] / (slope[0] * v)), v)
                }
            }
        }
    }

    pub fn domain(&self) -> ParamDomain {
        let inf = f64::INFINITY;
        let angle = (-PI, PI);
        let line = (-inf, inf);
        match self.shape {
            Shape::Ellipsoid { .. } => ParamDomain {
                u: angle,
                v: (-FRAC_PI_2, FRAC_PI_2),
                u_periodic: true,
                v_periodic: false,
            },
            Shape::OneSheet { .. } | Shape::Cone { .. } => {
                ParamDomain { u: angle, v: line, u_periodic: true, v_periodic: false }
            }
            Shape::TwoSheets { .. } => {
                ParamDomain { u: angle, v: (0.0, PI), u_periodic: true, v_periodic: false }
            }
            Shape::EllipticParaboloid { .. } => {
                ParamDomain { u: angle, v: (0.0, inf), u_periodic: true, v_periodic: false }
            }
            Shape::EllipticCylinder { .. } | Shape::HyperbolicCylinder { .. } => {
                ParamDomain { u: angle, v: line, u_periodic: true, v_periodic: false }
            }
            Shape::HyperbolicParaboloid { .. } | Shape::ParabolicCylinder { .. } => {
                ParamDomain { u: line, v: line, u_periodic: false, v_periodic: false }
            }
        }
    }
}
