//! Marching cubes with a generated case table.
//!
//! The table is built from face rules: on each cube face the sign changes
//! are joined by segments, and on a face with two diagonal inside corners
//! each inside corner is cut off on its own. Adjacent cubes see the same
//! face and so produce the same segments, which keeps the mesh closed.
//! Segments are directed so that the surface normal points from inside
//! (`f < 0`) to outside, then chained into loops and fanned into triangles.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use super::{field_value, Assembly, Bounds};
use crate::algebra::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("bounds are degenerate or not finite")]
    DegenerateBounds,
    #[error("resolution must be at least 2 samples per axis, got {0}")]
    Resolution(usize),
}

/// Indexed triangle mesh.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, i: usize) -> [Vec3; 3] {
        self.triangles[i].map(|v| self.vertices[v as usize])
    }

    /// Unit normal by the right-hand rule, or zero for a degenerate triangle.
    pub fn normal(&self, i: usize) -> Vec3 {
        let [a, b, c] = self.triangle(i);
        (b - a).cross(c - a).normalized().unwrap_or(Vec3::ZERO)
    }

    pub fn area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle(i);
        0.5 * (b - a).cross(c - a).norm()
    }

    pub fn centroid(&self, i: usize) -> Vec3 {
        let [a, b, c] = self.triangle(i);
        (a + b + c) / 3.0
    }

    /// Every undirected edge is shared by exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        let mut count: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for (a, b) in edges(t) {
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        count.values().all(|&n| n == 2)
    }

    /// Every directed edge occurs once and its reverse occurs once, so
    /// neighbouring triangles agree on orientation.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut seen: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for e in edges(t) {
                *seen.entry(e).or_default() += 1;
            }
        }
        seen.iter().all(|(&(a, b), &n)| n == 1 && seen.get(&(b, a)) == Some(&1))
    }

    /// Volume enclosed by a closed mesh; positive when normals face out.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|v| self.vertices[v as usize]);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Triangles whose normal does not agree with the field gradient
    /// (central differences with step `h`) at the centroid.
    pub fn orientation_violations(&self, f: impl Fn(Vec3) -> f64, h: f64) -> usize {
        (0..self.triangles.len())
            .filter(|&i| {
                let p = self.centroid(i);
                let g = Vec3::new(
                    f(p + Vec3::X * h) - f(p - Vec3::X * h),
                    f(p + Vec3::Y * h) - f(p - Vec3::Y * h),
                    f(p + Vec3::Z * h) - f(p - Vec3::Z * h),
                );
                self.normal(i).dot(g) <= 0.0
            })
            .count()
    }

    pub fn bounds(&self) -> Option<Bounds> {
        let first = *self.vertices.first()?;
        let mut b = Bounds::new(first, first);
        for &v in &self.vertices {
            b.include_point(v);
        }
        Some(b)
    }
}

fn edges(t: &[u32; 3]) -> [(u32, u32); 3] {
    [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
}

/// Polygonizes the assembly field on a grid of `resolution` samples per
/// axis spanning `bounds`.
pub fn marching_cubes(assembly: &Assembly, bounds: Bounds, resolution: [usize; 3]) -> Result<Mesh, MeshError> {
    marching_cubes_fn(|x| field_value(assembly, x), bounds, resolution)
}

/// Interpolation parameters are kept this far from the grid corners so that
/// distinct grid edges never weld to coincident points.
const EDGE_CLAMP: f64 = 1e-4;

/// Polygonizes `{f < 0}`. The grid is evaluated in parallel; the output does
/// not depend on scheduling.
pub fn marching_cubes_fn<F>(f: F, bounds: Bounds, resolution: [usize; 3]) -> Result<Mesh, MeshError>
where
    F: Fn(Vec3) -> f64 + Sync,
{
    if let Some(&n) = resolution.iter().find(|&&n| n < 2) {
        return Err(MeshError::Resolution(n));
    }
    if !bounds.is_valid() {
        return Err(MeshError::DegenerateBounds);
    }
    let [nx, ny, nz] = resolution;
    let step = Vec3::new(
        bounds.size().x / (nx - 1) as f64,
        bounds.size().y / (ny - 1) as f64,
        bounds.size().z / (nz - 1) as f64,
    );
    let point = |i: usize, j: usize, k: usize| {
        bounds.min + Vec3::new(i as f64 * step.x, j as f64 * step.y, k as f64 * step.z)
    };

    let mut values = vec![0.0; nx * ny * nz];
    values.par_chunks_mut(nx * ny).enumerate().for_each(|(k, slab)| {
        for j in 0..ny {
            for i in 0..nx {
                slab[i + nx * j] = f(point(i, j, k));
            }
        }
    });
    let index = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);

    let table = case_table();
    let mut mesh = Mesh::default();
    let mut welded: HashMap<usize, u32> = HashMap::new();
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let mut case = 0usize;
                for c in 0..8 {
                    let (ci, cj, ck) = corner_offset(c);
                    if values[index(i + ci, j + cj, k + ck)] < 0.0 {
                        case |= 1 << c;
                    }
                }
                if case == 0 || case == 255 {
                    continue;
                }
                let mut vertex = |e: usize| {
                    let (c0, axis) = (EDGES[e].0, EDGES[e].2);
                    let (oi, oj, ok) = corner_offset(c0);
                    let (i0, j0, k0) = (i + oi, j + oj, k + ok);
                    let key = 3 * index(i0, j0, k0) + axis;
                    *welded.entry(key).or_insert_with(|| {
                        let (di, dj, dk) = corner_offset(1 << axis);
                        let (f0, f1) = (values[index(i0, j0, k0)], values[index(i0 + di, j0 + dj, k0 + dk)]);
                        let t = (f0 / (f0 - f1)).clamp(EDGE_CLAMP, 1.0 - EDGE_CLAMP);
                        let p0 = point(i0, j0, k0);
                        let p1 = point(i0 + di, j0 + dj, k0 + dk);
                        mesh.vertices.push(p0 + (p1 - p0) * t);
                        (mesh.vertices.len() - 1) as u32
                    })
                };
                for tri in &table[case] {
                    let t = tri.map(|e| vertex(e as usize));
                    mesh.triangles.push(t);
                }
            }
        }
    }
    Ok(mesh)
}

fn corner_offset(c: usize) -> (usize, usize, usize) {
    (c & 1, (c >> 1) & 1, (c >> 2) & 1)
}

fn corner_pos(c: usize) -> Vec3 {
    let (x, y, z) = corner_offset(c);
    Vec3::new(x as f64, y as f64, z as f64)
}

/// `(low corner, high corner, axis)` for the 12 cube edges.
const EDGES: [(usize, usize, usize); 12] = [
    (0, 1, 0),
    (2, 3, 0),
    (4, 5, 0),
    (6, 7, 0),
    (0, 2, 1),
    (1, 3, 1),
    (4, 6, 1),
    (5, 7, 1),
    (0, 4, 2),
    (1, 5, 2),
    (2, 6, 2),
    (3, 7, 2),
];

fn edge_between(a: usize, b: usize) -> usize {
    EDGES.iter().position(|&(p, q, _)| (p, q) == (a.min(b), a.max(b))).expect("corners are adjacent")
}

fn edge_mid(e: usize) -> Vec3 {
    (corner_pos(EDGES[e].0) + corner_pos(EDGES[e].1)) * 0.5
}

type CaseTable = Vec<Vec<[u8; 3]>>;

fn case_table() -> &'static CaseTable {
    static TABLE: OnceLock<CaseTable> = OnceLock::new();
    TABLE.get_or_init(|| (0..256).map(triangulate_case).collect())
}

fn triangulate_case(case: usize) -> Vec<[u8; 3]> {
    let inside = |c: usize| case & (1 << c) != 0;
    // next[e] = edge that follows e around its loop
    let mut next = [usize::MAX; 12];
    for axis in 0..3 {
        let (p, q) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in 0..2 {
            let base = side << axis;
            let cyc = [base, base | 1 << p, base | 1 << p | 1 << q, base | 1 << q];
            let face_edges: [usize; 4] = std::array::from_fn(|i| edge_between(cyc[i], cyc[(i + 1) % 4]));
            let crossing: Vec<usize> = (0..4).filter(|&i| inside(cyc[i]) != inside(cyc[(i + 1) % 4])).collect();
            let normal = Vec3::axis(axis) * if side == 1 { 1.0 } else { -1.0 };
            let mut segments = Vec::new();
            match crossing.len() {
                2 => {
                    let inner: Vec<Vec3> = cyc.iter().filter(|&&c| inside(c)).map(|&c| corner_pos(c)).collect();
                    let centroid = inner.iter().fold(Vec3::ZERO, |s, &v| s + v) / inner.len() as f64;
                    segments.push((face_edges[crossing[0]], face_edges[crossing[1]], centroid));
                }
                4 => {
                    for i in (0..4).filter(|&i| inside(cyc[i])) {
                        segments.push((face_edges[(i + 3) % 4], face_edges[i], corner_pos(cyc[i])));
                    }
                }
                _ => {}
            }
            for (a, b, centroid) in segments {
                let (ma, mb) = (edge_mid(a), edge_mid(b));
                let mid = (ma + mb) * 0.5;
                let (from, to) = if normal.cross(mb - ma).dot(centroid - mid) < 0.0 { (a, b) } else { (b, a) };
                debug_assert_eq!(next[from], usize::MAX);
                next[from] = to;
            }
        }
    }

    let mut triangles = Vec::new();
    let mut used = [false; 12];
    for start in 0..12 {
        if next[start] == usize::MAX || used[start] {
            continue;
        }
        let mut cycle = vec![start];
        used[start] = true;
        let mut e = next[start];
        while e != start {
            used[e] = true;
            cycle.push(e);
            e = next[e];
        }
        for w in 1..cycle.len() - 1 {
            triangles.push([cycle[0] as u8, cycle[w] as u8, cycle[w + 1] as u8]);
        }
    }
    triangles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: Vec3) -> f64 {
        x.norm_squared() - 1.0
    }

    fn unit_box(pad: f64) -> Bounds {
        Bounds::new(Vec3::new(-pad, -pad, -pad), Vec3::new(pad, pad, pad))
    }

    #[test]
    fn table_cases_are_closed_loops() {
        let table = case_table();
        assert!(table[0].is_empty() && table[255].is_empty());
        assert_eq!(table[1].len(), 1);
        // single inside corner: the normal points away from it
        let [a, b, c] = table[1][0].map(|e| edge_mid(e as usize));
        assert!((b - a).cross(c - a).dot(Vec3::new(1.0, 1.0, 1.0)) > 0.0);
        for (case, tris) in table.iter().enumerate() {
            // complementary cases flip sign, so both are non-empty together
            assert_eq!(tris.is_empty(), table[255 - case].is_empty());
        }
    }

    #[test]
    fn unit_sphere() {
        let mesh = marching_cubes_fn(sphere, unit_box(1.1), [64; 3]).unwrap();
        assert!(!mesh.is_empty());
        assert!(mesh.is_watertight());
        assert!(mesh.is_consistently_oriented());
        assert!(mesh.vertices.iter().all(|&v| sphere(v).abs() <= 0.01));
        assert_eq!(mesh.orientation_violations(sphere, 1e-6), 0);
        let vol = mesh.signed_volume();
        assert!((vol - 4.0 / 3.0 * std::f64::consts::PI).abs() < 0.02, "{vol}");
    }

    #[test]
    fn positive_field_is_empty() {
        let mesh = marching_cubes_fn(|_| 1.0, unit_box(1.0), [8; 3]).unwrap();
        assert!(mesh.is_empty());
    }

    #[test]
    fn saddle_cases_stay_closed() {
        // two touching spheres and a torus exercise ambiguous faces
        let pair = |x: Vec3| sphere(x - Vec3::X * 0.9).min(sphere(x + Vec3::X * 0.9));
        let torus = |x: Vec3| {
            let r = (x.x * x.x + x.y * x.y).sqrt() - 1.0;
            r * r + x.z * x.z - 0.09
        };
        for res in [7, 12, 23] {
            let m = marching_cubes_fn(pair, unit_box(2.1), [res; 3]).unwrap();
            assert!(m.is_watertight() && m.is_consistently_oriented(), "pair at {res}");
            let m = marching_cubes_fn(torus, unit_box(1.5), [res; 3]).unwrap();
            assert!(m.is_watertight() && m.is_consistently_oriented(), "torus at {res}");
            assert!(m.signed_volume() > 0.0);
        }
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(marching_cubes_fn(sphere, unit_box(1.0), [1, 4, 4]), Err(MeshError::Resolution(1)));
        let flat = Bounds::new(Vec3::ZERO, Vec3::new(1.0, 0.0, 1.0));
        assert_eq!(marching_cubes_fn(sphere, flat, [4; 3]), Err(MeshError::DegenerateBounds));
    }

    #[test]
    fn deterministic_output() {
        let a = marching_cubes_fn(sphere, unit_box(1.2), [33; 3]).unwrap();
        let b = marching_cubes_fn(sphere, unit_box(1.2), [33; 3]).unwrap();
        assert_eq!(a, b);
    }
}
