//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use curvedlp::cure_model::{CureParams, GrayRounding};
use curvedlp::mesh_io::TriangleMesh;
use nalgebra::{Point3, Vector3};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> TriangleMesh {
    curvedlp::mesh_io::load_obj(&fixture(name)).unwrap()
}

/// The cure parameters used by the bundled fixture configs.
pub fn fixture_params(pixel_pitch: f64) -> CureParams {
    CureParams {
        penetration_depth: 0.2,
        peak_irradiance: 20.0,
        exposure_time: 2.5,
        critical_dose: 5.0,
        pixel_pitch,
        rounding: GrayRounding::Round,
    }
}

/// Subdivided icosahedron projected onto a sphere; `20·4^level` faces.
pub fn icosphere(level: u32, radius: f64, center: Point3<f64>) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| Vector3::from(*v).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vector3<f64>>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push((verts[a] + verts[b]).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let vertices = verts.iter().map(|v| center + v * radius).collect();
    TriangleMesh::new(vertices, faces)
}

/// Cuts every triangle by the plane `z = level` on its own, with no
/// chaining or welding. Returns every crossing point.
pub fn planar_slice_points(mesh: &TriangleMesh, level: f64) -> Vec<Point3<f64>> {
    let mut out = Vec::new();
    for f in &mesh.faces {
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            let a = mesh.vertices[f[i]];
            let b = mesh.vertices[f[j]];
            if (a.z < level) != (b.z < level) {
                let s = (level - a.z) / (b.z - a.z);
                out.push(Point3::new(
                    a.x + s * (b.x - a.x),
                    a.y + s * (b.y - a.y),
                    level,
                ));
            }
        }
    }
    out
}

/// True when every point of `a` is within `tol` of a point of `b`.
pub fn covered_by(a: &[Point3<f64>], b: &[Point3<f64>], tol: f64) -> bool {
    a.iter().all(|p| b.iter().any(|q| (p - q).norm() <= tol))
}

/// Even-odd test of a single point against closed polygons, by counting
/// edge crossings of the ray going towards +x. An edge is crossed when the
/// ray's height lies in `[min(ay, by), max(ay, by))`.
pub fn inside_even_odd(polygons: &[Vec<[f64; 2]>], x: f64, y: f64) -> bool {
    let mut inside = false;
    for poly in polygons {
        for w in poly.windows(2) {
            let (a, b) = (w[0], w[1]);
            if (a[1] > y) != (b[1] > y) {
                let xi = a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if x < xi {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Interior map computed pixel by pixel with [`inside_even_odd`].
pub fn oracle_interior(polygons: &[Vec<[f64; 2]>], width: usize, height: usize) -> Vec<bool> {
    let mut cells = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            cells.push(inside_even_odd(polygons, x as f64 + 0.5, y as f64 + 0.5));
        }
    }
    cells
}

/// Random closed polygons (possibly self-intersecting) spilling a little
/// past a `size × size` raster.
pub fn random_polygons(rng: &mut impl Rng, size: f64) -> Vec<Vec<[f64; 2]>> {
    let loops = rng.random_range(1..=4);
    (0..loops)
        .map(|_| {
            let n = rng.random_range(3..=12);
            let mut poly: Vec<[f64; 2]> = (0..n)
                .map(|_| {
                    [
                        rng.random_range(-0.1 * size..1.1 * size),
                        rng.random_range(-0.1 * size..1.1 * size),
                    ]
                })
                .collect();
            // some vertices land exactly on pixel-center rows and columns
            for p in poly.iter_mut() {
                if rng.random_bool(0.25) {
                    p[1] = p[1].floor() + 0.5;
                }
                if rng.random_bool(0.25) {
                    p[0] = p[0].floor() + 0.5;
                }
            }
            poly.push(poly[0]);
            poly
        })
        .collect()
}
