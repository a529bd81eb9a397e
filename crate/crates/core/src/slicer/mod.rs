//! Iso-surface slicing of a triangle mesh into curved contour layers.
//!
//! Each layer `k` is the level set `φ = iso_k`. Every triangle is cut
//! independently ([`triangle_iso_segments`]), then the per-layer segments are
//! welded end to end into polylines ([`build_polylines`]).

mod chain;
mod segments;
mod thickness;

use nalgebra::Point3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh_io::TriangleMesh;
use crate::scalar_field::{iso_schedule, FieldError, FieldSamples, ScalarFieldSpec};

pub use chain::build_polylines;
pub use segments::{edge_crossing, triangle_iso_segments, IsoContext};
pub use thickness::{check_thickness_bounds, local_thickness, ThicknessFlag, ThicknessReport};

#[derive(Debug, Error)]
pub enum SliceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid slice tolerances: {}", .0.join("; "))]
    InvalidTolerances(Vec<String>),
    #[error("field samples ({samples}) do not match mesh vertex count ({vertices})")]
    SampleMismatch { samples: usize, vertices: usize },
}

/// One straight piece of an iso-line inside a single triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoSegment {
    pub p0: Point3<f64>,
    pub p1: Point3<f64>,
    pub source_face: usize,
}

/// Crossing of an iso-level along a triangle edge: `point = (1−α)·a + α·b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCrossing {
    pub alpha: f64,
    pub point: Point3<f64>,
}

/// A chained polyline. Closed loops repeat their first point at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourLoop {
    pub points: Vec<Point3<f64>>,
    pub closed: bool,
}

impl ContourLoop {
    /// Points without the closing duplicate.
    pub fn distinct_points(&self) -> &[Point3<f64>] {
        if self.closed && self.points.len() > 1 {
            &self.points[..self.points.len() - 1]
        } else {
            &self.points
        }
    }

    pub fn segment_count(&self) -> usize {
        self.points.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerContour {
    pub layer_index: usize,
    pub iso_value: f64,
    pub loops: Vec<ContourLoop>,
    /// Iso-segments extracted before chaining.
    pub segment_count: usize,
}

impl LayerContour {
    pub fn open_loop_count(&self) -> usize {
        self.loops.iter().filter(|l| !l.closed).count()
    }

    pub fn points(&self) -> impl Iterator<Item = &Point3<f64>> {
        self.loops.iter().flat_map(|l| l.distinct_points().iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceTolerances {
    /// Vertex snapping tolerance, relative to the field range.
    pub epsilon: f64,
    /// Weld distance in mm.
    pub weld: f64,
    pub min_thickness: f64,
    pub max_thickness: f64,
}

impl SliceTolerances {
    pub const DEFAULT_EPSILON: f64 = 1e-9;
    pub const DEFAULT_WELD_FRACTION: f64 = 1e-6;

    /// Defaults for a mesh whose bounding box has the given diagonal.
    pub fn for_diagonal(diagonal: f64, min_thickness: f64, max_thickness: f64) -> Self {
        Self {
            epsilon: Self::DEFAULT_EPSILON,
            weld: Self::DEFAULT_WELD_FRACTION * diagonal,
            min_thickness,
            max_thickness,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("weld", self.weld),
            ("min_thickness", self.min_thickness),
            ("max_thickness", self.max_thickness),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name} must be finite and > 0 (got {v})"));
            }
        }
        if !(self.min_thickness < self.max_thickness) {
            out.push(format!(
                "min_thickness ({}) must be < max_thickness ({})",
                self.min_thickness, self.max_thickness
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), SliceError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(SliceError::InvalidTolerances(v))
        }
    }
}

/// Extracts and chains the contour of one iso-level.
pub fn slice_layer(
    mesh: &TriangleMesh,
    samples: &FieldSamples,
    field: Option<&ScalarFieldSpec>,
    layer_index: usize,
    iso: f64,
    tol: &SliceTolerances,
) -> LayerContour {
    let ctx = IsoContext::new(iso, samples, tol, field);
    let segments: Vec<IsoSegment> = mesh
        .faces
        .iter()
        .enumerate()
        .filter_map(|(f, &[a, b, c])| {
            let corners = [mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]];
            let phi = [samples.values[a], samples.values[b], samples.values[c]];
            triangle_iso_segments(&corners, phi, &ctx, f)
        })
        .collect();
    LayerContour {
        layer_index,
        iso_value: iso,
        segment_count: segments.len(),
        loops: build_polylines(&segments, tol.weld),
    }
}

/// Slices the mesh into `n` layers at the midpoint iso schedule.
///
/// When `field` is given, edge crossings are refined on the analytic field so
/// contour points lie on the true level set; otherwise crossings are plain
/// linear interpolation of the per-vertex samples. Layers are computed in
/// parallel and returned in layer order.
pub fn slice_mesh(
    mesh: &TriangleMesh,
    samples: &FieldSamples,
    field: Option<&ScalarFieldSpec>,
    n: usize,
    tol: &SliceTolerances,
) -> Result<Vec<LayerContour>, SliceError> {
    tol.validate()?;
    if samples.values.len() != mesh.vertices.len() {
        return Err(SliceError::SampleMismatch {
            samples: samples.values.len(),
            vertices: mesh.vertices.len(),
        });
    }
    let isos = iso_schedule(samples, n)?;
    Ok(isos
        .par_iter()
        .enumerate()
        .map(|(k, &iso)| slice_layer(mesh, samples, field, k, iso, tol))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_io::parse_obj;
    use crate::scalar_field::{build_field, FieldMode};

    fn cube() -> TriangleMesh {
        parse_obj(include_str!("../../fixtures/cube.obj").as_bytes()).unwrap()
    }

    fn planar(mesh: &TriangleMesh) -> (ScalarFieldSpec, FieldSamples) {
        let spec = ScalarFieldSpec::new(
            FieldMode::WarpedZ {
                amplitude: 0.0,
                cycles_x: 1.0,
                cycles_y: 1.0,
            },
            mesh.bounds().unwrap(),
        )
        .unwrap();
        let samples = build_field(mesh, &spec).unwrap();
        (spec, samples)
    }

    #[test]
    fn cube_four_square_layers() {
        let mesh = cube();
        let (spec, samples) = planar(&mesh);
        let tol = SliceTolerances::for_diagonal(3f64.sqrt(), 0.01, 1.0);
        let layers = slice_mesh(&mesh, &samples, Some(&spec), 4, &tol).unwrap();
        assert_eq!(layers.len(), 4);
        for (k, layer) in layers.iter().enumerate() {
            let z = [0.125, 0.375, 0.625, 0.875][k];
            assert_eq!(layer.iso_value, z);
            assert_eq!(layer.loops.len(), 1);
            let lp = &layer.loops[0];
            assert!(lp.closed);
            for p in lp.distinct_points() {
                assert!((p.z - z).abs() < 1e-12);
                // on the boundary of the unit square
                let on_x = p.x.abs() < 1e-12 || (p.x - 1.0).abs() < 1e-12;
                let on_y = p.y.abs() < 1e-12 || (p.y - 1.0).abs() < 1e-12;
                assert!(on_x || on_y, "{p}");
            }
            // chain conservation
            assert_eq!(layer.segment_count, lp.points.len() - 1);
        }
    }

    #[test]
    fn tolerance_violations_listed() {
        let tol = SliceTolerances {
            epsilon: 0.0,
            weld: -1.0,
            min_thickness: 0.3,
            max_thickness: 0.2,
        };
        assert_eq!(tol.violations().len(), 3);
    }

    #[test]
    fn mismatched_samples_rejected() {
        let mesh = cube();
        let samples = FieldSamples::from_values(vec![0.0, 1.0]);
        let tol = SliceTolerances::for_diagonal(1.0, 0.01, 1.0);
        assert!(matches!(
            slice_mesh(&mesh, &samples, None, 2, &tol),
            Err(SliceError::SampleMismatch { .. })
        ));
    }

    #[test]
    fn flat_field_is_an_error() {
        let mesh = cube();
        let samples = FieldSamples::from_values(vec![1.0; 8]);
        let tol = SliceTolerances::for_diagonal(1.0, 0.01, 1.0);
        assert!(matches!(
            slice_mesh(&mesh, &samples, None, 2, &tol),
            Err(SliceError::Field(FieldError::DegenerateField(_)))
        ));
    }
}
