use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use super::MaskError;
use crate::mesh_io::Aabb;
use crate::slicer::LayerContour;

/// Orthographic projection direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DropAxis {
    X,
    Y,
    #[default]
    Z,
}

impl DropAxis {
    pub fn index(self) -> usize {
        match self {
            DropAxis::X => 0,
            DropAxis::Y => 1,
            DropAxis::Z => 2,
        }
    }

    /// World axes that become image (column, row).
    pub fn kept(self) -> [usize; 2] {
        match self {
            DropAxis::X => [1, 2],
            DropAxis::Y => [0, 2],
            DropAxis::Z => [0, 1],
        }
    }
}

/// World (mm) → projector pixel mapping shared by every layer of a print.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionTransform {
    pub drop_axis: DropAxis,
    /// Pixels per mm.
    pub scale: f64,
    pub offset: [f64; 2],
    pub width: usize,
    pub height: usize,
}

impl ProjectionTransform {
    pub fn new(
        drop_axis: DropAxis,
        scale: f64,
        offset: [f64; 2],
        width: usize,
        height: usize,
    ) -> Result<Self, MaskError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(MaskError::InvalidTransform(format!(
                "scale must be > 0, got {scale}"
            )));
        }
        if !offset.iter().all(|o| o.is_finite()) {
            return Err(MaskError::InvalidTransform("offset must be finite".into()));
        }
        if width == 0 || height == 0 {
            return Err(MaskError::InvalidTransform(format!(
                "raster {width}x{height} is empty"
            )));
        }
        Ok(Self {
            drop_axis,
            scale,
            offset,
            width,
            height,
        })
    }

    /// Centers `bounds` in the raster, keeping `margin` pixels clear on every
    /// side. With `pitch` set the scale is fixed to `1/pitch` and the footprint
    /// must fit; otherwise the largest scale that fits is chosen.
    pub fn fit(
        bounds: &Aabb,
        drop_axis: DropAxis,
        width: usize,
        height: usize,
        margin: usize,
        pitch: Option<f64>,
    ) -> Result<Self, MaskError> {
        let [a, b] = drop_axis.kept();
        let ext = [bounds.max[a] - bounds.min[a], bounds.max[b] - bounds.min[b]];
        let avail = [
            width as f64 - 2.0 * margin as f64,
            height as f64 - 2.0 * margin as f64,
        ];
        if avail[0] <= 0.0 || avail[1] <= 0.0 {
            return Err(MaskError::InvalidTransform(format!(
                "margin {margin} leaves no room in a {width}x{height} raster"
            )));
        }
        let scale = match pitch {
            Some(p) => {
                if !(p.is_finite() && p > 0.0) {
                    return Err(MaskError::InvalidTransform(format!(
                        "pixel pitch must be > 0, got {p}"
                    )));
                }
                let s = 1.0 / p;
                if ext[0] * s > avail[0] || ext[1] * s > avail[1] {
                    return Err(MaskError::RasterOverflow {
                        needed: [ext[0] * s, ext[1] * s],
                        available: avail,
                    });
                }
                s
            }
            None => {
                let fits = (0..2)
                    .filter(|&i| ext[i] > 0.0)
                    .map(|i| avail[i] / ext[i])
                    .fold(f64::INFINITY, f64::min);
                if fits.is_finite() {
                    fits
                } else {
                    1.0
                }
            }
        };
        let center = [
            0.5 * (bounds.min[a] + bounds.max[a]),
            0.5 * (bounds.min[b] + bounds.max[b]),
        ];
        let offset = [
            0.5 * width as f64 - scale * center[0],
            0.5 * height as f64 - scale * center[1],
        ];
        Self::new(drop_axis, scale, offset, width, height)
    }

    pub fn pixel_pitch(&self) -> f64 {
        1.0 / self.scale
    }

    pub fn project(&self, p: &Point3<f64>) -> [f64; 2] {
        let [a, b] = self.drop_axis.kept();
        [
            self.scale * p[a] + self.offset[0],
            self.scale * p[b] + self.offset[1],
        ]
    }

    /// Pixel coordinates back to the two kept world coordinates.
    pub fn unproject(&self, px: [f64; 2]) -> [f64; 2] {
        [
            (px[0] - self.offset[0]) / self.scale,
            (px[1] - self.offset[1]) / self.scale,
        ]
    }
}

/// Pixel-space polygons for one layer, each explicitly closed (last == first).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProjectedLayer {
    pub polygons: Vec<Vec<[f64; 2]>>,
    /// Loops dropped because they collapsed to a point or a line.
    pub discarded: usize,
    /// Open loops that were closed by appending their first point.
    pub forced_closures: usize,
}

const DEGENERATE_PX: f64 = 1e-9;

fn collapses(points: &[[f64; 2]]) -> bool {
    let p0 = points[0];
    let dist = |p: &[f64; 2]| (p[0] - p0[0]).hypot(p[1] - p0[1]);
    let Some(far) = points.iter().max_by(|a, b| dist(a).total_cmp(&dist(b))) else {
        return true;
    };
    let len = dist(far);
    if len <= DEGENERATE_PX {
        return true;
    }
    let dir = [(far[0] - p0[0]) / len, (far[1] - p0[1]) / len];
    points
        .iter()
        .all(|p| (dir[0] * (p[1] - p0[1]) - dir[1] * (p[0] - p0[0])).abs() <= DEGENERATE_PX)
}

/// Projects every loop into pixel space and closes it. Loops whose projection
/// has fewer than three distinct points, or is collinear, are discarded.
pub fn project_and_close(layer: &LayerContour, xf: &ProjectionTransform) -> ProjectedLayer {
    let mut out = ProjectedLayer::default();
    for lp in &layer.loops {
        let mut pts: Vec<[f64; 2]> = lp.distinct_points().iter().map(|p| xf.project(p)).collect();
        if !lp.closed {
            out.forced_closures += 1;
        }
        if pts.len() < 3 || collapses(&pts) {
            out.discarded += 1;
            continue;
        }
        pts.push(pts[0]);
        out.polygons.push(pts);
    }
    out
}
