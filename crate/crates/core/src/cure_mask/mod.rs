//! Grayscale cure masks: project a layer contour into projector pixels, fill
//! its interior and command each pixel with the gray level whose cure depth
//! matches the local thickness.

mod profile;
mod projection;
mod raster;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cure_model::{grayscale_for_depth, CureError, CureParams};
use crate::slicer::LayerContour;

pub use profile::{
    thickness_at_pixel, LayerContext, ThicknessGrid, ThicknessProfile, ThicknessSample,
};
pub use projection::{project_and_close, DropAxis, ProjectedLayer, ProjectionTransform};
pub use raster::{edge_x_at, rasterize_even_odd, InteriorMap};

#[derive(Debug, Error)]
pub enum MaskError {
    #[error(transparent)]
    Cure(#[from] CureError),
    #[error("invalid projection: {0}")]
    InvalidTransform(String),
    #[error("footprint needs {needed:?} px but only {available:?} px are available")]
    RasterOverflow {
        needed: [f64; 2],
        available: [f64; 2],
    },
    #[error("thickness grid: {0}")]
    Grid(String),
    #[error("field_gradient profile needs layer context")]
    MissingLayerContext,
    #[error("normalized pixel coordinates ({u}, {v}) outside [0, 1]")]
    PixelOutOfRange { u: f64, v: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MaskStats {
    pub exposed_pixels: usize,
    pub saturated_pixels: usize,
    pub gray_min: u8,
    pub gray_max: u8,
    /// mm², `exposed_pixels · pitch²`.
    pub exposed_area: f64,
    pub saturation_ratio: f64,
    pub discarded_loops: usize,
    pub forced_closures: usize,
    /// Pixels where the field-gradient profile fell back to the layer step.
    pub fallback_pixels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CureMask {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub pixels: Vec<u8>,
    pub stats: MaskStats,
}

impl CureMask {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Builds the interior map of `layer` under `xf`, keeping the projection
/// diagnostics.
pub fn interior_map(
    layer: &LayerContour,
    xf: &ProjectionTransform,
) -> (InteriorMap, ProjectedLayer) {
    let projected = project_and_close(layer, xf);
    let map = rasterize_even_odd(&projected.polygons, xf.width, xf.height);
    (map, projected)
}

/// Fills one layer's grayscale mask.
///
/// `ctx` is only consulted by [`ThicknessProfile::FieldGradient`].
pub fn generate_mask(
    layer: &LayerContour,
    xf: &ProjectionTransform,
    profile: &ThicknessProfile,
    params: &CureParams,
    ctx: Option<&LayerContext>,
) -> Result<CureMask, MaskError> {
    let (width, height) = (xf.width, xf.height);
    let (map, projected) = interior_map(layer, xf);
    let mut pixels = vec![0u8; width * height];
    let rows: Vec<(usize, usize)> = pixels
        .par_chunks_mut(width)
        .enumerate()
        .map(|(y, row)| -> Result<(usize, usize), MaskError> {
            let v = (y as f64 + 0.5) / height as f64;
            let mut saturated = 0;
            let mut fallback = 0;
            for (x, px) in row.iter_mut().enumerate() {
                if !map.get(x, y) {
                    continue;
                }
                let u = (x as f64 + 0.5) / width as f64;
                let h = thickness_at_pixel(u, v, profile, ctx)?;
                let g = grayscale_for_depth(params, h.depth)?;
                *px = g.value;
                saturated += usize::from(g.saturated);
                fallback += usize::from(h.fallback);
            }
            Ok((saturated, fallback))
        })
        .collect::<Result<_, _>>()?;

    let exposed = map.count();
    let saturated: usize = rows.iter().map(|r| r.0).sum();
    let (gray_min, gray_max) = pixels
        .iter()
        .zip(&map.cells)
        .filter(|(_, &inside)| inside)
        .fold(None, |acc: Option<(u8, u8)>, (&g, _)| {
            Some(acc.map_or((g, g), |(lo, hi)| (lo.min(g), hi.max(g))))
        })
        .unwrap_or((0, 0));
    let pitch = xf.pixel_pitch();
    let stats = MaskStats {
        exposed_pixels: exposed,
        saturated_pixels: saturated,
        gray_min,
        gray_max,
        exposed_area: exposed as f64 * pitch * pitch,
        saturation_ratio: if exposed > 0 {
            saturated as f64 / exposed as f64
        } else {
            0.0
        },
        discarded_loops: projected.discarded,
        forced_closures: projected.forced_closures,
        fallback_pixels: rows.iter().map(|r| r.1).sum(),
    };
    Ok(CureMask {
        width,
        height,
        pixels,
        stats,
    })
}
