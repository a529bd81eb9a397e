//! Round-trip check of emitted masks: read the PGM back from disk, run the
//! forward cure model on every interior pixel and compare with the target
//! thickness.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cure_mask::{
    interior_map, thickness_at_pixel, LayerContext, MaskError, ProjectionTransform,
    ThicknessProfile,
};
use crate::cure_model::{forward, CureParams};
use crate::mesh_io::{read_pgm, MeshIoError};
use crate::slicer::LayerContour;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Io(#[from] MeshIoError),
    #[error("mask is {found:?} px but the raster is {expected:?} px")]
    DimensionMismatch {
        expected: [usize; 2],
        found: [usize; 2],
    },
    #[error(transparent)]
    Mask(#[from] MaskError),
}

/// Relative slack on the quantization bound for floating-point noise.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub layer_index: usize,
    pub interior_pixels: usize,
    /// Over unsaturated interior pixels.
    pub max_abs_depth_error: f64,
    pub mean_abs_depth_error: f64,
    pub saturated_fraction: f64,
    /// Target deeper than the deepest achievable cure.
    pub undercured_pixels: usize,
    /// Target shallower than the shallowest positive cure.
    pub overcured_pixels: usize,
    /// Unsaturated pixels whose error exceeds the quantization bound of their
    /// gray level.
    pub bound_violations: usize,
    /// `[x, y]` of the largest unsaturated error.
    pub worst_pixel: Option<[usize; 2]>,
    pub passed: bool,
}

/// Re-reads `mask_path` and checks it against the layer's target profile.
pub fn roundtrip_verify(
    mask_path: &Path,
    layer: &LayerContour,
    profile: &ThicknessProfile,
    xf: &ProjectionTransform,
    params: &CureParams,
    ctx: Option<&LayerContext>,
) -> Result<RoundTripReport, VerifyError> {
    let image = read_pgm(mask_path)?;
    if (image.width, image.height) != (xf.width, xf.height) {
        return Err(VerifyError::DimensionMismatch {
            expected: [xf.width, xf.height],
            found: [image.width, image.height],
        });
    }
    let (map, _) = interior_map(layer, xf);
    let max_depth = params.max_depth();
    let min_depth = params.min_positive_depth().unwrap_or(f64::INFINITY);

    let mut report = RoundTripReport {
        layer_index: layer.layer_index,
        interior_pixels: 0,
        max_abs_depth_error: 0.0,
        mean_abs_depth_error: 0.0,
        saturated_fraction: 0.0,
        undercured_pixels: 0,
        overcured_pixels: 0,
        bound_violations: 0,
        worst_pixel: None,
        passed: true,
    };
    let mut saturated = 0usize;
    let mut sum = 0.0;
    let mut counted = 0usize;
    for y in 0..image.height {
        let v = (y as f64 + 0.5) / image.height as f64;
        for x in 0..image.width {
            if !map.get(x, y) {
                continue;
            }
            report.interior_pixels += 1;
            let u = (x as f64 + 0.5) / image.width as f64;
            let target = thickness_at_pixel(u, v, profile, ctx)?.depth;
            if target > max_depth {
                report.undercured_pixels += 1;
            }
            if target < min_depth {
                report.overcured_pixels += 1;
            }
            let g = image.get(x, y);
            if g == 0 || g == 255 {
                saturated += 1;
                continue;
            }
            let err = (forward(params, g).depth - target).abs();
            if err > params.quantization_bound(g) * (1.0 + BOUND_SLACK) {
                report.bound_violations += 1;
            }
            if report.worst_pixel.is_none() || err > report.max_abs_depth_error {
                report.max_abs_depth_error = err;
                report.worst_pixel = Some([x, y]);
            }
            sum += err;
            counted += 1;
        }
    }
    if counted > 0 {
        report.mean_abs_depth_error = sum / counted as f64;
    }
    if report.interior_pixels > 0 {
        report.saturated_fraction = saturated as f64 / report.interior_pixels as f64;
    }
    report.passed = report.bound_violations == 0;
    Ok(report)
}

pub fn write_report(report: &RoundTripReport, path: &Path) -> Result<(), MeshIoError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}
