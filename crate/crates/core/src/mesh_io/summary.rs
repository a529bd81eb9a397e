use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MeshIoError;
use crate::cure_mask::{DropAxis, MaskStats};
use crate::cure_model::CureParams;
use crate::scalar_field::ScalarFieldSpec;
use crate::slicer::{LayerContour, SliceTolerances, ThicknessFlag, ThicknessReport};

/// Per-layer diagnostics row. Infinite or missing thickness values are
/// written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSummary {
    pub layer_index: usize,
    pub iso_value: f64,
    pub loop_count: usize,
    pub open_loop_count: usize,
    pub segment_count: usize,
    pub min_thickness: Option<f64>,
    pub max_thickness: Option<f64>,
    pub thickness_flag: ThicknessFlag,
    pub exposed_pixels: usize,
    pub saturated_pixels: usize,
    pub saturation_ratio: f64,
    pub gray_min: u8,
    pub gray_max: u8,
    pub exposed_area: f64,
}

impl LayerSummary {
    pub fn new(layer: &LayerContour, thickness: &ThicknessReport, mask: &MaskStats) -> Self {
        Self {
            layer_index: layer.layer_index,
            iso_value: layer.iso_value,
            loop_count: layer.loops.len(),
            open_loop_count: layer.open_loop_count(),
            segment_count: layer.segment_count,
            min_thickness: thickness.min_thickness,
            max_thickness: thickness.max_thickness,
            thickness_flag: thickness.flag,
            exposed_pixels: mask.exposed_pixels,
            saturated_pixels: mask.saturated_pixels,
            saturation_ratio: mask.saturation_ratio,
            gray_min: mask.gray_min,
            gray_max: mask.gray_max,
            exposed_area: mask.exposed_area,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterInfo {
    pub width: usize,
    pub height: usize,
    pub margin: usize,
    pub drop_axis: DropAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub mesh_path: String,
    pub field: ScalarFieldSpec,
    pub layer_count: usize,
    pub tolerances: SliceTolerances,
    pub cure: CureParams,
    pub raster: RasterInfo,
    /// mm per pixel, shared by every layer.
    pub pixel_pitch: f64,
    pub profile: String,
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    run: &'a RunMetadata,
    layers: &'a [LayerSummary],
}

/// Pretty-printed summary document, newline-terminated.
pub fn summary_json(layers: &[LayerSummary], run: &RunMetadata) -> Result<String, MeshIoError> {
    let mut text = serde_json::to_string_pretty(&SummaryDoc { run, layers })?;
    text.push('\n');
    Ok(text)
}

pub fn write_summary_json(
    layers: &[LayerSummary],
    run: &RunMetadata,
    path: &Path,
) -> Result<(), MeshIoError> {
    fs::write(path, summary_json(layers, run)?).map_err(|source| MeshIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}
