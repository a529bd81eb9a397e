//! End-to-end driver: mesh → field → layers → masks → verification → summary.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;
use tracing::{info, warn};

use crate::config::{ConfigError, RunConfig};
use crate::cure_mask::{
    generate_mask, LayerContext, MaskError, ProjectionTransform, ThicknessProfile,
};
use crate::cure_model::{CureError, CureParams, ExposureWindow};
use crate::mesh_io::{
    load_obj, write_layer_obj, write_pgm, write_summary_json, Aabb, LayerSummary, MeshIoError,
    RasterInfo, RunMetadata,
};
use crate::scalar_field::{build_field, FieldError, ScalarFieldSpec};
use crate::slicer::{
    check_thickness_bounds, slice_mesh, LayerContour, SliceError, ThicknessReport,
};
use crate::verify::{roundtrip_verify, write_report, RoundTripReport, VerifyError};

pub const SUMMARY_FILE: &str = "layers_summary.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("mesh: {0}")]
    Mesh(#[source] MeshIoError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Cure(#[from] CureError),
    #[error(transparent)]
    Mask(#[from] MaskError),
    #[error("output: {0}")]
    Output(#[from] MeshIoError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl PipelineError {
    /// Process exit status: 1 for configuration problems, 2 for anything
    /// that fails while slicing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Mesh(MeshIoError::Io { .. }) => 1,
            PipelineError::Mask(
                MaskError::RasterOverflow { .. } | MaskError::InvalidTransform(_),
            ) => 1,
            _ => 2,
        }
    }
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summaries: Vec<LayerSummary>,
    /// One per layer that produced a mask, when verification is on.
    pub reports: Vec<RoundTripReport>,
    pub transform: ProjectionTransform,
    pub params: CureParams,
    pub warnings: Vec<String>,
    pub output_dir: PathBuf,
}

impl RunOutcome {
    pub fn failed_layers(&self) -> Vec<usize> {
        self.reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.layer_index)
            .collect()
    }

    /// 0 when every verified layer passed, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failed_layers().is_empty() {
            0
        } else {
            3
        }
    }
}

pub fn layer_obj_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("layer_{k:04}.obj"))
}

pub fn mask_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("mask_{k:04}.pgm"))
}

pub fn verify_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("verify_{k:04}.json"))
}

/// Validates `cfg` and runs the whole pipeline inside a pool of
/// `cfg.threads` workers.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()?;
    pool.install(|| run_validated(cfg))
}

fn contour_bounds(layers: &[LayerContour]) -> Option<Aabb> {
    Aabb::from_points(layers.iter().flat_map(|l| l.points()))
}

/// Depth range the profile will ask for, used to check the exposure window.
fn target_depth_range(
    profile: &ThicknessProfile,
    reports: &[ThicknessReport],
) -> Option<(f64, f64)> {
    let range = match profile {
        ThicknessProfile::Constant(h) => (*h, *h),
        ThicknessProfile::SampledGrid(g) => g
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            }),
        ThicknessProfile::FieldGradient => reports
            .iter()
            .flat_map(|r| [r.min_thickness, r.max_thickness])
            .flatten()
            .filter(|t| t.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            }),
    };
    (range.0 > 0.0 && range.0 <= range.1 && range.1.is_finite()).then_some(range)
}

fn exposure_warning(
    params: &CureParams,
    h_min: f64,
    h_max: f64,
) -> Result<Option<String>, CureError> {
    let te = params.exposure_time;
    Ok(match params.exposure_window(h_min, h_max)? {
        ExposureWindow::Feasible { t_min, t_max } if (t_min..=t_max).contains(&te) => None,
        ExposureWindow::Feasible { t_min, t_max } => Some(format!(
            "exposure_time {te} s cannot reach target depths [{h_min:.6}, {h_max:.6}] mm; \
             use an exposure time in [{t_min:.6}, {t_max:.6}] s"
        )),
        ExposureWindow::Infeasible { t_min, t_max, overshoot } => Some(format!(
            "target depths [{h_min:.6}, {h_max:.6}] mm exceed the 8-bit dynamic range by {overshoot:.3}x: \
             no single exposure time works (need t ≥ {t_min:.6} s and t ≤ {t_max:.6} s); \
             expect saturated pixels"
        )),
    })
}

struct LayerOutput {
    summary: LayerSummary,
    report: Option<RoundTripReport>,
}

fn run_validated(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let n = cfg.layer_count;
    let mesh = load_obj(&cfg.mesh_path).map_err(PipelineError::Mesh)?;
    let bbox = mesh
        .bounds()
        .ok_or(PipelineError::Mesh(MeshIoError::EmptyMesh))?;
    info!(
        vertices = mesh.vertex_count(),
        faces = mesh.face_count(),
        dropped = mesh.dropped_degenerate,
        "loaded {}",
        cfg.mesh_path.display()
    );

    let field = ScalarFieldSpec::new(cfg.field, bbox)?;
    let samples = build_field(&mesh, &field)?;
    let tol = cfg.tolerances.resolve(bbox.diagonal());
    let layers = slice_mesh(&mesh, &samples, Some(&field), n, &tol)?;
    let thickness = check_thickness_bounds(&layers, &field, &samples, n, &tol);
    let delta_iso = samples.layer_step(n);
    info!(layers = layers.len(), delta_iso, "sliced");

    let footprint = contour_bounds(&layers).unwrap_or(bbox);
    let r = &cfg.raster;
    let xf = ProjectionTransform::fit(
        &footprint,
        r.drop_axis,
        r.width,
        r.height,
        r.margin,
        cfg.cure.pixel_pitch,
    )?;
    let params = cfg.cure.params(xf.pixel_pitch());
    params.validate()?;
    let profile = cfg.thickness_profile()?;

    let mut warnings = Vec::new();
    if let Some((h_min, h_max)) = target_depth_range(&profile, &thickness) {
        if let Some(w) = exposure_warning(&params, h_min, h_max)? {
            warn!("{w}");
            warnings.push(w);
        }
    }

    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|source| MeshIoError::Io {
        path: out_dir.clone(),
        source,
    })?;

    let outputs: Vec<LayerOutput> = layers
        .par_iter()
        .zip(&thickness)
        .map(|(layer, report)| -> Result<LayerOutput, PipelineError> {
            let k = layer.layer_index;
            let ctx = LayerContext {
                iso: layer.iso_value,
                delta_iso,
                field: &field,
                transform: &xf,
            };
            let mask = generate_mask(layer, &xf, &profile, &params, Some(&ctx))?;
            let summary = LayerSummary::new(layer, report, &mask.stats);
            if layer.loops.is_empty() {
                return Ok(LayerOutput {
                    summary,
                    report: None,
                });
            }
            write_layer_obj(layer, &layer_obj_path(&out_dir, k))?;
            let pgm = mask_path(&out_dir, k);
            write_pgm(&pgm, mask.width, mask.height, &mask.pixels)?;
            let report = if cfg.verify {
                let rep = roundtrip_verify(&pgm, layer, &profile, &xf, &params, Some(&ctx))?;
                write_report(&rep, &verify_path(&out_dir, k))?;
                if !rep.passed {
                    warn!(
                        layer = k,
                        max_error = rep.max_abs_depth_error,
                        "verification failed"
                    );
                }
                Some(rep)
            } else {
                None
            };
            Ok(LayerOutput { summary, report })
        })
        .collect::<Result<_, _>>()?;

    let (summaries, reports): (Vec<_>, Vec<_>) =
        outputs.into_iter().map(|o| (o.summary, o.report)).unzip();
    let reports: Vec<RoundTripReport> = reports.into_iter().flatten().collect();

    let run = RunMetadata {
        mesh_path: cfg.mesh_path.display().to_string(),
        field,
        layer_count: n,
        tolerances: tol,
        cure: params,
        raster: RasterInfo {
            width: r.width,
            height: r.height,
            margin: r.margin,
            drop_axis: r.drop_axis,
        },
        pixel_pitch: xf.pixel_pitch(),
        profile: profile.name().to_string(),
    };
    write_summary_json(&summaries, &run, &out_dir.join(SUMMARY_FILE))?;
    info!(
        flagged = summaries
            .iter()
            .filter(|s| s.thickness_flag != crate::slicer::ThicknessFlag::Ok)
            .count(),
        "wrote {}",
        out_dir.display()
    );

    Ok(RunOutcome {
        summaries,
        reports,
        transform: xf,
        params,
        warnings,
        output_dir: out_dir,
    })
}
