use serde::{Deserialize, Serialize};

use super::{LayerContour, SliceTolerances};
use crate::scalar_field::{FieldSamples, ScalarFieldSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThicknessFlag {
    Ok,
    BelowMin,
    AboveMax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessReport {
    /// `None` when the layer has no contour points.
    pub min_thickness: Option<f64>,
    pub max_thickness: Option<f64>,
    pub flag: ThicknessFlag,
    /// Contour points where the gradient vanished (thickness taken as +∞).
    pub singular_points: usize,
}

/// Local layer thickness `Δiso / ‖∇φ‖` at `p`, or +∞ where the gradient is
/// singular or zero.
pub fn local_thickness(spec: &ScalarFieldSpec, p: &nalgebra::Point3<f64>, delta_iso: f64) -> f64 {
    match spec.gradient(p) {
        Ok(g) => {
            let n = g.norm();
            if n > 0.0 {
                delta_iso / n
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Estimates each layer's thickness range at its contour points and flags
/// layers outside `[min_thickness, max_thickness]`. An over-thick layer is
/// reported as `AboveMax` even when it is also too thin somewhere.
pub fn check_thickness_bounds(
    layers: &[LayerContour],
    spec: &ScalarFieldSpec,
    samples: &FieldSamples,
    n: usize,
    tol: &SliceTolerances,
) -> Vec<ThicknessReport> {
    let delta_iso = samples.layer_step(n);
    layers
        .iter()
        .map(|layer| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut singular = 0;
            let mut any = false;
            for p in layer.points() {
                any = true;
                let t = local_thickness(spec, p, delta_iso);
                if t.is_infinite() {
                    singular += 1;
                }
                lo = lo.min(t);
                hi = hi.max(t);
            }
            if !any {
                return ThicknessReport {
                    min_thickness: None,
                    max_thickness: None,
                    flag: ThicknessFlag::Ok,
                    singular_points: 0,
                };
            }
            let flag = if hi > tol.max_thickness {
                ThicknessFlag::AboveMax
            } else if lo < tol.min_thickness {
                ThicknessFlag::BelowMin
            } else {
                ThicknessFlag::Ok
            };
            ThicknessReport {
                min_thickness: Some(lo),
                max_thickness: Some(hi),
                flag,
                singular_points: singular,
            }
        })
        .collect()
}
