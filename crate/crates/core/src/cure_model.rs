//! Jacobs working-curve cure model.
//!
//! Units: depths in mm, irradiance in mW/cm², time in s, doses in mJ/cm².
//! A grayscale command `G` scales irradiance linearly, `I = I₀·G/255`, the
//! dose is `H = I·tₑ`, and resin cures to `C_d = D_p·ln(H/H₀)` once the dose
//! exceeds the critical dose `H₀`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CureError {
    #[error("grayscale {0} is outside 0..=255")]
    GrayOutOfRange(i32),
    #[error("target depth must be >= 0, got {0}")]
    NegativeDepth(f64),
    #[error("invalid depth bounds [{h_min}, {h_max}]: need 0 < h_min <= h_max")]
    InvalidDepthRange { h_min: f64, h_max: f64 },
    #[error("invalid cure parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
}

/// How fractional grayscale commands are quantized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrayRounding {
    /// Round half away from zero.
    #[default]
    Round,
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CureParams {
    /// Resin penetration depth D_p (mm).
    pub penetration_depth: f64,
    /// Projector peak irradiance I₀ (mW/cm²).
    pub peak_irradiance: f64,
    /// Per-layer exposure time tₑ (s).
    pub exposure_time: f64,
    /// Critical dose H₀ (mJ/cm²).
    pub critical_dose: f64,
    /// Projector pixel pitch p (mm/pixel).
    pub pixel_pitch: f64,
    #[serde(default)]
    pub rounding: GrayRounding,
}

/// Forward model evaluated for one grayscale command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardCureSample {
    pub grayscale: u8,
    pub irradiance: f64,
    pub dose: f64,
    pub depth: f64,
}

/// Quantized grayscale command for a target depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayCommand {
    pub value: u8,
    /// Unclamped, unrounded command.
    pub raw: f64,
    /// Command sits at a projector extreme (0 or 255).
    pub saturated: bool,
}

/// Exposure-time interval over which a depth range is reachable with
/// grayscale commands 1..=255.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExposureWindow {
    Feasible {
        t_min: f64,
        t_max: f64,
    },
    /// `overshoot = t_min / t_max > 1`: the depth range is wider than one
    /// exposure time can cover by this factor in dose.
    Infeasible {
        t_min: f64,
        t_max: f64,
        overshoot: f64,
    },
}

impl ExposureWindow {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ExposureWindow::Feasible { .. })
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            ExposureWindow::Feasible { t_min, t_max }
            | ExposureWindow::Infeasible { t_min, t_max, .. } => (t_min, t_max),
        }
    }
}

impl CureParams {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("penetration_depth", self.penetration_depth),
            ("peak_irradiance", self.peak_irradiance),
            ("exposure_time", self.exposure_time),
            ("critical_dose", self.critical_dose),
            ("pixel_pitch", self.pixel_pitch),
        ] {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name} must be finite and > 0 (got {v})"));
            }
        }
        if out.is_empty() && !(self.nominal_dose() > self.critical_dose) {
            out.push(format!(
                "nominal dose I0*te = {} must exceed critical_dose {}",
                self.nominal_dose(),
                self.critical_dose
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), CureError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CureError::InvalidParams(v))
        }
    }

    /// Dose delivered at full white, `I₀·tₑ`.
    pub fn nominal_dose(&self) -> f64 {
        self.peak_irradiance * self.exposure_time
    }

    /// `255·H₀/(I₀·tₑ)`: the raw command that exactly reaches the critical dose.
    pub fn threshold_gray(&self) -> f64 {
        255.0 * self.critical_dose / self.nominal_dose()
    }

    /// Deepest cure reachable in one exposure (G = 255).
    pub fn max_depth(&self) -> f64 {
        self.penetration_depth * (self.nominal_dose() / self.critical_dose).ln()
    }

    /// Shallowest strictly positive cure depth any command can produce.
    pub fn min_positive_depth(&self) -> Option<f64> {
        let g = (self.threshold_gray().floor() as i64 + 1).max(1);
        if g > 255 {
            return None;
        }
        Some(self.penetration_depth * (g as f64 / self.threshold_gray()).ln())
    }

    /// Largest possible |forward(command(h)) − h| for a pixel commanded `g`.
    pub fn quantization_bound(&self, g: u8) -> f64 {
        let g = f64::from(g);
        let ratio = match self.rounding {
            GrayRounding::Round if g > 0.5 => 1.0 + 0.5 / (g - 0.5),
            GrayRounding::Floor if g > 0.0 => 1.0 + 1.0 / g,
            _ => return f64::INFINITY,
        };
        self.penetration_depth * ratio.ln()
    }

    /// Exposure-time window making `[h_min, h_max]` reachable with commands
    /// in 1..=255. Ignores `self.exposure_time`.
    pub fn exposure_window(&self, h_min: f64, h_max: f64) -> Result<ExposureWindow, CureError> {
        if !(h_min > 0.0 && h_min <= h_max && h_max.is_finite()) {
            return Err(CureError::InvalidDepthRange { h_min, h_max });
        }
        let base = self.critical_dose / self.peak_irradiance;
        let t_min = base * (h_max / self.penetration_depth).exp();
        let t_max = 255.0 * base * (h_min / self.penetration_depth).exp();
        Ok(if t_min <= t_max {
            ExposureWindow::Feasible { t_min, t_max }
        } else {
            ExposureWindow::Infeasible {
                t_min,
                t_max,
                overshoot: t_min / t_max,
            }
        })
    }
}

/// Cure depth produced by grayscale command `g`. Sub-threshold doses cure
/// nothing and report depth 0.
pub fn cure_depth(params: &CureParams, g: i32) -> Result<ForwardCureSample, CureError> {
    let grayscale = u8::try_from(g).map_err(|_| CureError::GrayOutOfRange(g))?;
    Ok(forward(params, grayscale))
}

pub fn forward(params: &CureParams, grayscale: u8) -> ForwardCureSample {
    let irradiance = params.peak_irradiance * f64::from(grayscale) / 255.0;
    let dose = irradiance * params.exposure_time;
    let depth = if dose > params.critical_dose {
        params.penetration_depth * (dose / params.critical_dose).ln()
    } else {
        0.0
    };
    ForwardCureSample {
        grayscale,
        irradiance,
        dose,
        depth,
    }
}

/// Inverts the working curve: `G_raw = 255·H₀/(I₀·tₑ)·exp(h/D_p)`, then
/// quantizes and clamps to 0..=255.
pub fn grayscale_for_depth(
    params: &CureParams,
    target_depth: f64,
) -> Result<GrayCommand, CureError> {
    if target_depth.is_nan() || target_depth < 0.0 {
        return Err(CureError::NegativeDepth(target_depth));
    }
    let raw = params.threshold_gray() * (target_depth / params.penetration_depth).exp();
    let q = match params.rounding {
        GrayRounding::Round => raw.round(),
        GrayRounding::Floor => raw.floor(),
    };
    let value = q.clamp(0.0, 255.0) as u8;
    Ok(GrayCommand {
        value,
        raw,
        saturated: value == 0 || value == 255,
    })
}
