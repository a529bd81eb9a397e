//! Analytic scalar fields whose level sets define the curved layers.
//!
//! Two modes are supported:
//! - `warped_z`: `φ = z + A·(sin(2π·cx·x̂) + sin(2π·cy·ŷ))`, where `x̂`, `ŷ` are
//!   coordinates normalized to the mesh bounding box;
//! - `radial`: `φ = ‖p − c‖`, concentric spheres about `c`.
//!
//! The field is sampled at mesh vertices for slicing, and evaluated (with
//! its analytic gradient) anywhere for crossing refinement and the
//! per-pixel thickness profile.

use std::f64::consts::TAU;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh_io::{Aabb, TriangleMesh};

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("invalid field parameters: {0}")]
    InvalidSpec(String),
    #[error("field value at vertex {vertex} is not finite")]
    NonFinite { vertex: usize },
    #[error("radial field gradient is undefined at the field center")]
    SingularGradient,
    #[error("scalar field is flat (phi_min = phi_max = {0}); no layers can be scheduled")]
    DegenerateField(f64),
    #[error("layer count must be at least 1")]
    ZeroLayers,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FieldMode {
    WarpedZ {
        amplitude: f64,
        cycles_x: f64,
        cycles_y: f64,
    },
    Radial {
        center: Point3<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarFieldSpec {
    #[serde(flatten)]
    pub mode: FieldMode,
    pub bbox: Aabb,
}

impl ScalarFieldSpec {
    pub fn new(mode: FieldMode, bbox: Aabb) -> Result<Self, FieldError> {
        let spec = Self { mode, bbox };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        match self.mode {
            FieldMode::WarpedZ {
                amplitude,
                cycles_x,
                cycles_y,
            } => {
                if !(amplitude.is_finite() && amplitude >= 0.0) {
                    return Err(FieldError::InvalidSpec(format!(
                        "amplitude must be finite and >= 0, got {amplitude}"
                    )));
                }
                if !cycles_x.is_finite() || !cycles_y.is_finite() {
                    return Err(FieldError::InvalidSpec(
                        "cycle counts must be finite".into(),
                    ));
                }
            }
            FieldMode::Radial { center } => {
                if !center.iter().all(|c| c.is_finite()) {
                    return Err(FieldError::InvalidSpec(
                        "radial center must be finite".into(),
                    ));
                }
            }
        }
        let corners_finite = self
            .bbox
            .min
            .iter()
            .chain(self.bbox.max.iter())
            .all(|c| c.is_finite());
        if !corners_finite {
            return Err(FieldError::InvalidSpec(
                "bounding box must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Normalized (x̂, ŷ). A zero-extent axis normalizes to 0.
    fn normalized_xy(&self, p: &Point3<f64>) -> (f64, f64) {
        let size = self.bbox.size();
        let nx = if size.x > 0.0 {
            (p.x - self.bbox.min.x) / size.x
        } else {
            0.0
        };
        let ny = if size.y > 0.0 {
            (p.y - self.bbox.min.y) / size.y
        } else {
            0.0
        };
        (nx, ny)
    }

    pub fn eval(&self, p: &Point3<f64>) -> f64 {
        match self.mode {
            FieldMode::WarpedZ {
                amplitude,
                cycles_x,
                cycles_y,
            } => {
                let (nx, ny) = self.normalized_xy(p);
                p.z + amplitude * ((TAU * cycles_x * nx).sin() + (TAU * cycles_y * ny).sin())
            }
            FieldMode::Radial { center } => (p - center).norm(),
        }
    }

    pub fn gradient(&self, p: &Point3<f64>) -> Result<Vector3<f64>, FieldError> {
        match self.mode {
            FieldMode::WarpedZ {
                amplitude,
                cycles_x,
                cycles_y,
            } => {
                let size = self.bbox.size();
                let (nx, ny) = self.normalized_xy(p);
                let gx = if size.x > 0.0 {
                    amplitude * TAU * cycles_x / size.x * (TAU * cycles_x * nx).cos()
                } else {
                    0.0
                };
                let gy = if size.y > 0.0 {
                    amplitude * TAU * cycles_y / size.y * (TAU * cycles_y * ny).cos()
                } else {
                    0.0
                };
                Ok(Vector3::new(gx, gy, 1.0))
            }
            FieldMode::Radial { center } => {
                let d = p - center;
                let r = d.norm();
                if r == 0.0 {
                    return Err(FieldError::SingularGradient);
                }
                Ok(d / r)
            }
        }
    }
}

/// Per-vertex field values plus their range.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub values: Vec<f64>,
    pub phi_min: f64,
    pub phi_max: f64,
}

impl FieldSamples {
    pub fn from_values(values: Vec<f64>) -> Self {
        let (phi_min, phi_max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Self {
            values,
            phi_min,
            phi_max,
        }
    }

    pub fn range(&self) -> f64 {
        self.phi_max - self.phi_min
    }

    /// Iso spacing between consecutive layers for `n` layers.
    pub fn layer_step(&self, n: usize) -> f64 {
        self.range() / n as f64
    }
}

/// Samples the field at every mesh vertex.
pub fn build_field(
    mesh: &TriangleMesh,
    spec: &ScalarFieldSpec,
) -> Result<FieldSamples, FieldError> {
    spec.validate()?;
    let values = mesh
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let phi = spec.eval(v);
            if phi.is_finite() {
                Ok(phi)
            } else {
                Err(FieldError::NonFinite { vertex: i })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FieldSamples::from_values(values))
}

/// Midpoint iso-values: `iso_k = φmin + (k + ½)·(φmax − φmin)/n`.
pub fn iso_schedule(samples: &FieldSamples, n: usize) -> Result<Vec<f64>, FieldError> {
    if n == 0 {
        return Err(FieldError::ZeroLayers);
    }
    if !(samples.phi_max > samples.phi_min) {
        return Err(FieldError::DegenerateField(samples.phi_min));
    }
    let step = samples.layer_step(n);
    Ok((0..n)
        .map(|k| samples.phi_min + (k as f64 + 0.5) * step)
        .collect())
}
