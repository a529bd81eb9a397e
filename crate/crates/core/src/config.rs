//! TOML run configuration. Relative paths resolve against the directory of
//! the config file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cure_mask::{DropAxis, ThicknessGrid, ThicknessProfile};
use crate::cure_model::{CureParams, GrayRounding};
use crate::scalar_field::FieldMode;
use crate::slicer::SliceTolerances;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mesh_path: PathBuf,
    pub output_dir: PathBuf,
    pub layer_count: usize,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    pub verify: bool,
    pub field: FieldMode,
    pub tolerances: ToleranceConfig,
    pub cure: CureConfig,
    pub raster: RasterConfig,
    pub profile: ProfileConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mesh_path: PathBuf::from("mesh.obj"),
            output_dir: PathBuf::from("out"),
            layer_count: 100,
            threads: 0,
            verify: true,
            field: FieldMode::WarpedZ {
                amplitude: 0.0,
                cycles_x: 1.0,
                cycles_y: 1.0,
            },
            tolerances: ToleranceConfig::default(),
            cure: CureConfig::default(),
            raster: RasterConfig::default(),
            profile: ProfileConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Vertex snapping tolerance relative to the field range.
    pub epsilon: f64,
    /// Weld distance in mm. Unset means `1e-6 ×` the mesh bounding-box diagonal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weld: Option<f64>,
    pub min_thickness: f64,
    pub max_thickness: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            epsilon: SliceTolerances::DEFAULT_EPSILON,
            weld: None,
            min_thickness: 0.01,
            max_thickness: 1.0,
        }
    }
}

impl ToleranceConfig {
    pub fn resolve(&self, diagonal: f64) -> SliceTolerances {
        SliceTolerances {
            epsilon: self.epsilon,
            weld: self
                .weld
                .unwrap_or(SliceTolerances::DEFAULT_WELD_FRACTION * diagonal),
            min_thickness: self.min_thickness,
            max_thickness: self.max_thickness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CureConfig {
    pub penetration_depth: f64,
    pub peak_irradiance: f64,
    pub exposure_time: f64,
    pub critical_dose: f64,
    /// mm per pixel. Unset fits the print to the raster.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pixel_pitch: Option<f64>,
    pub rounding: GrayRounding,
}

impl Default for CureConfig {
    fn default() -> Self {
        Self {
            penetration_depth: 0.2,
            peak_irradiance: 20.0,
            exposure_time: 2.5,
            critical_dose: 5.0,
            pixel_pitch: None,
            rounding: GrayRounding::Round,
        }
    }
}

impl CureConfig {
    pub fn params(&self, pixel_pitch: f64) -> CureParams {
        CureParams {
            penetration_depth: self.penetration_depth,
            peak_irradiance: self.peak_irradiance,
            exposure_time: self.exposure_time,
            critical_dose: self.critical_dose,
            pixel_pitch,
            rounding: self.rounding,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RasterConfig {
    pub width: usize,
    pub height: usize,
    /// Pixels kept clear on every side.
    pub margin: usize,
    pub drop_axis: DropAxis,
}

impl Default for RasterConfig {
    fn default() -> Self {
        Self {
            width: 1280,
            height: 800,
            margin: 8,
            drop_axis: DropAxis::Z,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileConfig {
    Constant {
        value: f64,
    },
    #[default]
    FieldGradient,
    SampledGrid {
        path: PathBuf,
    },
}

impl RunConfig {
    /// Reads `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new("")));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.mesh_path);
        join(&mut self.output_dir);
        if let ProfileConfig::SampledGrid { path } = &mut self.profile {
            join(path);
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Every violated invariant, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.layer_count < 1 {
            out.push("layer_count must be ≥ 1".to_string());
        }
        if !self.mesh_path.is_file() {
            out.push(format!(
                "mesh_path {} does not exist",
                self.mesh_path.display()
            ));
        }

        match self.field {
            FieldMode::WarpedZ {
                amplitude,
                cycles_x,
                cycles_y,
            } => {
                if !(amplitude.is_finite() && amplitude >= 0.0) {
                    out.push(format!(
                        "field.amplitude must be finite and ≥ 0 (got {amplitude})"
                    ));
                }
                if !(cycles_x.is_finite() && cycles_y.is_finite()) {
                    out.push("field.cycles_x and field.cycles_y must be finite".to_string());
                }
            }
            FieldMode::Radial { center } => {
                if !center.iter().all(|c| c.is_finite()) {
                    out.push("field.center must be finite".to_string());
                }
            }
        }

        // weld is filled with a positive placeholder so only a user value is checked
        let tol = SliceTolerances {
            weld: self.tolerances.weld.unwrap_or(1.0),
            ..self.tolerances.resolve(1.0)
        };
        out.extend(
            tol.violations()
                .into_iter()
                .map(|v| format!("tolerances.{v}")),
        );

        let params = self.cure.params(self.cure.pixel_pitch.unwrap_or(1.0));
        out.extend(params.violations().into_iter().map(|v| format!("cure.{v}")));

        let r = &self.raster;
        if r.width < 1 || r.height < 1 {
            out.push(format!(
                "raster size must be ≥ 1x1 (got {}x{})",
                r.width, r.height
            ));
        } else if 2 * r.margin >= r.width.min(r.height) {
            out.push(format!(
                "raster.margin {} leaves no room in a {}x{} raster",
                r.margin, r.width, r.height
            ));
        }

        match &self.profile {
            ProfileConfig::Constant { value } if !(value.is_finite() && *value >= 0.0) => {
                out.push(format!(
                    "profile.value must be finite and ≥ 0 (got {value})"
                ));
            }
            ProfileConfig::SampledGrid { path } => match fs::read_to_string(path) {
                Ok(text) => {
                    if let Err(e) = ThicknessGrid::parse(&text) {
                        out.push(format!("profile.path {}: {e}", path.display()));
                    }
                }
                Err(e) => out.push(format!("profile.path {}: {e}", path.display())),
            },
            _ => {}
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Loads the thickness profile, reading the grid file if there is one.
    pub fn thickness_profile(&self) -> Result<ThicknessProfile, ConfigError> {
        Ok(match &self.profile {
            ProfileConfig::Constant { value } => ThicknessProfile::Constant(*value),
            ProfileConfig::FieldGradient => ThicknessProfile::FieldGradient,
            ProfileConfig::SampledGrid { path } => {
                let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
                    path: path.clone(),
                    source,
                })?;
                let grid = ThicknessGrid::parse(&text).map_err(|e| {
                    ConfigError::Invalid(vec![format!("profile.path {}: {e}", path.display())])
                })?;
                ThicknessProfile::SampledGrid(grid)
            }
        })
    }
}
