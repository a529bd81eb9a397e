use nalgebra::Point3;

use super::{MaskError, ProjectionTransform};
use crate::cure_mask::DropAxis;
use crate::scalar_field::{FieldMode, ScalarFieldSpec};
use crate::slicer::local_thickness;

/// Row-major grid of thickness samples (mm). Node `(i, j)` sits at
/// `u = i/(width−1)`, `v = j/(height−1)`; a single-node axis is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ThicknessGrid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl ThicknessGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, MaskError> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(MaskError::Grid(format!(
                "{} values do not fill a {width}x{height} grid",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(MaskError::Grid(format!(
                "thickness {bad} must be finite and >= 0"
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Parses `width height` followed by `width·height` values. `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self, MaskError> {
        let mut tokens = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(str::split_whitespace);
        let mut dim = |name: &str| -> Result<usize, MaskError> {
            tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| MaskError::Grid(format!("missing or malformed grid {name}")))
        };
        let width = dim("width")?;
        let height = dim("height")?;
        let values = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| MaskError::Grid(format!("malformed value `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(width, height, values)
    }

    pub fn sample(&self, u: f64, v: f64) -> f64 {
        fn axis(t: f64, n: usize) -> (usize, usize, f64) {
            if n == 1 {
                return (0, 0, 0.0);
            }
            let f = t.clamp(0.0, 1.0) * (n - 1) as f64;
            let i0 = (f.floor() as usize).min(n - 2);
            (i0, i0 + 1, f - i0 as f64)
        }
        let (x0, x1, tx) = axis(u, self.width);
        let (y0, y1, ty) = axis(v, self.height);
        let at = |x: usize, y: usize| self.values[y * self.width + x];
        let top = at(x0, y0) * (1.0 - tx) + at(x1, y0) * tx;
        let bottom = at(x0, y1) * (1.0 - tx) + at(x1, y1) * tx;
        top * (1.0 - ty) + bottom * ty
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThicknessProfile {
    Constant(f64),
    /// `Δiso / ‖∇φ‖` on the layer's iso-surface under each pixel.
    FieldGradient,
    SampledGrid(ThicknessGrid),
}

impl ThicknessProfile {
    pub fn name(&self) -> &'static str {
        match self {
            ThicknessProfile::Constant(_) => "constant",
            ThicknessProfile::FieldGradient => "field_gradient",
            ThicknessProfile::SampledGrid(_) => "sampled_grid",
        }
    }
}

/// Per-layer data the field-gradient profile needs.
#[derive(Debug, Clone, Copy)]
pub struct LayerContext<'a> {
    pub iso: f64,
    pub delta_iso: f64,
    pub field: &'a ScalarFieldSpec,
    pub transform: &'a ProjectionTransform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThicknessSample {
    pub depth: f64,
    /// The iso-surface does not cover this pixel; `depth` is the nominal
    /// layer step.
    pub fallback: bool,
}

const SCAN_STEPS: usize = 256;
const BISECT_STEPS: usize = 80;

impl LayerContext<'_> {
    /// World point on the layer surface under normalized pixel `(u, v)`.
    pub fn surface_point(&self, u: f64, v: f64) -> Option<Point3<f64>> {
        let xf = self.transform;
        let kept = xf.unproject([u * xf.width as f64, v * xf.height as f64]);
        let [a, b] = xf.drop_axis.kept();
        let d = xf.drop_axis.index();
        let mut p = Point3::origin();
        p[a] = kept[0];
        p[b] = kept[1];
        match self.field.mode {
            FieldMode::WarpedZ { .. } if xf.drop_axis == DropAxis::Z => {
                // φ = z + warp(x, y): the warp is independent of z
                p.z = 0.0;
                let warp = self.field.eval(&p);
                p.z = self.iso - warp;
                Some(p)
            }
            FieldMode::Radial { center } => {
                let r2 =
                    self.iso * self.iso - (p[a] - center[a]).powi(2) - (p[b] - center[b]).powi(2);
                if r2 < 0.0 {
                    return None;
                }
                p[d] = center[d] + r2.sqrt();
                Some(p)
            }
            FieldMode::WarpedZ { .. } => self.solve_along(p, d),
        }
    }

    /// First root of `φ − iso` along axis `d` inside the field's bounding box.
    fn solve_along(&self, mut p: Point3<f64>, d: usize) -> Option<Point3<f64>> {
        let lo = self.field.bbox.min[d];
        let hi = self.field.bbox.max[d];
        let mut g = |t: f64| {
            p[d] = t;
            self.field.eval(&p) - self.iso
        };
        let mut t0 = lo;
        let mut g0 = g(t0);
        for i in 1..=SCAN_STEPS {
            let t1 = lo + (hi - lo) * i as f64 / SCAN_STEPS as f64;
            let g1 = g(t1);
            if g0 == 0.0 || g0 * g1 < 0.0 || g1 == 0.0 {
                let (mut a, mut ga, mut b) = (t0, g0, t1);
                if g0 == 0.0 {
                    b = t0;
                } else if g1 == 0.0 {
                    a = t1;
                    b = t1;
                }
                for _ in 0..BISECT_STEPS {
                    if a == b {
                        break;
                    }
                    let m = 0.5 * (a + b);
                    let gm = g(m);
                    if (gm > 0.0) == (ga > 0.0) {
                        a = m;
                        ga = gm;
                    } else {
                        b = m;
                    }
                }
                p[d] = 0.5 * (a + b);
                return Some(p);
            }
            t0 = t1;
            g0 = g1;
        }
        None
    }
}

/// Target cure depth for normalized pixel coordinates `(u, v)` in `[0, 1]`.
pub fn thickness_at_pixel(
    u: f64,
    v: f64,
    profile: &ThicknessProfile,
    ctx: Option<&LayerContext>,
) -> Result<ThicknessSample, MaskError> {
    if !((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)) {
        return Err(MaskError::PixelOutOfRange { u, v });
    }
    let exact = |depth| ThicknessSample {
        depth,
        fallback: false,
    };
    match profile {
        ThicknessProfile::Constant(h) => Ok(exact(*h)),
        ThicknessProfile::SampledGrid(grid) => Ok(exact(grid.sample(u, v))),
        ThicknessProfile::FieldGradient => {
            let ctx = ctx.ok_or(MaskError::MissingLayerContext)?;
            let fallback = ThicknessSample {
                depth: ctx.delta_iso,
                fallback: true,
            };
            let Some(p) = ctx.surface_point(u, v) else {
                return Ok(fallback);
            };
            let t = local_thickness(ctx.field, &p, ctx.delta_iso);
            Ok(if t.is_finite() { exact(t) } else { fallback })
        }
    }
}
