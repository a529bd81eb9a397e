use nalgebra::Point3;

use super::{EdgeCrossing, IsoSegment, SliceTolerances};
use crate::scalar_field::{FieldSamples, ScalarFieldSpec};

const REFINE_MAX_ITER: usize = 100;

/// Per-layer parameters shared by every triangle cut.
#[derive(Debug, Clone, Copy)]
pub struct IsoContext<'a> {
    pub iso: f64,
    /// Absolute snap distance; vertices with `|φ − iso|` below it are pushed
    /// to the positive side.
    pub snap: f64,
    pub weld: f64,
    /// Root-finding target for crossing refinement.
    pub refine_tol: f64,
    /// Analytic field used to refine crossings; `None` keeps them linear.
    pub field: Option<&'a ScalarFieldSpec>,
}

impl<'a> IsoContext<'a> {
    pub fn new(
        iso: f64,
        samples: &FieldSamples,
        tol: &SliceTolerances,
        field: Option<&'a ScalarFieldSpec>,
    ) -> Self {
        let range = samples.range();
        Self {
            iso,
            snap: tol.epsilon * range,
            weld: tol.weld,
            refine_tol: 1e-13 * (range + iso.abs()),
            field,
        }
    }

    fn signed_distance(&self, phi: f64) -> f64 {
        let d = phi - self.iso;
        if d.abs() < self.snap {
            self.snap
        } else {
            d
        }
    }
}

fn lerp(a: &Point3<f64>, b: &Point3<f64>, alpha: f64) -> Point3<f64> {
    Point3::from(a.coords * (1.0 - alpha) + b.coords * alpha)
}

fn lex_le(a: &Point3<f64>, b: &Point3<f64>) -> bool {
    (a.x, a.y, a.z) <= (b.x, b.y, b.z)
}

/// Crossing along edge `a`–`b`, given both raw scalars.
///
/// The edge is processed in a canonical (lexicographic) endpoint order so the
/// two triangles sharing it produce bit-identical points. The returned `alpha`
/// is measured from `a` as passed in.
pub fn edge_crossing(
    a: &Point3<f64>,
    phi_a: f64,
    b: &Point3<f64>,
    phi_b: f64,
    ctx: &IsoContext,
) -> Option<EdgeCrossing> {
    let da = ctx.signed_distance(phi_a);
    let db = ctx.signed_distance(phi_b);
    if da * db >= 0.0 {
        return None;
    }
    let swapped = !lex_le(a, b);
    let (p, q, dp, dq, rp, rq) = if swapped {
        (b, a, db, da, phi_b - ctx.iso, phi_a - ctx.iso)
    } else {
        (a, b, da, db, phi_a - ctx.iso, phi_b - ctx.iso)
    };
    let mut alpha = (dp / (dp - dq)).clamp(0.0, 1.0);
    if let Some(field) = ctx.field {
        // only refine when the unperturbed values really bracket the level
        if rp * rq <= 0.0 {
            alpha = refine_alpha(field, p, q, rp, rq, alpha, ctx);
        }
    }
    let point = lerp(p, q, alpha);
    Some(EdgeCrossing {
        alpha: if swapped { 1.0 - alpha } else { alpha },
        point,
    })
}

/// Illinois (modified regula falsi) on `g(α) = φ(lerp(p, q, α)) − iso`.
fn refine_alpha(
    field: &ScalarFieldSpec,
    p: &Point3<f64>,
    q: &Point3<f64>,
    gp: f64,
    gq: f64,
    guess: f64,
    ctx: &IsoContext,
) -> f64 {
    if gp == 0.0 {
        return 0.0;
    }
    if gq == 0.0 {
        return 1.0;
    }
    let g = |t: f64| field.eval(&lerp(p, q, t)) - ctx.iso;
    let (mut lo, mut glo, mut hi, mut ghi) = (0.0f64, gp, 1.0f64, gq);
    let mut side = 0i8;
    let mut x = guess;
    for _ in 0..REFINE_MAX_ITER {
        let gx = g(x);
        if gx.abs() <= ctx.refine_tol {
            return x;
        }
        if (gx > 0.0) == (ghi > 0.0) {
            hi = x;
            ghi = gx;
            if side == -1 {
                glo *= 0.5;
            }
            side = -1;
        } else {
            lo = x;
            glo = gx;
            if side == 1 {
                ghi *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
        x = (lo * ghi - hi * glo) / (ghi - glo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
    }
    if glo.abs() < ghi.abs() {
        lo
    } else {
        hi
    }
}

/// Cuts one triangle with the iso-level.
///
/// Signed distances `d = φ − iso` with `|d| < snap` are moved to `+snap`, so
/// an edge is crossed exactly when its endpoint distances have opposite
/// signs. That leaves 0 or 2 crossed edges; the pair becomes a segment unless
/// the two points weld together.
pub fn triangle_iso_segments(
    corners: &[Point3<f64>; 3],
    phi: [f64; 3],
    ctx: &IsoContext,
    source_face: usize,
) -> Option<IsoSegment> {
    let mut hits: [Option<Point3<f64>>; 3] = [None; 3];
    for (slot, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
        hits[slot] = edge_crossing(&corners[i], phi[i], &corners[j], phi[j], ctx).map(|c| c.point);
    }
    let mut found = hits.iter().flatten();
    let p0 = *found.next()?;
    let p1 = *found.next()?;
    debug_assert!(found.next().is_none());
    if (p1 - p0).norm() <= ctx.weld {
        return None;
    }
    Some(IsoSegment {
        p0,
        p1,
        source_face,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(iso: f64) -> IsoContext<'static> {
        IsoContext {
            iso,
            snap: 1e-9,
            weld: 1e-9,
            refine_tol: 1e-15,
            field: None,
        }
    }

    fn unit_tri() -> [Point3<f64>; 3] {
        [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ]
    }

    #[test]
    fn midpoint_crossings() {
        let seg = triangle_iso_segments(&unit_tri(), [0.0, 1.0, 1.0], &ctx(0.5), 3).unwrap();
        let mut pts = [seg.p0, seg.p1];
        pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
        assert_eq!(pts[0], Point3::new(0.0, 0.5, 0.0));
        assert_eq!(pts[1], Point3::new(0.5, 0.0, 0.0));
        assert_eq!(seg.source_face, 3);
    }

    #[test]
    fn all_on_one_side() {
        assert!(triangle_iso_segments(&unit_tri(), [1.0, 2.0, 3.0], &ctx(0.5), 0).is_none());
    }

    #[test]
    fn vertices_on_level_are_perturbed_up() {
        // a and b snap to +snap, c is above: nothing brackets
        assert!(triangle_iso_segments(&unit_tri(), [0.5, 0.5, 1.0], &ctx(0.5), 0).is_none());
        // a and b snap up, c below: edges b-c and c-a cross
        let seg = triangle_iso_segments(&unit_tri(), [0.5, 0.5, 0.0], &ctx(0.5), 0).unwrap();
        assert!((seg.p0 - seg.p1).norm() > 0.9);
    }

    #[test]
    fn single_vertex_on_level_gives_no_sliver() {
        // a snaps up; b, c below. Both crossings land next to a and weld away.
        let c = IsoContext {
            weld: 1e-6,
            ..ctx(0.5)
        };
        assert!(triangle_iso_segments(&unit_tri(), [0.5, 0.0, 0.0], &c, 0).is_none());
    }

    #[test]
    fn alpha_interpolates_from_first_endpoint() {
        let a = Point3::new(2.0, 0.0, 0.0);
        let b = Point3::new(0.0, 0.0, 0.0);
        let c = edge_crossing(&a, 0.0, &b, 4.0, &ctx(1.0)).unwrap();
        assert!((c.alpha - 0.25).abs() < 1e-15);
        assert!((c.point.x - 1.5).abs() < 1e-15);
        let r = edge_crossing(&b, 4.0, &a, 0.0, &ctx(1.0)).unwrap();
        assert_eq!(r.point, c.point);
    }
}
