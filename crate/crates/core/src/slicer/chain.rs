use std::collections::HashMap;

use nalgebra::Point3;

use super::{ContourLoop, IsoSegment};

type CellKey = (i64, i64, i64);

/// Segment endpoints bucketed on a grid with cell size `weld`, so any point
/// within `weld` of a query lies in the 3×3×3 block around the query's cell.
struct EndpointHash {
    cell: f64,
    buckets: HashMap<CellKey, Vec<(usize, u8)>>,
}

impl EndpointHash {
    fn new(segments: &[IsoSegment], cell: f64) -> Self {
        let mut hash = Self {
            cell,
            buckets: HashMap::with_capacity(segments.len() * 2),
        };
        for (i, s) in segments.iter().enumerate() {
            hash.buckets
                .entry(hash.key(&s.p0))
                .or_default()
                .push((i, 0));
            hash.buckets
                .entry(hash.key(&s.p1))
                .or_default()
                .push((i, 1));
        }
        hash
    }

    fn key(&self, p: &Point3<f64>) -> CellKey {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        )
    }

    /// Nearest unused endpoint within `weld`; ties go to the lowest
    /// (segment, end) so results depend only on input order.
    fn nearest(
        &self,
        p: &Point3<f64>,
        segments: &[IsoSegment],
        used: &[bool],
        weld: f64,
    ) -> Option<(usize, u8)> {
        let (kx, ky, kz) = self.key(p);
        let mut best: Option<(f64, usize, u8)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(bucket) = self.buckets.get(&(kx + dx, ky + dy, kz + dz)) else {
                        continue;
                    };
                    for &(seg, end) in bucket {
                        if used[seg] {
                            continue;
                        }
                        let q = if end == 0 {
                            &segments[seg].p0
                        } else {
                            &segments[seg].p1
                        };
                        let d = (q - p).norm();
                        if d > weld {
                            continue;
                        }
                        let better = match best {
                            None => true,
                            Some((bd, bs, be)) => (d, seg, end) < (bd, bs, be),
                        };
                        if better {
                            best = Some((d, seg, end));
                        }
                    }
                }
            }
        }
        best.map(|(_, s, e)| (s, e))
    }
}

/// Grows `pts` from its last point. Returns true when the chain closes back
/// on `pts[0]`, in which case the last point is replaced by an exact copy of
/// the first.
fn extend(
    pts: &mut Vec<Point3<f64>>,
    segments: &[IsoSegment],
    used: &mut [bool],
    hash: &EndpointHash,
    weld: f64,
) -> bool {
    loop {
        let tail = *pts.last().expect("chain is never empty");
        if pts.len() >= 4 && (tail - pts[0]).norm() <= weld {
            let head = pts[0];
            *pts.last_mut().unwrap() = head;
            return true;
        }
        match hash.nearest(&tail, segments, used, weld) {
            Some((seg, end)) => {
                used[seg] = true;
                let s = &segments[seg];
                pts.push(if end == 0 { s.p1 } else { s.p0 });
            }
            None => return false,
        }
    }
}

/// Chains segments into polylines by welding endpoints within `weld`.
///
/// Greedy: seed with the first unused segment, grow forward until the chain
/// closes or runs out of matches, then grow backward from the seed. Every
/// segment is used exactly once. Chains that never close come back with
/// `closed == false`.
pub fn build_polylines(segments: &[IsoSegment], weld: f64) -> Vec<ContourLoop> {
    let hash = EndpointHash::new(segments, weld);
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for seed in 0..segments.len() {
        if used[seed] {
            continue;
        }
        used[seed] = true;
        let mut pts = vec![segments[seed].p0, segments[seed].p1];
        let mut closed = extend(&mut pts, segments, &mut used, &hash, weld);
        if !closed {
            pts.reverse();
            closed = extend(&mut pts, segments, &mut used, &hash, weld);
            pts.reverse();
        }
        loops.push(ContourLoop {
            points: pts,
            closed,
        });
    }
    loops
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(a: [f64; 2], b: [f64; 2]) -> IsoSegment {
        IsoSegment {
            p0: Point3::new(a[0], a[1], 0.0),
            p1: Point3::new(b[0], b[1], 0.0),
            source_face: 0,
        }
    }

    fn square(o: f64) -> Vec<IsoSegment> {
        vec![
            seg([o, 0.0], [o + 1.0, 0.0]),
            seg([o + 1.0, 1.0], [o + 1.0, 0.0]),
            seg([o, 1.0], [o + 1.0, 1.0]),
            seg([o, 0.0], [o, 1.0]),
        ]
    }

    #[test]
    fn square_closes() {
        let loops = build_polylines(&square(0.0), 1e-9);
        assert_eq!(loops.len(), 1);
        assert!(loops[0].closed);
        assert_eq!(loops[0].distinct_points().len(), 4);
        assert_eq!(loops[0].points.first(), loops[0].points.last());
    }

    #[test]
    fn two_disjoint_squares() {
        let mut segs = square(0.0);
        segs.extend(square(5.0));
        let loops = build_polylines(&segs, 1e-9);
        assert_eq!(loops.len(), 2);
        assert!(loops.iter().all(|l| l.closed));
    }

    #[test]
    fn open_u_shape() {
        // seeded from the middle so both directions are exercised
        let segs = vec![
            seg([1.0, 0.0], [0.0, 0.0]),
            seg([0.0, 0.0], [0.0, 1.0]),
            seg([1.0, 1.0], [1.0, 0.0]),
        ];
        let loops = build_polylines(&segs, 1e-9);
        assert_eq!(loops.len(), 1);
        assert!(!loops[0].closed);
        assert_eq!(loops[0].points.len(), 4);
        assert_eq!(loops[0].points[0], Point3::new(1.0, 1.0, 0.0));
        assert_eq!(loops[0].points[3], Point3::new(0.0, 1.0, 0.0));
    }

    #[test]
    fn endpoints_weld_within_tolerance() {
        let mut segs = square(0.0);
        segs[1].p0.x += 4e-7;
        segs[2].p1.y -= 3e-7;
        let loops = build_polylines(&segs, 1e-6);
        assert_eq!(loops.len(), 1);
        assert!(loops[0].closed);
        let loops = build_polylines(&segs, 1e-7);
        assert!(loops.iter().all(|l| !l.closed));
    }

    #[test]
    fn branch_takes_nearest_and_leaves_rest_open() {
        // square plus a dangling spur attached at (1,0)
        let mut segs = square(0.0);
        segs.push(seg([1.0, 0.0], [2.0, -1.0]));
        let loops = build_polylines(&segs, 1e-9);
        let used: usize = loops.iter().map(|l| l.segment_count()).sum();
        assert_eq!(used, 5);
        assert!(loops.iter().any(|l| !l.closed));
    }

    #[test]
    fn empty_input() {
        assert!(build_polylines(&[], 1e-6).is_empty());
    }
}
