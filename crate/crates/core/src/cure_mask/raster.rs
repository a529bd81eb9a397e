//! Even-odd scanline fill sampled at pixel centers.

/// Binary interior map, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteriorMap {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

impl InteriorMap {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Smallest integer `i` with `i + 0.5 >= v`.
fn first_center_at_or_after(v: f64) -> i64 {
    let mut i = (v - 0.5).ceil() as i64;
    while (i as f64 + 0.5) < v {
        i += 1;
    }
    while ((i - 1) as f64 + 0.5) >= v {
        i -= 1;
    }
    i
}

/// Crossing abscissa of edge `a → b` with the horizontal line `y`.
#[inline]
pub fn edge_x_at(a: [f64; 2], b: [f64; 2], y: f64) -> f64 {
    a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
}

/// Edges of every polygon, including the implicit closing edge when the
/// last point does not repeat the first.
pub(crate) fn polygon_edges(polygons: &[Vec<[f64; 2]>]) -> Vec<([f64; 2], [f64; 2])> {
    let mut edges = Vec::new();
    for poly in polygons {
        if poly.len() < 2 {
            continue;
        }
        for w in poly.windows(2) {
            edges.push((w[0], w[1]));
        }
        let (first, last) = (poly[0], poly[poly.len() - 1]);
        if first != last {
            edges.push((last, first));
        }
    }
    edges
}

/// Fills pixels whose centers are inside the union of `polygons` under the
/// even-odd rule.
///
/// An edge takes part in row `y` when `min(ay, by) <= y + 0.5 < max(ay, by)`,
/// so a vertex lying exactly on a scanline is counted once, by the edge that
/// starts there going up. Horizontal edges never count. Geometry outside the
/// raster is clipped.
pub fn rasterize_even_odd(polygons: &[Vec<[f64; 2]>], width: usize, height: usize) -> InteriorMap {
    let mut map = InteriorMap::empty(width, height);
    let h = height as i64;
    let w = width as i64;

    // (first row, end row, edge)
    let mut table: Vec<(i64, i64, [f64; 2], [f64; 2])> = polygon_edges(polygons)
        .into_iter()
        .filter_map(|(a, b)| {
            let (lo, hi) = if a[1] < b[1] {
                (a[1], b[1])
            } else {
                (b[1], a[1])
            };
            let r0 = first_center_at_or_after(lo).max(0);
            let r1 = first_center_at_or_after(hi).min(h);
            (r0 < r1).then_some((r0, r1, a, b))
        })
        .collect();
    table.sort_by_key(|e| e.0);

    let mut active: Vec<usize> = Vec::new();
    let mut next = 0;
    let mut xs: Vec<f64> = Vec::new();
    for row in 0..h {
        while next < table.len() && table[next].0 <= row {
            active.push(next);
            next += 1;
        }
        active.retain(|&i| table[i].1 > row);
        if active.is_empty() {
            continue;
        }
        let yc = row as f64 + 0.5;
        xs.clear();
        xs.extend(
            active
                .iter()
                .map(|&i| edge_x_at(table[i].2, table[i].3, yc)),
        );
        xs.sort_by(f64::total_cmp);
        let line = &mut map.cells[(row as usize) * width..(row as usize + 1) * width];
        for pair in xs.chunks_exact(2) {
            let start = first_center_at_or_after(pair[0]).clamp(0, w);
            let end = first_center_at_or_after(pair[1]).clamp(0, w);
            for cell in &mut line[start as usize..end.max(start) as usize] {
                *cell = true;
            }
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<[f64; 2]> {
        vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]
    }

    #[test]
    fn square_hundred_pixels() {
        let m = rasterize_even_odd(&[rect(0.0, 0.0, 10.0, 10.0)], 20, 20);
        assert_eq!(m.count(), 100);
        assert!(m.get(0, 0) && m.get(9, 9) && !m.get(10, 9) && !m.get(9, 10));
    }

    #[test]
    fn annulus() {
        let m = rasterize_even_odd(
            &[rect(0.0, 0.0, 10.0, 10.0), rect(3.0, 3.0, 7.0, 7.0)],
            20,
            20,
        );
        assert_eq!(m.count(), 100 - 16);
        assert!(!m.get(5, 5));
    }

    #[test]
    fn nothing_to_fill() {
        assert_eq!(rasterize_even_odd(&[], 8, 8).count(), 0);
    }

    #[test]
    fn clipped_to_raster() {
        let m = rasterize_even_odd(&[rect(-5.0, -5.0, 4.0, 50.0)], 8, 8);
        assert_eq!(m.count(), 4 * 8);
    }

    #[test]
    fn implicit_closing_edge() {
        let open = vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0], [0.0, 10.0]];
        assert_eq!(rasterize_even_odd(&[open], 20, 20).count(), 100);
    }

    #[test]
    fn center_rounding_helper() {
        assert_eq!(first_center_at_or_after(0.5), 0);
        assert_eq!(first_center_at_or_after(0.50001), 1);
        assert_eq!(first_center_at_or_after(-3.0), -3);
        assert_eq!(first_center_at_or_after(10.0), 10);
    }
}
