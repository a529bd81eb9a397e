mod common;

use common::{oracle_interior, random_polygons};
use curvedlp::cure_mask::{
    generate_mask, rasterize_even_odd, thickness_at_pixel, DropAxis, ProjectionTransform,
    ThicknessGrid, ThicknessProfile,
};
use curvedlp::cure_model::{cure_depth, grayscale_for_depth};
use curvedlp::mesh_io::Aabb;
use curvedlp::slicer::{ContourLoop, LayerContour};
use nalgebra::Point3;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Pixel-space polygons as a flat layer (world == pixels under `unit_xf`).
fn as_layer(polygons: &[Vec<[f64; 2]>]) -> LayerContour {
    LayerContour {
        layer_index: 0,
        iso_value: 0.0,
        loops: polygons
            .iter()
            .map(|p| ContourLoop {
                points: p.iter().map(|q| Point3::new(q[0], q[1], 0.0)).collect(),
                closed: true,
            })
            .collect(),
        segment_count: 0,
    }
}

fn unit_xf(size: usize) -> ProjectionTransform {
    ProjectionTransform::new(DropAxis::Z, 1.0, [0.0, 0.0], size, size).unwrap()
}

proptest! {
    #[test]
    fn scanline_fill_matches_point_tests(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let polys = random_polygons(&mut rng, 64.0);
        let map = rasterize_even_odd(&polys, 64, 64);
        prop_assert_eq!(map.cells, oracle_interior(&polys, 64, 64));
    }

    #[test]
    fn integer_shift_moves_the_map_exactly(seed in any::<u64>(), dx in -16i32..16, dy in -16i32..16) {
        let mut rng = StdRng::seed_from_u64(seed);
        // dyadic coordinates so the shift itself is exact
        let polys: Vec<Vec<[f64; 2]>> = random_polygons(&mut rng, 48.0)
            .into_iter()
            .map(|p| p.into_iter().map(|q| q.map(|c| (c * 64.0).round() / 64.0)).collect())
            .collect();
        let moved: Vec<Vec<[f64; 2]>> = polys
            .iter()
            .map(|p| p.iter().map(|q| [q[0] + f64::from(dx), q[1] + f64::from(dy)]).collect())
            .collect();
        let a = rasterize_even_odd(&polys, 64, 64);
        let b = rasterize_even_odd(&moved, 64, 64);
        for y in 0..64i32 {
            for x in 0..64i32 {
                let (x2, y2) = (x + dx, y + dy);
                if (0..64).contains(&x2) && (0..64).contains(&y2) {
                    prop_assert_eq!(a.get(x as usize, y as usize), b.get(x2 as usize, y2 as usize));
                }
            }
        }
    }

    #[test]
    fn mask_statistics_agree_with_oracles(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let params = common::fixture_params(1.0);
        let polys = random_polygons(&mut rng, 48.0);
        let top = 1.3 * params.max_depth();
        let grid = ThicknessGrid::new(4, 3, (0..12).map(|_| rng.random_range(0.0..top)).collect()).unwrap();
        let profile = ThicknessProfile::SampledGrid(grid);
        let xf = unit_xf(48);
        let mask = generate_mask(&as_layer(&polys), &xf, &profile, &params, None).unwrap();
        let interior = oracle_interior(&polys, 48, 48);

        let mut exposed = 0;
        let mut saturated = 0;
        for y in 0..48 {
            for x in 0..48 {
                let g = mask.get(x, y);
                if !interior[y * 48 + x] {
                    prop_assert_eq!(g, 0);
                    continue;
                }
                exposed += 1;
                if g == 0 || g == 255 {
                    saturated += 1;
                    continue;
                }
                let h = thickness_at_pixel((x as f64 + 0.5) / 48.0, (y as f64 + 0.5) / 48.0, &profile, None)
                    .unwrap()
                    .depth;
                let achieved = cure_depth(&params, i32::from(g)).unwrap().depth;
                prop_assert!((achieved - h).abs() <= params.quantization_bound(g) * (1.0 + 1e-9));
            }
        }
        let s = mask.stats;
        prop_assert_eq!(s.exposed_pixels, exposed);
        prop_assert_eq!(s.saturated_pixels, saturated);
        prop_assert_eq!(s.exposed_area, exposed as f64);
        let ratio = if exposed > 0 { saturated as f64 / exposed as f64 } else { 0.0 };
        prop_assert_eq!(s.saturation_ratio, ratio);
        if exposed > 0 {
            let inside: Vec<u8> = mask.pixels.iter().zip(&interior).filter(|(_, &i)| i).map(|(&g, _)| g).collect();
            prop_assert_eq!(s.gray_min, *inside.iter().min().unwrap());
            prop_assert_eq!(s.gray_max, *inside.iter().max().unwrap());
        }
    }
}

fn world_square(side: f64) -> LayerContour {
    let c = [
        [0.0, 0.0],
        [side, 0.0],
        [side, side],
        [0.0, side],
        [0.0, 0.0],
    ];
    as_layer(&[c.to_vec()])
}

#[test]
fn exposed_area_converges_to_true_area() {
    let side = 7.3;
    let layer = world_square(side);
    let bounds = Aabb {
        min: Point3::new(0.0, 0.0, 0.0),
        max: Point3::new(side, side, 0.0),
    };
    for pitch in [0.2, 0.1, 0.05, 0.025] {
        let xf = ProjectionTransform::fit(&bounds, DropAxis::Z, 400, 400, 4, Some(pitch)).unwrap();
        let params = common::fixture_params(pitch);
        let mask =
            generate_mask(&layer, &xf, &ThicknessProfile::Constant(0.1), &params, None).unwrap();
        let a = mask.stats.exposed_area;
        assert_eq!(a, mask.stats.exposed_pixels as f64 * pitch * pitch);
        assert!(
            (a - side * side).abs() <= 4.0 * side * pitch,
            "pitch {pitch}: {a}"
        );
    }
}

#[test]
fn deep_profile_saturates_every_pixel() {
    let params = common::fixture_params(0.1);
    let layer = world_square(3.0);
    let xf = ProjectionTransform::new(DropAxis::Z, 10.0, [5.0, 5.0], 40, 40).unwrap();
    let deep = ThicknessProfile::Constant(params.max_depth() + 0.01);
    let mask = generate_mask(&layer, &xf, &deep, &params, None).unwrap();
    assert_eq!(mask.stats.saturation_ratio, 1.0);
    assert_eq!((mask.stats.gray_min, mask.stats.gray_max), (255, 255));

    let h = 0.2;
    let g = grayscale_for_depth(&params, h).unwrap();
    let flat = generate_mask(&layer, &xf, &ThicknessProfile::Constant(h), &params, None).unwrap();
    assert_eq!(flat.stats.saturation_ratio, 0.0);
    assert_eq!(
        (flat.stats.gray_min, flat.stats.gray_max),
        (g.value, g.value)
    );
}
