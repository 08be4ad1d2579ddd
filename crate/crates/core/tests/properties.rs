//! Randomized invariant checks over the geometry, metric, and pipeline
//! layers.

use proptest::prelude::*;

use acpv_core::geom::{douglas_peucker_indices, point_segment_dist_sq};
use acpv_core::metrics::betti::betti;
use acpv_core::metrics::counts::{c_iou, n_ratio};
use acpv_core::metrics::polis::polis;
use acpv_core::metrics::v2b::v2b;
use acpv_core::partition::{LabeledPolygon, Ring};
use acpv_core::pslg::reconstruct;
use acpv_core::raster::LabelMask;
use acpv_core::synth::{generate_partition, rasterize, NoiseConfig, SynthConfig};
use acpv_core::validate::validate_acpv;
use acpv_core::Point64;

fn arb_polyline(max_len: usize) -> impl Strategy<Value = Vec<Point64>> {
    prop::collection::vec((0.0f64..64.0, 0.0f64..64.0), 2..max_len).prop_map(|raw| {
        let mut pts: Vec<Point64> = Vec::new();
        for (x, y) in raw {
            let p = Point64::new((x * 4.0).round() / 4.0, (y * 4.0).round() / 4.0);
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            pts.push(Point64::new(pts[0].x + 1.0, pts[0].y));
        }
        pts
    })
}

fn arb_polygon() -> impl Strategy<Value = LabeledPolygon> {
    // Star-shaped polygon around a center: angles sorted, radii random.
    (3usize..12, 0.5f64..8.0).prop_flat_map(|(n, _)| {
        prop::collection::vec(1.0f64..10.0, n).prop_map(|radii| {
            let n = radii.len();
            let ring: Vec<Point64> = radii
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let a = i as f64 / n as f64 * std::f64::consts::TAU;
                    Point64::new(16.0 + r * a.cos(), 16.0 + r * a.sin())
                })
                .collect();
            LabeledPolygon { class: 0, outer: Ring(ring), holes: vec![] }
        })
    })
}

fn dist_to_polyline(p: Point64, pts: &[Point64]) -> f64 {
    pts.windows(2)
        .map(|w| point_segment_dist_sq(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Textbook recursive Douglas-Peucker, kept independent of the library
/// implementation: farthest point split, strict tolerance test, first
/// index wins ties.
fn dp_reference(pts: &[Point64], lo: usize, hi: usize, eps: f64, keep: &mut Vec<usize>) {
    if hi <= lo + 1 {
        return;
    }
    let (mut max_d, mut max_i) = (f64::NEG_INFINITY, lo + 1);
    for i in lo + 1..hi {
        let d = point_segment_dist_sq(pts[i], pts[lo], pts[hi]);
        if d > max_d {
            max_d = d;
            max_i = i;
        }
    }
    if max_d.sqrt() > eps {
        dp_reference(pts, lo, max_i, eps, keep);
        keep.push(max_i);
        dp_reference(pts, max_i, hi, eps, keep);
    }
}

fn small_cfg(seed: u64) -> SynthConfig {
    SynthConfig {
        seed,
        width: 40,
        height: 40,
        num_classes: 4,
        cell_count: 7,
        hole_probability: 0.3,
        heatmap_sigma: 1.5,
        noise: NoiseConfig::default(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_stays_within_epsilon(pts in arb_polyline(40), eps in 0.0f64..5.0) {
        let kept = douglas_peucker_indices(&pts, eps);
        let simplified: Vec<Point64> = kept.iter().map(|&i| pts[i]).collect();
        for &p in &pts {
            prop_assert!(dist_to_polyline(p, &simplified) <= eps + 1e-9);
        }
    }

    #[test]
    fn dp_matches_recursive_reference(pts in arb_polyline(30), eps in 0.0f64..4.0) {
        let lib = douglas_peucker_indices(&pts, eps);
        let mut reference = vec![0];
        dp_reference(&pts, 0, pts.len() - 1, eps, &mut reference);
        reference.push(pts.len() - 1);
        reference.sort_unstable();
        reference.dedup();
        prop_assert_eq!(lib, reference);
    }

    #[test]
    fn polis_is_symmetric(a in arb_polygon(), b in arb_polygon()) {
        prop_assert_eq!(polis(&a, &b), polis(&b, &a));
    }

    #[test]
    fn c_iou_bounded_by_iou(a in arb_polygon(), b in arb_polygon(), iou in 0.0f64..=1.0) {
        let c = c_iou(iou, &a, &b);
        prop_assert!(c <= iou + 1e-15);
        let equal_counts = (n_ratio(&a, &b) - 1.0).abs() < 1e-15;
        prop_assert_eq!(c == iou && iou > 0.0, equal_counts && iou > 0.0);
    }

    #[test]
    fn betti_matches_flood_fill_oracle(bits in prop::collection::vec(any::<bool>(), 64)) {
        let (w, h) = (8usize, 8usize);
        let (b0, b1) = betti(&bits, w, h);
        prop_assert_eq!(b0, oracle_components(&bits, w, h, true, false));
        let enclosed = oracle_components(&bits, w, h, false, true);
        prop_assert_eq!(b1, enclosed);
    }

    #[test]
    fn v2b_monotone_in_delta(bits in prop::collection::vec(0u16..3, 64),
                             peaks in prop::collection::vec((0.0f64..8.0, 0.0f64..8.0), 1..6)) {
        let mask = LabelMask::new(8, 8, bits, 3);
        let pts: Vec<Point64> = peaks.iter().map(|&(x, y)| Point64::new(x, y)).collect();
        if let Some((fracs, mean)) = v2b(&pts, &mask, &[1.0, 2.0, 4.0, 8.0]) {
            prop_assert!(fracs.windows(2).all(|w| w[0] <= w[1] + 1e-15));
            prop_assert!((0.0..=1.0).contains(&mean));
        }
    }

    #[test]
    fn synth_round_trip_is_fixpoint(seed in 0u64..200) {
        let p = generate_partition(&small_cfg(seed)).unwrap();
        prop_assert!(validate_acpv(&p).all_ok());
        let m1 = rasterize(&p);
        let rec = reconstruct(&m1).unwrap();
        prop_assert!(validate_acpv(&rec).all_ok());
        prop_assert_eq!(&m1.labels, &rasterize(&rec).labels);
    }
}

/// Independent component counter: BFS flood fill.
fn oracle_components(bits: &[bool], w: usize, h: usize, foreground: bool, enclosed: bool) -> usize {
    let val = |x: usize, y: usize| bits[y * w + x] == foreground;
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for sy in 0..h {
        for sx in 0..w {
            if !val(sx, sy) || seen[sy * w + sx] {
                continue;
            }
            let mut queue = vec![(sx, sy)];
            seen[sy * w + sx] = true;
            let mut touches_border = false;
            while let Some((x, y)) = queue.pop() {
                if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                    touches_border = true;
                }
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        // Foreground uses 8-connectivity, background 4.
                        if !foreground && dx != 0 && dy != 0 {
                            continue;
                        }
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if val(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            queue.push((nx, ny));
                        }
                    }
                }
            }
            if !enclosed || !touches_border {
                count += 1;
            }
        }
    }
    count
}
