//! Maximum tangent-angle deviation between matched contours.

use crate::geom::point_segment_dist_sq;
use crate::partition::LabeledPolygon;
use crate::Point64;

/// Sample the predicted boundary at 1 px arc-length spacing; compare the
/// tangent of each sample's segment against the tangent at the nearest
/// ground-truth boundary point. Differences are folded axially to
/// [0°, 90°] so reversed orientation scores zero; the maximum is
/// returned in degrees.
pub fn mta(pred: &LabeledPolygon, gt: &LabeledPolygon) -> f64 {
    let gt_segs: Vec<(Point64, Point64)> = gt.segments().collect();
    assert!(!gt_segs.is_empty(), "degenerate contour");
    let mut max_dev: f64 = 0.0;
    for (a, b) in pred.segments() {
        let len = a.dist(b);
        let theta_p = (b.y - a.y).atan2(b.x - a.x);
        let steps = (len / 1.0).ceil().max(1.0) as usize;
        for s in 0..steps {
            let t = (s as f64 + 0.5) / steps as f64;
            let p = Point64::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
            let (ga, gb) = gt_segs
                .iter()
                .min_by(|s1, s2| {
                    point_segment_dist_sq(p, s1.0, s1.1)
                        .total_cmp(&point_segment_dist_sq(p, s2.0, s2.1))
                })
                .copied()
                .unwrap();
            let theta_g = (gb.y - ga.y).atan2(gb.x - ga.x);
            max_dev = max_dev.max(axial_fold(theta_p - theta_g));
        }
    }
    max_dev.to_degrees()
}

/// Wrap to [-pi, pi], take |.|, then fold to [0, pi/2] (tangent lines
/// have no direction).
fn axial_fold(diff: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut d = diff.rem_euclid(2.0 * pi);
    if d > pi {
        d = 2.0 * pi - d;
    }
    if d > pi / 2.0 {
        d = pi - d;
    }
    d
}
