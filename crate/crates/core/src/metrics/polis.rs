//! PoLiS: symmetric mean vertex-to-boundary distance between matched
//! polygons. Hole rings contribute both vertices and boundary segments.

use crate::geom::point_segment_dist_sq;
use crate::partition::LabeledPolygon;
use crate::Point64;

pub fn polis(a: &LabeledPolygon, b: &LabeledPolygon) -> f64 {
    0.5 * (mean_vertex_to_boundary(a, b) + mean_vertex_to_boundary(b, a))
}

fn mean_vertex_to_boundary(from: &LabeledPolygon, to: &LabeledPolygon) -> f64 {
    let segs: Vec<(Point64, Point64)> = to.segments().collect();
    assert!(!segs.is_empty(), "degenerate polygon");
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in from.vertices() {
        let d = segs
            .iter()
            .map(|&(a, b)| point_segment_dist_sq(v, a, b))
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        sum += d;
        n += 1;
    }
    sum / n as f64
}
