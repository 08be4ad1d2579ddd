//! Vertex-to-boundary alignment: fraction of heatmap peaks lying within
//! a distance delta of the nearest semantic boundary of the label mask.

use crate::geom::point_segment_dist_sq;
use crate::raster::LabelMask;
use crate::Point64;

/// Interior label-transition pixel-edges of a mask as unit segments in
/// pixel-corner coordinates. Image-border edges are excluded.
pub fn boundary_segments(mask: &LabelMask) -> Vec<(Point64, Point64)> {
    let (w, h) = (mask.width, mask.height);
    let mut segs = Vec::new();
    // Vertical edges between horizontally adjacent pixels.
    for y in 0..h {
        for x in 1..w {
            if mask.get(x - 1, y) != mask.get(x, y) {
                segs.push((
                    Point64::new(x as f64, y as f64),
                    Point64::new(x as f64, y as f64 + 1.0),
                ));
            }
        }
    }
    // Horizontal edges between vertically adjacent pixels.
    for y in 1..h {
        for x in 0..w {
            if mask.get(x, y - 1) != mask.get(x, y) {
                segs.push((
                    Point64::new(x as f64, y as f64),
                    Point64::new(x as f64 + 1.0, y as f64),
                ));
            }
        }
    }
    segs
}

/// Per-delta alignment fractions plus their mean. Returns `None` when
/// there are no peaks or the mask has no interior boundary (undefined).
pub fn v2b(peaks: &[Point64], mask: &LabelMask, deltas: &[f64]) -> Option<(Vec<f64>, f64)> {
    if peaks.is_empty() {
        return None;
    }
    let segs = boundary_segments(mask);
    if segs.is_empty() {
        return None;
    }
    let dists: Vec<f64> = peaks
        .iter()
        .map(|&p| {
            segs.iter()
                .map(|&(a, b)| point_segment_dist_sq(p, a, b))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect();
    let fracs: Vec<f64> = deltas
        .iter()
        .map(|&d| dists.iter().filter(|&&x| x <= d).count() as f64 / dists.len() as f64)
        .collect();
    let mean = fracs.iter().sum::<f64>() / fracs.len() as f64;
    Some((fracs, mean))
}
