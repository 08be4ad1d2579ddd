//! Vertex-efficiency metrics: N-ratio and efficiency-aware IoU.

use crate::partition::LabeledPolygon;

/// N_A / N_B, closing duplicates not counted, hole-ring vertices
/// included.
pub fn n_ratio(a: &LabeledPolygon, b: &LabeledPolygon) -> f64 {
    a.vertex_count() as f64 / b.vertex_count() as f64
}

/// Relative vertex-count deviation |N_A - N_B| / (N_A + N_B).
pub fn relative_deviation(a: &LabeledPolygon, b: &LabeledPolygon) -> f64 {
    let (na, nb) = (a.vertex_count() as f64, b.vertex_count() as f64);
    (na - nb).abs() / (na + nb)
}

/// IoU discounted by the relative vertex-count deviation.
pub fn c_iou(iou: f64, a: &LabeledPolygon, b: &LabeledPolygon) -> f64 {
    iou * (1.0 - relative_deviation(a, b))
}
