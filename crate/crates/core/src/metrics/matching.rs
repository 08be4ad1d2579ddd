//! One-to-one polygon matching between predicted and ground-truth
//! partitions: greedy by descending IoU within each class, keeping only
//! pairs whose IoU exceeds 0.5.

use geo::{Area, BooleanOps, MultiPolygon};

use crate::partition::{to_geo, LabeledPolygon, Partition};

#[derive(Debug, Clone, Default)]
pub struct MatchSet {
    /// (pred polygon index, gt polygon index, IoU), one-to-one.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_pred: Vec<usize>,
    pub unmatched_gt: Vec<usize>,
}

/// Area IoU of two polygons via exact overlay, with a bounding-box
/// prefilter.
pub fn polygon_iou(a: &LabeledPolygon, b: &LabeledPolygon) -> f64 {
    let (ba, bb) = (a.bbox(), b.bbox());
    if ba.0 > bb.2 || bb.0 > ba.2 || ba.1 > bb.3 || bb.1 > ba.3 {
        return 0.0;
    }
    let (ga, gb) = (
        MultiPolygon(vec![to_geo(a)]),
        MultiPolygon(vec![to_geo(b)]),
    );
    let inter = ga.intersection(&gb).unsigned_area();
    if inter == 0.0 {
        return 0.0;
    }
    let union = ga.union(&gb).unsigned_area();
    if union == 0.0 {
        0.0
    } else {
        inter / union
    }
}

pub fn match_polygons(pred: &Partition, gt: &Partition, iou_threshold: f64) -> MatchSet {
    // Candidate pairs within each class, above threshold.
    let mut cands: Vec<(usize, usize, f64)> = Vec::new();
    for (i, pp) in pred.polygons.iter().enumerate() {
        for (j, gp) in gt.polygons.iter().enumerate() {
            if pp.class != gp.class {
                continue;
            }
            let iou = polygon_iou(pp, gp);
            if iou > iou_threshold {
                cands.push((i, j, iou));
            }
        }
    }
    // Greedy by descending IoU; index order breaks exact ties.
    cands.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut used_pred = vec![false; pred.polygons.len()];
    let mut used_gt = vec![false; gt.polygons.len()];
    let mut pairs = Vec::new();
    for (i, j, iou) in cands {
        if !used_pred[i] && !used_gt[j] {
            used_pred[i] = true;
            used_gt[j] = true;
            pairs.push((i, j, iou));
        }
    }
    MatchSet {
        pairs,
        unmatched_pred: (0..pred.polygons.len()).filter(|&i| !used_pred[i]).collect(),
        unmatched_gt: (0..gt.polygons.len()).filter(|&j| !used_gt[j]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::partition::Ring;

    fn rect(class: u16, x0: f64, y0: f64, x1: f64, y1: f64) -> LabeledPolygon {
        LabeledPolygon {
            class,
            outer: Ring(vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ]),
            holes: vec![],
        }
    }

    fn part(polys: Vec<LabeledPolygon>) -> Partition {
        Partition { width: 10, height: 10, polygons: polys }
    }

    #[test]
    fn identical_polygons_match_with_iou_one() {
        let p = part(vec![rect(0, 1.0, 1.0, 4.0, 4.0)]);
        let m = match_polygons(&p, &p, 0.5);
        assert_eq!(m.pairs, vec![(0, 0, 1.0)]);
        assert!(m.unmatched_pred.is_empty() && m.unmatched_gt.is_empty());
    }

    #[test]
    fn half_overlap_iou_one_third_not_matched() {
        // 2x2 squares overlapping by half: IoU = 2/6 < 0.5.
        let a = part(vec![rect(0, 0.0, 0.0, 2.0, 2.0)]);
        let b = part(vec![rect(0, 1.0, 0.0, 3.0, 2.0)]);
        assert!((polygon_iou(&a.polygons[0], &b.polygons[0]) - 1.0 / 3.0).abs() < 1e-12);
        let m = match_polygons(&a, &b, 0.5);
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_pred, vec![0]);
        assert_eq!(m.unmatched_gt, vec![0]);
    }

    #[test]
    fn classes_never_cross_match() {
        let a = part(vec![rect(0, 0.0, 0.0, 4.0, 4.0)]);
        let b = part(vec![rect(1, 0.0, 0.0, 4.0, 4.0)]);
        assert!(match_polygons(&a, &b, 0.5).pairs.is_empty());
    }

    #[test]
    fn greedy_prefers_higher_iou() {
        // Pred 0 overlaps gt 0 strongly and gt 1 weakly; pred 1 only
        // gt 0 moderately. Greedy must give gt 0 to pred 0.
        let pred = part(vec![rect(0, 0.0, 0.0, 4.0, 4.0), rect(0, 0.0, 1.0, 4.0, 6.0)]);
        let gt = part(vec![rect(0, 0.0, 0.0, 4.0, 4.5)]);
        let m = match_polygons(&pred, &gt, 0.5);
        assert_eq!(m.pairs.len(), 1);
        assert_eq!((m.pairs[0].0, m.pairs[0].1), (0, 0));
    }

    #[test]
    fn disjoint_bboxes_short_circuit() {
        assert_eq!(
            polygon_iou(&rect(0, 0.0, 0.0, 1.0, 1.0), &rect(0, 5.0, 5.0, 6.0, 6.0)),
            0.0
        );
    }
}
