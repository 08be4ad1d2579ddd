//! Evaluation metric suite: region/boundary IoU, PoLiS, MTA, vertex
//! efficiency, APLS, Betti errors, global topology rates, vertex-to-
//! boundary alignment, and heatmap peak shape, aggregated into a single
//! report.

pub mod betti;
pub mod counts;
pub mod mask;
pub mod matching;
pub mod mta;
pub mod peaks;
pub mod polis;
pub mod skeleton;
pub mod topology;
pub mod v2b;

use serde::Serialize;

use crate::partition::Partition;
use crate::raster::{Heatmap, LabelMask};
use crate::Point64;

pub use matching::{match_polygons, MatchSet};
pub use peaks::{peak_shape, PeakShape, PeakShapeWarnings};
pub use skeleton::{apls, skeleton_graph, SkeletonGraph};
pub use topology::{global_topology, TopologyRates};

/// Median / 90th-percentile pair for a distribution of per-peak values.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Percentiles {
    pub median: f64,
    pub p90: f64,
}

/// Nearest-rank percentiles (median = P50) over an unsorted sample.
pub fn percentiles(values: &[f64]) -> Option<Percentiles> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = |q: f64| {
        let idx = (q * v.len() as f64).ceil() as usize;
        v[idx.clamp(1, v.len()) - 1]
    };
    Some(Percentiles { median: rank(0.5), p90: rank(0.9) })
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ClassMetrics {
    pub class: u16,
    pub iou: f64,
    /// Flagged when the class is absent from both masks (vacuous 1.0).
    pub iou_vacuous: bool,
    pub b_iou: f64,
    /// Mean over matched polygon pairs; absent when nothing matched.
    pub polis: Option<f64>,
    pub mta: Option<f64>,
    pub n_ratio: Option<f64>,
    pub c_iou: Option<f64>,
    /// Only computed for classes configured as elongated.
    pub apls: Option<f64>,
    pub chi_err: u64,
    pub beta_err: u64,
    pub matched_pairs: usize,
    pub unmatched_pred: usize,
    pub unmatched_gt: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakStats {
    pub fwhm_x: Percentiles,
    pub fwhm_y: Percentiles,
    pub area_at_half: Percentiles,
    pub sharpness: Percentiles,
    pub peaks: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub gap_rate: f64,
    pub inter_overlap: f64,
    pub intra_overlap: f64,
    pub sec: f64,
    /// True when area rates came from the rasterized fallback overlay.
    pub rates_approximate: bool,
    /// (delta, fraction) pairs plus their mean, when peaks were supplied.
    pub v2b: Option<Vec<(f64, f64)>>,
    pub v2b_mean: Option<f64>,
    pub peak_stats: Option<PeakStats>,
}

impl MetricsReport {
    /// Mean per-class IoU (vacuous classes excluded when possible).
    pub fn mean_iou(&self) -> f64 {
        let real: Vec<f64> = self
            .per_class
            .iter()
            .filter(|c| !c.iou_vacuous)
            .map(|c| c.iou)
            .collect();
        if real.is_empty() {
            1.0
        } else {
            real.iter().sum::<f64>() / real.len() as f64
        }
    }
}

/// Knobs for patch-level evaluation.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Boundary-IoU band width in pixels.
    pub band: f64,
    /// Polygon matching IoU threshold.
    pub iou_threshold: f64,
    /// V2B distance thresholds in pixels.
    pub deltas: Vec<f64>,
    /// Classes for which APLS is computed.
    pub elongated: Vec<u16>,
    /// Peak-shape patch size (odd) and smoothing sigma.
    pub peak_patch: usize,
    pub peak_sigma: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            band: 2.0,
            iou_threshold: 0.5,
            deltas: vec![2.0, 4.0, 6.0],
            elongated: Vec::new(),
            peak_patch: 11,
            peak_sigma: 1.0,
        }
    }
}

/// Evaluate a predicted partition against ground truth on one patch.
/// Raster metrics use the prediction rasterized at pixel centers; peak
/// metrics are computed when a heatmap and its detected peaks are
/// supplied.
pub fn evaluate_patch(
    pred: &Partition,
    gt: &Partition,
    gt_mask: &LabelMask,
    heatmap_peaks: Option<(&Heatmap, &[Point64])>,
    opts: &EvalOptions,
) -> MetricsReport {
    let pred_mask = crate::synth::rasterize(pred);
    let (w, h) = (gt_mask.width as usize, gt_mask.height as usize);
    let matches = match_polygons(pred, gt, opts.iou_threshold);
    let num_classes = gt_mask
        .num_classes
        .max(pred_mask.num_classes)
        .max(gt.polygons.iter().map(|p| p.class + 1).max().unwrap_or(0));

    let mut per_class = Vec::new();
    for class in 0..num_classes {
        let (iou, iou_vacuous) = mask::region_iou(&pred_mask, gt_mask, class);
        let (b_iou, _) = mask::boundary_iou(&pred_mask, gt_mask, class, opts.band);
        let pred_bin = pred_mask.class_binary(class);
        let gt_bin = gt_mask.class_binary(class);

        let mut cm = ClassMetrics {
            class,
            iou,
            iou_vacuous,
            b_iou,
            chi_err: betti::chi_err(&pred_bin, &gt_bin, w, h),
            beta_err: betti::beta_err(&pred_bin, &gt_bin, w, h),
            ..Default::default()
        };

        let pairs: Vec<&(usize, usize, f64)> = matches
            .pairs
            .iter()
            .filter(|&&(pi, _, _)| pred.polygons[pi].class == class)
            .collect();
        cm.matched_pairs = pairs.len();
        cm.unmatched_pred = matches
            .unmatched_pred
            .iter()
            .filter(|&&pi| pred.polygons[pi].class == class)
            .count();
        cm.unmatched_gt = matches
            .unmatched_gt
            .iter()
            .filter(|&&gi| gt.polygons[gi].class == class)
            .count();
        if !pairs.is_empty() {
            let mean = |f: &dyn Fn(usize, usize) -> f64| {
                pairs.iter().map(|&&(pi, gi, _)| f(pi, gi)).sum::<f64>() / pairs.len() as f64
            };
            cm.polis = Some(mean(&|pi, gi| polis::polis(&pred.polygons[pi], &gt.polygons[gi])));
            cm.mta = Some(mean(&|pi, gi| mta::mta(&pred.polygons[pi], &gt.polygons[gi])));
            cm.n_ratio =
                Some(mean(&|pi, gi| counts::n_ratio(&pred.polygons[pi], &gt.polygons[gi])));
            cm.c_iou = Some(
                pairs
                    .iter()
                    .map(|&&(pi, gi, iou)| {
                        counts::c_iou(iou, &pred.polygons[pi], &gt.polygons[gi])
                    })
                    .sum::<f64>()
                    / pairs.len() as f64,
            );
        }
        if opts.elongated.contains(&class) {
            let gt_skel = skeleton_graph(&gt_bin, w, h);
            let pred_skel = skeleton_graph(&pred_bin, w, h);
            cm.apls = apls(&gt_skel, &pred_skel);
        }
        per_class.push(cm);
    }

    let rates = global_topology(pred);
    let (v2b_pairs, v2b_mean) = match heatmap_peaks {
        Some((_, peaks)) => match v2b::v2b(peaks, gt_mask, &opts.deltas) {
            Some((fracs, mean)) => (
                Some(opts.deltas.iter().copied().zip(fracs).collect()),
                Some(mean),
            ),
            None => (None, None),
        },
        None => (None, None),
    };
    let peak_stats = heatmap_peaks.and_then(|(hm, peaks)| {
        let (shapes, _) = peak_shape(hm, peaks, opts.peak_patch, opts.peak_sigma);
        summarize_peaks(&shapes)
    });

    MetricsReport {
        per_class,
        gap_rate: rates.gap,
        inter_overlap: rates.inter,
        intra_overlap: rates.intra,
        sec: rates.sec,
        rates_approximate: rates.approximate,
        v2b: v2b_pairs,
        v2b_mean,
        peak_stats,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "-".into(),
    }
}

/// Render one or more patch reports as an aligned-column CSV: one row
/// per (patch, class) plus a global row per patch.
pub fn reports_to_csv(names: &[String], reports: &[MetricsReport]) -> String {
    assert_eq!(names.len(), reports.len());
    let header = [
        "patch", "class", "iou", "b_iou", "polis", "mta", "n_ratio", "c_iou", "apls",
        "chi_err", "beta_err", "gap", "inter", "intra", "sec",
    ];
    let mut rows: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for (name, r) in names.iter().zip(reports) {
        for c in &r.per_class {
            rows.push(vec![
                name.clone(),
                c.class.to_string(),
                format!("{:.4}", c.iou),
                format!("{:.4}", c.b_iou),
                fmt_opt(c.polis),
                fmt_opt(c.mta),
                fmt_opt(c.n_ratio),
                fmt_opt(c.c_iou),
                fmt_opt(c.apls),
                c.chi_err.to_string(),
                c.beta_err.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
        }
        rows.push(vec![
            name.clone(),
            "global".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            format!("{:.4}", r.gap_rate),
            format!("{:.4}", r.inter_overlap),
            format!("{:.4}", r.intra_overlap),
            format!("{:.4}", r.sec),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap())
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:>w$}"))
            .collect();
        out.push_str(&line.join(", "));
        out.push('\n');
    }
    out
}

/// Summarize peak shapes into median / P90 statistics.
pub fn summarize_peaks(shapes: &[PeakShape]) -> Option<PeakStats> {
    if shapes.is_empty() {
        return None;
    }
    let col = |f: fn(&PeakShape) -> f64| {
        percentiles(&shapes.iter().map(f).collect::<Vec<_>>()).unwrap()
    };
    Some(PeakStats {
        fwhm_x: col(|s| s.fwhm_x),
        fwhm_y: col(|s| s.fwhm_y),
        area_at_half: col(|s| s.area_at_half as f64),
        sharpness: col(|s| s.sharpness),
        peaks: shapes.len(),
    })
}
