//! End-to-end vectorization: mask (+ optional heatmap) to labeled
//! planar partition, and the per-class independent-contour baseline
//! used for ablation comparisons.

use crate::error::PslgError;
use crate::partition::Partition;
use crate::pslg::{assemble_and_label, build_overdense_pslg, decompose_chains, reconstruct};
use crate::raster::{Heatmap, LabelMask};
use crate::simplify::{dp_simplify, extract_peaks, project_peaks, vss_simplify, SimplifyStats};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimplifyMode {
    /// Faithful reconstruction, no vertex removal beyond collinear runs.
    None,
    /// Douglas-Peucker per chain at the given tolerance (pixels).
    Dp { epsilon: f64 },
    /// Vertex-guided: keep anchors plus heatmap keypoints projected
    /// within `tau` pixels; peaks from 3x3 NMS at `nms_threshold`.
    Vss { tau: f64, nms_threshold: f32 },
}

#[derive(Debug)]
pub struct VectorizeOutput {
    pub partition: Partition,
    pub stats: SimplifyStats,
    /// Detected heatmap peaks (empty unless mode was Vss).
    pub peaks: Vec<crate::simplify::Peak>,
}

/// Vectorize a label mask into a valid labeled partition. `heatmap` is
/// required for `SimplifyMode::Vss` (the caller must check first).
pub fn vectorize(
    mask: &LabelMask,
    heatmap: Option<&Heatmap>,
    mode: SimplifyMode,
) -> Result<VectorizeOutput, PslgError> {
    match mode {
        SimplifyMode::None => Ok(VectorizeOutput {
            partition: reconstruct(mask)?,
            stats: SimplifyStats::default(),
            peaks: Vec::new(),
        }),
        SimplifyMode::Dp { epsilon } => {
            let pslg = build_overdense_pslg(mask);
            let chains = decompose_chains(&pslg);
            let (simplified, stats) = dp_simplify(&pslg, &chains, epsilon);
            Ok(VectorizeOutput {
                partition: assemble_and_label(&simplified, mask)?,
                stats,
                peaks: Vec::new(),
            })
        }
        SimplifyMode::Vss { tau, nms_threshold } => {
            let hm = heatmap.expect("vss mode requires a heatmap");
            let pslg = build_overdense_pslg(mask);
            let chains = decompose_chains(&pslg);
            let peaks = extract_peaks(hm, nms_threshold);
            let keypoints = project_peaks(&peaks, &pslg, &chains, tau);
            let (simplified, stats) = vss_simplify(&pslg, &chains, &keypoints);
            Ok(VectorizeOutput {
                partition: assemble_and_label(&simplified, mask)?,
                stats,
                peaks: peaks.peaks,
            })
        }
    }
}

/// Ablation baseline: trace and simplify each class's binary mask
/// independently, then union the per-class polygons. Without the shared
/// graph, neighboring classes simplify their common boundary
/// differently, so the result generally has gaps, overlaps, and
/// unshared edges.
pub fn per_class_dp(mask: &LabelMask, epsilon: f64) -> Result<Partition, PslgError> {
    let mut polygons = Vec::new();
    for class in 0..mask.num_classes {
        let bin: Vec<u16> = mask.labels.iter().map(|&l| (l == class) as u16).collect();
        let bin_mask = LabelMask::new(mask.width, mask.height, bin, 2);
        let pslg = build_overdense_pslg(&bin_mask);
        let chains = decompose_chains(&pslg);
        let (simplified, _) = dp_simplify(&pslg, &chains, epsilon);
        let part = assemble_and_label(&simplified, &bin_mask)?;
        for mut poly in part.polygons {
            if poly.class == 1 {
                poly.class = class;
                polygons.push(poly);
            }
        }
    }
    Ok(Partition { width: mask.width, height: mask.height, polygons })
}
