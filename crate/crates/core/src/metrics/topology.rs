//! Global topology rates: gap, inter-class overlap, intra-class overlap,
//! and shared-edge consistency (SEC). Areas are measured by exact polygon
//! overlay; a 4x-supersampled rasterization is used as a fallback when
//! the overlay degenerates (and the result is flagged approximate).

use geo::{Area, BooleanOps, MultiPolygon};

use crate::partition::{to_geo, LabeledPolygon, Partition};
use crate::Point64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyRates {
    /// Fraction of the domain covered by no polygon.
    pub gap: f64,
    /// Fraction covered by two or more polygons of different classes.
    pub inter: f64,
    /// Fraction covered by two or more polygons of the same class.
    pub intra: f64,
    /// Fraction of interior boundary segments incident to exactly two
    /// polygons with identical geometry. 1.0 when there are no interior
    /// segments.
    pub sec: f64,
    /// True when the rasterized fallback produced the area rates.
    pub approximate: bool,
}

pub fn global_topology(p: &Partition) -> TopologyRates {
    let sec = shared_edge_consistency(p);
    let exact = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| overlay_rates(p)));
    match exact {
        Ok(Some((gap, inter, intra))) => TopologyRates { gap, inter, intra, sec, approximate: false },
        _ => {
            let (gap, inter, intra) = raster_rates(p, 4);
            TopologyRates { gap, inter, intra, sec, approximate: true }
        }
    }
}

/// Exact overlay via boolean operations. Returns None on non-finite
/// results (degenerate overlay).
fn overlay_rates(p: &Partition) -> Option<(f64, f64, f64)> {
    let domain = (p.width as f64) * (p.height as f64);
    if p.polygons.is_empty() {
        return Some((1.0, 0.0, 0.0));
    }
    let polys: Vec<MultiPolygon<f64>> =
        p.polygons.iter().map(|lp| MultiPolygon(vec![to_geo(lp)])).collect();
    let boxes: Vec<_> = p.polygons.iter().map(LabeledPolygon::bbox).collect();

    // Union of pairwise intersections, split by same-class / cross-class.
    let mut inter_mp: Option<MultiPolygon<f64>> = None;
    let mut intra_mp: Option<MultiPolygon<f64>> = None;
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if !boxes_overlap(boxes[i], boxes[j]) {
                continue;
            }
            // Bounding boxes touching only along a line or point cannot
            // enclose positive intersection area.
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi.0.max(bj.0) == bi.2.min(bj.2) || bi.1.max(bj.1) == bi.3.min(bj.3) {
                continue;
            }
            let ov = polys[i].intersection(&polys[j]);
            if ov.unsigned_area() == 0.0 {
                continue;
            }
            let slot = if p.polygons[i].class == p.polygons[j].class {
                &mut intra_mp
            } else {
                &mut inter_mp
            };
            *slot = Some(match slot.take() {
                Some(acc) => acc.union(&ov),
                None => ov,
            });
        }
    }
    let inter_area = inter_mp.map_or(0.0, |m| m.unsigned_area());
    let intra_area = intra_mp.map_or(0.0, |m| m.unsigned_area());

    let covered = if inter_area == 0.0 && intra_area == 0.0 {
        // Interiors are pairwise disjoint, so the union area is just the
        // sum; skip the expensive n-way boolean union.
        polys.iter().map(Area::unsigned_area).sum::<f64>().min(domain)
    } else {
        // Balanced union: fold pairs level by level so intermediate
        // results stay small instead of one multipolygon absorbing every
        // other.
        let mut level = polys;
        while level.len() > 1 {
            level = level
                .chunks(2)
                .map(|c| if c.len() == 2 { c[0].union(&c[1]) } else { c[0].clone() })
                .collect();
        }
        level[0].unsigned_area()
    };

    let gap = ((domain - covered) / domain).max(0.0);
    let (inter, intra) = (inter_area / domain, intra_area / domain);
    if gap.is_finite() && inter.is_finite() && intra.is_finite() {
        Some((gap, inter, intra))
    } else {
        None
    }
}

fn boxes_overlap(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    a.0 <= b.2 && b.0 <= a.2 && a.1 <= b.3 && b.1 <= a.3
}

/// Supersampled point-in-polygon fallback: each subpixel center is
/// classified by strict containment against every polygon.
pub(crate) fn raster_rates(p: &Partition, scale: usize) -> (f64, f64, f64) {
    let (w, h) = (p.width as usize * scale, p.height as usize * scale);
    let (mut gap, mut inter, mut intra) = (0u64, 0u64, 0u64);
    let mut classes: Vec<u16> = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let c = Point64::new(
                (i as f64 + 0.5) / scale as f64,
                (j as f64 + 0.5) / scale as f64,
            );
            classes.clear();
            for lp in &p.polygons {
                if lp.contains_strict(c) {
                    classes.push(lp.class);
                }
            }
            match classes.len() {
                0 => gap += 1,
                1 => {}
                _ => {
                    let first = classes[0];
                    if classes.iter().any(|&c| c != first) {
                        inter += 1;
                    }
                    // Any class appearing twice?
                    let mut sorted = classes.clone();
                    sorted.sort_unstable();
                    if sorted.windows(2).any(|w| w[0] == w[1]) {
                        intra += 1;
                    }
                }
            }
        }
    }
    let total = (w * h) as f64;
    (gap as f64 / total, inter as f64 / total, intra as f64 / total)
}

/// Canonical key for an undirected segment: endpoints ordered by (y, x),
/// encoded by exact f64 bits (with +0.0 normalization).
fn seg_key(a: Point64, b: Point64) -> ([u64; 2], [u64; 2]) {
    let enc = |p: Point64| [(p.y + 0.0).to_bits(), (p.x + 0.0).to_bits()];
    let (ka, kb) = (enc(a), enc(b));
    if ka <= kb {
        (ka, kb)
    } else {
        (kb, ka)
    }
}

fn on_border(a: Point64, b: Point64, w: f64, h: f64) -> bool {
    (a.x == 0.0 && b.x == 0.0)
        || (a.x == w && b.x == w)
        || (a.y == 0.0 && b.y == 0.0)
        || (a.y == h && b.y == h)
}

/// SEC over interior segment instances: a segment instance is "shared"
/// when its exact geometry occurs in precisely two polygons' rings.
pub fn shared_edge_consistency(p: &Partition) -> f64 {
    let (w, h) = (p.width as f64, p.height as f64);
    let mut counts: std::collections::HashMap<([u64; 2], [u64; 2]), u32> =
        std::collections::HashMap::new();
    let mut interior: Vec<([u64; 2], [u64; 2])> = Vec::new();
    for lp in &p.polygons {
        for (a, b) in lp.segments() {
            let key = seg_key(a, b);
            *counts.entry(key).or_insert(0) += 1;
            if !on_border(a, b, w, h) {
                interior.push(key);
            }
        }
    }
    if interior.is_empty() {
        return 1.0;
    }
    let shared = interior.iter().filter(|k| counts[*k] == 2).count();
    shared as f64 / interior.len() as f64
}
