//! Chain simplification: vertex-guided subset selection (VSS) driven by
//! heatmap peaks, and a Douglas-Peucker baseline. Both operate on the
//! anchor-bounded chains of an overdense PSLG and re-insert original
//! vertices as needed to keep the simplified graph planar.

use std::collections::HashSet;

use crate::geom::{douglas_peucker_indices, segments_intersect, SegIntersection};
use crate::pslg::{pslg_from_chains, Chain, ChainSet, Pslg};
use crate::raster::Heatmap;
use crate::Point64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Peak cell position in pixel-corner coordinates; heatmap cell
    /// (x, y) samples the field at the lattice corner (x, y).
    pub position: Point64,
    pub score: f32,
}

#[derive(Debug, Clone, Default)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

/// 3x3 non-maximum suppression. A cell is a peak iff its value is at
/// least `threshold` and strictly greater than every 8-neighbor; on
/// plateau ties the first cell in row-major order wins.
pub fn extract_peaks(hm: &Heatmap, threshold: f32) -> PeakSet {
    assert!((0.0..=1.0).contains(&threshold));
    let (w, h) = (hm.width as i64, hm.height as i64);
    let mut peaks = Vec::new();
    for y in 0..h {
        'cell: for x in 0..w {
            let v = hm.get(x as u32, y as u32);
            if v < threshold {
                continue;
            }
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let nv = hm.get(nx as u32, ny as u32);
                    let later = ny > y || (ny == y && nx > x);
                    if nv > v || (nv == v && !later) {
                        continue 'cell;
                    }
                }
            }
            peaks.push(Peak {
                position: Point64::new(x as f64, y as f64),
                score: v,
            });
        }
    }
    PeakSet { peaks }
}

/// Assign each peak to its globally nearest chain vertex within `tau`
/// pixels. Ties within 1e-9 prefer anchor vertices (a peak sitting
/// symmetrically between a junction and its lattice neighbors belongs
/// to the junction), then the lower chain index. Returns the kept
/// positions (indices into each chain's vertex list), sorted by arc
/// length and deduplicated.
pub fn project_peaks(
    peaks: &PeakSet,
    pslg: &Pslg,
    chains: &ChainSet,
    tau: f64,
) -> Vec<Vec<usize>> {
    assert!(tau > 0.0);
    let mut keypoints: Vec<Vec<usize>> = vec![Vec::new(); chains.chains.len()];
    for peak in &peaks.peaks {
        // (distance, non-anchor rank, chain, position), lexicographic.
        let mut best: Option<(f64, bool, usize, usize)> = None;
        for (ci, chain) in chains.chains.iter().enumerate() {
            for (pos, &vid) in chain.vertices.iter().enumerate() {
                let d = peak.position.dist(pslg.points[vid as usize]);
                let cand = (d, !chains.is_anchor[vid as usize], ci, pos);
                let better = match best {
                    None => true,
                    Some(b) => {
                        if d + 1e-9 < b.0 {
                            true
                        } else if d > b.0 + 1e-9 {
                            false
                        } else {
                            (cand.1, cand.2, cand.3) < (b.1, b.2, b.3)
                        }
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        if let Some((d, _, ci, pos)) = best {
            if d <= tau {
                keypoints[ci].push(pos);
            }
        }
    }
    for kp in &mut keypoints {
        kp.sort_unstable();
        kp.dedup();
    }
    keypoints
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SimplifyStats {
    /// Chains whose simplification collapsed and were kept in full.
    pub collapsed_chains: usize,
    /// Vertices re-inserted by the planarity repair.
    pub reinserted: usize,
}

/// A simplified chain: the subset of original vertex positions kept.
#[derive(Debug, Clone)]
struct SimpChain {
    /// Indices into the original chain's vertex list, ascending.
    kept: Vec<usize>,
    is_loop: bool,
}

/// Simplify by keeping anchors plus projected keypoints on every chain.
pub fn vss_simplify(
    pslg: &Pslg,
    chains: &ChainSet,
    keypoints: &[Vec<usize>],
) -> (Pslg, SimplifyStats) {
    let mut stats = SimplifyStats::default();
    let mut simp = Vec::with_capacity(chains.chains.len());
    for (ci, chain) in chains.chains.iter().enumerate() {
        let m = chain.vertices.len();
        let kp = keypoints.get(ci).map(Vec::as_slice).unwrap_or(&[]);
        let kept = if chain.is_loop {
            // Anchor-free loop: keypoints only, padded to a 3-point ring.
            let mut kept: Vec<usize> = kp.to_vec();
            pad_ring(&mut kept, chain, pslg, 3);
            kept
        } else if chain.vertices[0] == chain.vertices[m - 1] {
            // Closed chain anchored at one vertex: endpoints plus interior
            // keypoints, padded so the ring keeps >= 3 distinct vertices.
            let mut kept = vec![0];
            kept.extend(kp.iter().copied().filter(|&p| p > 0 && p < m - 1));
            pad_ring(&mut kept, chain, pslg, 3);
            if !kept.contains(&(m - 1)) {
                kept.push(m - 1);
            }
            kept
        } else {
            let mut kept = vec![0];
            kept.extend(kp.iter().copied().filter(|&p| p > 0 && p < m - 1));
            kept.push(m - 1);
            kept
        };
        let kept = match sanitize(kept, chain, pslg) {
            Some(k) => k,
            None => {
                stats.collapsed_chains += 1;
                full_chain(chain)
            }
        };
        simp.push(SimpChain { kept, is_loop: chain.is_loop });
    }
    stats.reinserted = repair_planarity(pslg, chains, &mut simp);
    (finish(pslg, chains, &simp), stats)
}

/// Simplify each chain with Douglas-Peucker at tolerance `epsilon`;
/// anchors are always kept and closed chains are split at their farthest
/// point pair first.
pub fn dp_simplify(pslg: &Pslg, chains: &ChainSet, epsilon: f64) -> (Pslg, SimplifyStats) {
    assert!(epsilon >= 0.0);
    let mut stats = SimplifyStats::default();
    let mut simp = Vec::with_capacity(chains.chains.len());
    for chain in &chains.chains {
        let pts = chain.points(pslg);
        let m = pts.len();
        let kept: Vec<usize> = if chain.is_loop {
            // Split the cycle at the farthest Euclidean pair.
            let (i, j) = farthest_pair(&pts);
            let arc_a: Vec<Point64> = cyclic_slice(&pts, i, j);
            let arc_b: Vec<Point64> = cyclic_slice(&pts, j, i);
            let mut kept: Vec<usize> = douglas_peucker_indices(&arc_a, epsilon)
                .iter()
                .map(|&k| (i + k) % m)
                .collect();
            kept.extend(
                douglas_peucker_indices(&arc_b, epsilon)
                    .iter()
                    .skip(1)
                    .take(arc_b.len().saturating_sub(2))
                    .map(|&k| (j + k) % m),
            );
            kept.sort_unstable();
            kept.dedup();
            kept
        } else if chain.vertices[0] == chain.vertices[m - 1] && m > 2 {
            // Ring anchored at position 0: split at the point farthest
            // from the anchor.
            let j = (1..m - 1)
                .max_by(|&a, &b| {
                    pts[0].dist(pts[a]).total_cmp(&pts[0].dist(pts[b]))
                })
                .unwrap();
            let mut kept: Vec<usize> = douglas_peucker_indices(&pts[..=j], epsilon);
            kept.extend(
                douglas_peucker_indices(&pts[j..], epsilon)
                    .iter()
                    .skip(1)
                    .map(|&k| j + k),
            );
            kept
        } else {
            douglas_peucker_indices(&pts, epsilon)
        };
        let kept = match sanitize(kept, chain, pslg) {
            Some(k) => k,
            None => {
                stats.collapsed_chains += 1;
                full_chain(chain)
            }
        };
        simp.push(SimpChain { kept, is_loop: chain.is_loop });
    }
    stats.reinserted = repair_planarity(pslg, chains, &mut simp);
    (finish(pslg, chains, &simp), stats)
}

fn full_chain(chain: &Chain) -> Vec<usize> {
    (0..chain.vertices.len()).collect()
}

/// Sort, dedupe and reject collapsed keeps (all kept points coincident,
/// or a ring reduced below 3 distinct vertices).
fn sanitize(mut kept: Vec<usize>, chain: &Chain, pslg: &Pslg) -> Option<Vec<usize>> {
    kept.sort_unstable();
    kept.dedup();
    let distinct: HashSet<u32> = kept.iter().map(|&p| chain.vertices[p]).collect();
    let ring = chain.is_loop
        || chain.vertices[0] == chain.vertices[chain.vertices.len() - 1];
    let needed = if ring { 3 } else { 2 };
    if distinct.len() < needed {
        return None;
    }
    if ring {
        // A ring whose kept vertices are collinear has zero area and is
        // not a simple ring; treat it as collapsed.
        let pts: Vec<Point64> = kept
            .iter()
            .map(|&p| pslg.points[chain.vertices[p] as usize])
            .collect();
        let area2: f64 = (0..pts.len())
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                a.x * b.y - b.x * a.y
            })
            .sum();
        if area2 == 0.0 {
            return None;
        }
    }
    // Zero total length (all kept points coincident) is impossible once
    // >= 2 distinct lattice vertices remain, but guard anyway.
    let first = pslg.points[*distinct.iter().next().unwrap() as usize];
    if distinct
        .iter()
        .all(|&v| pslg.points[v as usize] == first)
    {
        return None;
    }
    Some(kept)
}

/// Greedily extend a ring's kept positions to `target` vertices, adding
/// the position maximizing its minimal cyclic arc distance to the
/// current set (smallest index on ties).
fn pad_ring(kept: &mut Vec<usize>, chain: &Chain, pslg: &Pslg, target: usize) {
    let pts = chain.points(pslg);
    let arcs = cyclic_arcs(&pts, chain.is_loop);
    let total = *arcs.last().unwrap();
    let m = pts.len();
    let limit = if chain.is_loop { m } else { m - 1 };
    let cyc_dist = |a: usize, b: usize| {
        let d = (arcs[a] - arcs[b]).abs();
        d.min(total - d)
    };
    kept.sort_unstable();
    kept.dedup();
    while kept.len() < target && kept.len() < limit {
        let candidate = (0..limit)
            .filter(|p| !kept.contains(p))
            .max_by(|&a, &b| {
                let da = kept.iter().map(|&k| cyc_dist(a, k)).fold(f64::INFINITY, f64::min);
                let db = kept.iter().map(|&k| cyc_dist(b, k)).fold(f64::INFINITY, f64::min);
                da.total_cmp(&db).then(b.cmp(&a))
            });
        match candidate {
            Some(p) => kept.push(p),
            None => break,
        }
        kept.sort_unstable();
    }
    if kept.is_empty() {
        kept.push(0);
    }
}

/// Prefix arc lengths; for loops the final entry closes the cycle.
fn cyclic_arcs(pts: &[Point64], is_loop: bool) -> Vec<f64> {
    let mut arcs = Vec::with_capacity(pts.len() + 1);
    arcs.push(0.0);
    for w in pts.windows(2) {
        arcs.push(arcs.last().unwrap() + w[0].dist(w[1]));
    }
    if is_loop {
        arcs.push(arcs.last().unwrap() + pts[pts.len() - 1].dist(pts[0]));
    }
    arcs
}

fn farthest_pair(pts: &[Point64]) -> (usize, usize) {
    let mut best = (0, 1, -1.0f64);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = pts[i].dist(pts[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Points from cyclic index `i` to `j` inclusive (wrapping).
fn cyclic_slice(pts: &[Point64], i: usize, j: usize) -> Vec<Point64> {
    let m = pts.len();
    let len = (j + m - i) % m + 1;
    (0..len).map(|k| pts[(i + k) % m]).collect()
}

/// Detect pairwise segment crossings among the simplified chains and
/// re-insert, per offending chain, the removed original vertex nearest
/// the intersection by arc length. Repeats until planar (worst case the
/// chains are fully restored, which is planar by construction). Returns
/// the number of re-inserted vertices.
fn repair_planarity(pslg: &Pslg, chains: &ChainSet, simp: &mut [SimpChain]) -> usize {
    let arcs: Vec<Vec<f64>> = chains
        .chains
        .iter()
        .map(|c| cyclic_arcs(&c.points(pslg), c.is_loop))
        .collect();
    let mut reinserted = 0;
    let budget: usize = chains.chains.iter().map(|c| c.vertices.len()).sum();
    for _ in 0..budget {
        let offenses = find_crossings(pslg, chains, simp);
        if offenses.is_empty() {
            return reinserted;
        }
        // At most one re-insertion per chain per round (later offense
        // indices go stale once the kept list changes), but keep trying
        // that chain's other offenses when a segment has nothing left to
        // restore.
        let mut progressed = false;
        let mut done: HashSet<usize> = HashSet::new();
        for (ci, seg_idx, ipt) in offenses {
            if done.contains(&ci) {
                continue;
            }
            if reinsert(pslg, &chains.chains[ci], &arcs[ci], &mut simp[ci], seg_idx, ipt) {
                reinserted += 1;
                progressed = true;
                done.insert(ci);
            }
        }
        if !progressed {
            break;
        }
    }
    reinserted
}

/// First offending segment per chain: (chain, kept-segment index,
/// approximate intersection point).
fn find_crossings(
    pslg: &Pslg,
    chains: &ChainSet,
    simp: &[SimpChain],
) -> Vec<(usize, usize, Point64)> {
    struct Seg {
        chain: usize,
        idx: usize,
        a: u32,
        b: u32,
        pa: Point64,
        pb: Point64,
        lo: Point64,
        hi: Point64,
    }
    let mut segs = Vec::new();
    for (ci, sc) in simp.iter().enumerate() {
        let vs = &chains.chains[ci].vertices;
        let n = sc.kept.len();
        let count = if sc.is_loop { n } else { n - 1 };
        for i in 0..count {
            let (a, b) = (vs[sc.kept[i]], vs[sc.kept[(i + 1) % n]]);
            if a == b {
                continue;
            }
            let (pa, pb) = (pslg.points[a as usize], pslg.points[b as usize]);
            segs.push(Seg {
                chain: ci,
                idx: i,
                a,
                b,
                pa,
                pb,
                lo: Point64::new(pa.x.min(pb.x), pa.y.min(pb.y)),
                hi: Point64::new(pa.x.max(pb.x), pa.y.max(pb.y)),
            });
        }
    }
    let mut offenses: std::collections::BTreeMap<(usize, usize), Point64> =
        std::collections::BTreeMap::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (s, t) = (&segs[i], &segs[j]);
            if s.lo.x > t.hi.x || t.lo.x > s.hi.x || s.lo.y > t.hi.y || t.lo.y > s.hi.y {
                continue;
            }
            let adjacent = s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b;
            let ipt = match segments_intersect(s.pa, s.pb, t.pa, t.pb, adjacent) {
                SegIntersection::None => continue,
                SegIntersection::Point(p) => p,
                SegIntersection::Overlap => Point64::new(
                    (s.pa.x + s.pb.x + t.pa.x + t.pb.x) / 4.0,
                    (s.pa.y + s.pb.y + t.pa.y + t.pb.y) / 4.0,
                ),
            };
            offenses.entry((s.chain, s.idx)).or_insert(ipt);
            offenses.entry((t.chain, t.idx)).or_insert(ipt);
        }
    }
    offenses.into_iter().map(|((c, i), p)| (c, i, p)).collect()
}

/// Re-insert the removed original vertex nearest (by arc length) to the
/// intersection point within the offending kept segment. Returns false
/// when the segment has no removed vertices left.
fn reinsert(
    pslg: &Pslg,
    chain: &Chain,
    arcs: &[f64],
    sc: &mut SimpChain,
    seg_idx: usize,
    ipt: Point64,
) -> bool {
    let n = sc.kept.len();
    let m = chain.vertices.len();
    let p = sc.kept[seg_idx];
    let q_raw = sc.kept[(seg_idx + 1) % n];
    // Span of original positions covered by this kept segment; loops may
    // wrap past the end.
    let wrapped = sc.is_loop && (seg_idx + 1) % n == 0;
    let q = if wrapped { q_raw + m } else { q_raw };
    if q <= p + 1 {
        return false;
    }
    let (pa, pb) = (
        pslg.points[chain.vertices[p % m] as usize],
        pslg.points[chain.vertices[q_raw] as usize],
    );
    let seg = Point64::new(pb.x - pa.x, pb.y - pa.y);
    let len2 = seg.x * seg.x + seg.y * seg.y;
    let t = if len2 == 0.0 {
        0.5
    } else {
        (((ipt.x - pa.x) * seg.x + (ipt.y - pa.y) * seg.y) / len2).clamp(0.0, 1.0)
    };
    let total = *arcs.last().unwrap();
    let arc_at = |pos: usize| {
        if pos >= m {
            arcs[pos - m] + total
        } else {
            arcs[pos]
        }
    };
    let target = arc_at(p) + t * (arc_at(q) - arc_at(p));
    let k = (p + 1..q)
        .min_by(|&a, &b| {
            (arc_at(a) - target)
                .abs()
                .total_cmp(&(arc_at(b) - target).abs())
                .then(a.cmp(&b))
        })
        .unwrap();
    sc.kept.push(k % m);
    sc.kept.sort_unstable();
    sc.kept.dedup();
    true
}

/// Rebuild a PSLG from simplified chains, recomputing border flags from
/// the domain rectangle.
fn finish(pslg: &Pslg, chains: &ChainSet, simp: &[SimpChain]) -> Pslg {
    let (w, h) = (pslg.width as f64, pslg.height as f64);
    let mut out_chains = Vec::with_capacity(simp.len());
    let mut flags = Vec::with_capacity(simp.len());
    for (ci, sc) in simp.iter().enumerate() {
        let vs = &chains.chains[ci].vertices;
        let mut ids: Vec<u32> = sc.kept.iter().map(|&p| vs[p]).collect();
        if !sc.is_loop {
            ids.dedup();
        }
        let n = ids.len();
        let count = if sc.is_loop { n } else { n.saturating_sub(1) };
        let mut f = Vec::with_capacity(count);
        for i in 0..count {
            let (a, b) = (
                pslg.points[ids[i] as usize],
                pslg.points[ids[(i + 1) % n] as usize],
            );
            f.push(
                (a.x == 0.0 && b.x == 0.0)
                    || (a.x == w && b.x == w)
                    || (a.y == 0.0 && b.y == 0.0)
                    || (a.y == h && b.y == h),
            );
        }
        out_chains.push(Chain { vertices: ids, is_loop: sc.is_loop });
        flags.push(f);
    }
    pslg_from_chains(&pslg.points, &out_chains, &flags, pslg.width, pslg.height)
}
