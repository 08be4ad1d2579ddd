//! Skeleton pseudo-graphs and APLS connectivity scoring for elongated
//! classes. The skeleton is a 1-pixel-wide Zhang-Suen thinning of the
//! class-binary mask; nodes are skeleton pixels, edges join 8-neighbors
//! with Euclidean length, and control nodes are nodes of degree != 2.

use std::collections::BinaryHeap;

/// Weighted pixel graph over a thinned mask.
#[derive(Debug, Clone)]
pub struct SkeletonGraph {
    /// Node pixel positions (x, y).
    pub nodes: Vec<(u32, u32)>,
    /// Adjacency: (neighbor index, Euclidean length 1 or sqrt(2)).
    pub adj: Vec<Vec<(u32, f64)>>,
    /// Indices of nodes with degree != 2.
    pub control_nodes: Vec<u32>,
}

impl SkeletonGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Zhang-Suen iterative thinning.
pub fn thin(bin: &[bool], w: usize, h: usize) -> Vec<bool> {
    let mut img = bin.to_vec();
    let at = |img: &[bool], x: i64, y: i64| -> bool {
        x >= 0 && y >= 0 && x < w as i64 && y < h as i64 && img[y as usize * w + x as usize]
    };
    loop {
        let mut changed = false;
        for pass in 0..2 {
            let mut to_clear = Vec::new();
            for y in 0..h as i64 {
                for x in 0..w as i64 {
                    if !at(&img, x, y) {
                        continue;
                    }
                    // Neighbors P2..P9 clockwise from north.
                    let p = [
                        at(&img, x, y - 1),
                        at(&img, x + 1, y - 1),
                        at(&img, x + 1, y),
                        at(&img, x + 1, y + 1),
                        at(&img, x, y + 1),
                        at(&img, x - 1, y + 1),
                        at(&img, x - 1, y),
                        at(&img, x - 1, y - 1),
                    ];
                    let b: usize = p.iter().map(|&v| v as usize).sum();
                    if !(2..=6).contains(&b) {
                        continue;
                    }
                    let a = (0..8)
                        .filter(|&i| !p[i] && p[(i + 1) % 8])
                        .count();
                    if a != 1 {
                        continue;
                    }
                    let cond = if pass == 0 {
                        (!p[0] || !p[2] || !p[4]) && (!p[2] || !p[4] || !p[6])
                    } else {
                        (!p[0] || !p[2] || !p[6]) && (!p[0] || !p[4] || !p[6])
                    };
                    if cond {
                        to_clear.push(y as usize * w + x as usize);
                    }
                }
            }
            if !to_clear.is_empty() {
                changed = true;
                for i in to_clear {
                    img[i] = false;
                }
            }
        }
        if !changed {
            return img;
        }
    }
}

/// Build the skeleton pseudo-graph of a binary class mask.
pub fn skeleton_graph(bin: &[bool], w: usize, h: usize) -> SkeletonGraph {
    let skel = thin(bin, w, h);
    let mut index = vec![u32::MAX; w * h];
    let mut nodes = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if skel[y * w + x] {
                index[y * w + x] = nodes.len() as u32;
                nodes.push((x as u32, y as u32));
            }
        }
    }
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); nodes.len()];
    for (i, &(x, y)) in nodes.iter().enumerate() {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = index[ny as usize * w + nx as usize];
                if j != u32::MAX {
                    let len = if dx != 0 && dy != 0 {
                        std::f64::consts::SQRT_2
                    } else {
                        1.0
                    };
                    adj[i].push((j, len));
                }
            }
        }
    }
    let control_nodes = (0..nodes.len() as u32)
        .filter(|&i| adj[i as usize].len() != 2)
        .collect();
    SkeletonGraph { nodes, adj, control_nodes }
}

/// Total-order f64 wrapper for the Dijkstra heap.
#[derive(PartialEq, PartialOrd)]
struct Dist(f64);
impl Eq for Dist {}
impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Dijkstra shortest-path lengths from `src` to all nodes.
fn dijkstra(g: &SkeletonGraph, src: u32) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.nodes.len()];
    dist[src as usize] = 0.0;
    let mut heap: BinaryHeap<(std::cmp::Reverse<Dist>, u32)> = BinaryHeap::new();
    heap.push((std::cmp::Reverse(Dist(0.0)), src));
    while let Some((std::cmp::Reverse(Dist(d)), v)) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &(u, w) in &g.adj[v as usize] {
            let nd = d + w;
            if nd < dist[u as usize] {
                dist[u as usize] = nd;
                heap.push((std::cmp::Reverse(Dist(nd)), u));
            }
        }
    }
    dist
}

fn nearest_node(g: &SkeletonGraph, p: (u32, u32)) -> u32 {
    let mut best = 0u32;
    let mut best_d = i64::MAX;
    for (i, &(x, y)) in g.nodes.iter().enumerate() {
        let d = (x as i64 - p.0 as i64).pow(2) + (y as i64 - p.1 as i64).pow(2);
        if d < best_d {
            best_d = d;
            best = i as u32;
        }
    }
    best
}

/// Average Path Length Similarity between a ground-truth and a
/// predicted skeleton graph. Returns `None` when the ground truth has
/// no control-node pair with a finite path (metric undefined).
pub fn apls(gt: &SkeletonGraph, pred: &SkeletonGraph) -> Option<f64> {
    let controls = &gt.control_nodes;
    let mut deltas = Vec::new();
    if controls.len() >= 2 {
        // Map each gt control node to its nearest pred node once.
        let mapped: Vec<Option<u32>> = controls
            .iter()
            .map(|&c| {
                if pred.is_empty() {
                    None
                } else {
                    Some(nearest_node(pred, gt.nodes[c as usize]))
                }
            })
            .collect();
        for (i, &a) in controls.iter().enumerate() {
            let gt_dist = dijkstra(gt, a);
            let pred_dist = mapped[i].map(|a2| dijkstra(pred, a2));
            for (j, &b) in controls.iter().enumerate().skip(i + 1) {
                let lg = gt_dist[b as usize];
                if !lg.is_finite() || lg == 0.0 {
                    continue;
                }
                let delta = match (&pred_dist, mapped[j]) {
                    (Some(pd), Some(b2)) => {
                        let lp = pd[b2 as usize];
                        if lp.is_finite() {
                            ((lg - lp).abs() / lg).min(1.0)
                        } else {
                            1.0
                        }
                    }
                    _ => 1.0,
                };
                deltas.push(delta);
            }
        }
    }
    if deltas.is_empty() {
        return None;
    }
    Some(1.0 - deltas.iter().sum::<f64>() / deltas.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&str]) -> (Vec<bool>, usize, usize) {
        let h = rows.len();
        let w = rows[0].len();
        (
            rows.iter().flat_map(|r| r.chars().map(|c| c == '#')).collect(),
            w,
            h,
        )
    }

    /// Hand-built graph helper for APLS fixtures.
    fn line_graph(points: &[(u32, u32)], controls: &[u32]) -> SkeletonGraph {
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); points.len()];
        for i in 0..points.len() - 1 {
            let (a, b) = (points[i], points[i + 1]);
            let d = (((a.0 as f64 - b.0 as f64).powi(2)
                + (a.1 as f64 - b.1 as f64).powi(2)) as f64)
                .sqrt();
            adj[i].push(((i + 1) as u32, d));
            adj[i + 1].push((i as u32, d));
        }
        SkeletonGraph {
            nodes: points.to_vec(),
            adj,
            control_nodes: controls.to_vec(),
        }
    }

    #[test]
    fn identical_graphs_score_one() {
        let (b, w, h) = from_rows(&[
            "..........",
            ".########.",
            "..........",
        ]);
        let g = skeleton_graph(&b, w, h);
        assert!(!g.is_empty());
        assert_eq!(apls(&g, &g), Some(1.0));
    }

    #[test]
    fn detour_penalized_by_relative_length() {
        // gt path 10 vs pred detour 2 + 10 + 2 = 14; endpoints coincide
        // so nearest-node snapping is exact. delta = 4/10 -> score 0.6.
        let gt = line_graph(&[(0, 0), (10, 0)], &[0, 1]);
        let pred = line_graph(&[(0, 0), (0, 2), (10, 2), (10, 0)], &[0, 3]);
        let s = apls(&gt, &pred).unwrap();
        assert!((s - 0.6).abs() < 1e-12);
    }

    #[test]
    fn detour_length_fifteen_scores_half() {
        // Two corresponding control nodes; gt edge 10, pred detour 15.
        let gt = line_graph(&[(0, 0), (10, 0)], &[0, 1]);
        let mut pred = line_graph(&[(0, 0), (10, 0)], &[0, 1]);
        pred.adj[0][0].1 = 15.0;
        pred.adj[1][0].1 = 15.0;
        assert_eq!(apls(&gt, &pred), Some(0.5));
    }

    #[test]
    fn missing_corridor_clamps_to_one() {
        let gt = line_graph(&[(0, 0), (10, 0)], &[0, 1]);
        // Disconnected pred: two isolated nodes.
        let pred = SkeletonGraph {
            nodes: vec![(0, 0), (10, 0)],
            adj: vec![vec![], vec![]],
            control_nodes: vec![0, 1],
        };
        assert_eq!(apls(&gt, &pred), Some(0.0));
    }

    #[test]
    fn empty_pred_scores_zero() {
        let gt = line_graph(&[(0, 0), (10, 0)], &[0, 1]);
        let pred = SkeletonGraph { nodes: vec![], adj: vec![], control_nodes: vec![] };
        assert_eq!(apls(&gt, &pred), Some(0.0));
    }

    #[test]
    fn no_control_pair_is_undefined() {
        let gt = SkeletonGraph { nodes: vec![], adj: vec![], control_nodes: vec![] };
        let pred = gt.clone();
        assert_eq!(apls(&gt, &pred), None);
    }

    #[test]
    fn thinning_is_one_pixel_wide() {
        let (b, w, h) = from_rows(&[
            "........",
            ".######.",
            ".######.",
            ".######.",
            "........",
        ]);
        let skel = thin(&b, w, h);
        // Every skeleton row strip is at most 1 px tall per column.
        for x in 0..w {
            let count: usize = (0..h).filter(|&y| skel[y * w + x]).count();
            assert!(count <= 1, "column {x} has {count} skeleton pixels");
        }
    }
}
