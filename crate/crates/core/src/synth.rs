//! Synthetic ground truth: seeded generation of valid planar partitions
//! by recursive convex-cell splitting with lattice-snapped chords,
//! rasterization to label masks, Gaussian vertex heatmaps, and
//! controlled noise injection.

use std::collections::{BTreeMap, HashSet};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::geom::signed_area;
use crate::partition::{LabeledPolygon, Partition, Ring};
use crate::raster::{Heatmap, LabelMask};
use crate::Point64;

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
pub struct NoiseConfig {
    #[serde(default)]
    pub boundary_jitter_px: u32,
    #[serde(default)]
    pub label_flip_rate: f64,
    #[serde(default)]
    pub heatmap_dropout_rate: f64,
    #[serde(default)]
    pub spurious_peak_rate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub num_classes: u16,
    pub cell_count: usize,
    #[serde(default)]
    pub hole_probability: f64,
    #[serde(default = "default_sigma")]
    pub heatmap_sigma: f64,
    #[serde(default)]
    pub noise: NoiseConfig,
}

fn default_sigma() -> f64 {
    1.0
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let rates = [
            self.hole_probability,
            self.noise.label_flip_rate,
            self.noise.heatmap_dropout_rate,
            self.noise.spurious_peak_rate,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(SynthError::InvalidConfig("rates must lie in [0,1]".into()));
        }
        if self.heatmap_sigma <= 0.0 {
            return Err(SynthError::InvalidConfig("sigma must be positive".into()));
        }
        if self.width < 4 || self.height < 4 {
            return Err(SynthError::InvalidConfig("domain must be at least 4x4".into()));
        }
        if self.num_classes == 0 || self.cell_count == 0 {
            return Err(SynthError::InvalidConfig(
                "need at least one class and one cell".into(),
            ));
        }
        Ok(())
    }
}

/// Stable 64-bit FNV-1a hash of the serialized config, for manifests.
pub fn config_hash(cfg: &SynthConfig) -> u64 {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn key_of(p: Point64) -> (u64, u64) {
    ((p.y + 0.0).to_bits(), (p.x + 0.0).to_bits())
}

/// Exact test: integer-coordinate point strictly inside segment [a, b].
fn strictly_between(p: Point64, a: Point64, b: Point64) -> bool {
    let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if cross != 0.0 {
        return false;
    }
    if (b.x - a.x).abs() >= (b.y - a.y).abs() {
        (a.x.min(b.x) < p.x) && (p.x < a.x.max(b.x))
    } else {
        (a.y.min(b.y) < p.y) && (p.y < a.y.max(b.y))
    }
}

/// All lattice points on the closed ring boundary: the vertices plus the
/// interior lattice points of each edge.
fn boundary_lattice_points(ring: &[Point64]) -> Vec<Point64> {
    let mut pts = Vec::new();
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        pts.push(a);
        let (dx, dy) = ((b.x - a.x) as i64, (b.y - a.y) as i64);
        let g = gcd(dx.unsigned_abs(), dy.unsigned_abs());
        for k in 1..g {
            pts.push(Point64::new(
                a.x + (dx * k as i64 / g as i64) as f64,
                a.y + (dy * k as i64 / g as i64) as f64,
            ));
        }
    }
    pts
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Insert `p` into the ring wherever it lies strictly inside an edge.
fn insert_point(ring: &mut Vec<Point64>, p: Point64) {
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if strictly_between(p, a, b) {
            ring.insert(i + 1, p);
            return;
        }
    }
}

fn point_strictly_in_convex(ring: &[Point64], p: Point64) -> bool {
    crate::geom::point_strictly_in_ring(p, ring)
}

/// Minimal width of a convex ring: smallest over edges of the farthest
/// vertex distance to that edge's supporting line.
fn convex_width(ring: &[Point64]) -> f64 {
    let n = ring.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let mut far = 0.0f64;
        for &p in ring {
            let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            far = far.max(cross.abs() / len);
        }
        best = best.min(far);
    }
    best
}

/// Smallest interior corner angle (radians); collinear pass-through
/// vertices count as straight and are ignored by the thinness check.
fn min_corner_angle(ring: &[Point64]) -> f64 {
    let n = ring.len();
    let mut best = std::f64::consts::PI;
    for i in 0..n {
        let p = ring[(i + n - 1) % n];
        let c = ring[i];
        let q = ring[(i + 1) % n];
        let (ux, uy) = (p.x - c.x, p.y - c.y);
        let (vx, vy) = (q.x - c.x, q.y - c.y);
        let angle = (ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy);
        best = best.min(angle);
    }
    best
}

/// A chord endpoint `p` on the edge (u, v) becomes a clean T-junction
/// under pixel-center rasterization iff the four pixel centers around
/// `p` see all three local regions (the neighbor across the edge and
/// the two chord sides). Centers exactly on either line are rejected as
/// tie-prone. For an edge lying on the domain border only the two
/// in-domain centers exist and must straddle the chord.
fn junction_exact(p: Point64, u: Point64, v: Point64, chord_to: Point64, w: f64, h: f64) -> bool {
    let e = (v.x - u.x, v.y - u.y);
    let c = (chord_to.x - p.x, chord_to.y - p.y);
    let on_border = (u.x == v.x && (u.x == 0.0 || u.x == w))
        || (u.y == v.y && (u.y == 0.0 || u.y == h));
    let mut seen = [false; 3];
    for (dx, dy) in [(0.5, 0.5), (-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5)] {
        let q = Point64::new(p.x + dx, p.y + dy);
        if q.x < 0.0 || q.x > w || q.y < 0.0 || q.y > h {
            continue;
        }
        let se = e.0 * (q.y - p.y) - e.1 * (q.x - p.x);
        let sc = c.0 * (q.y - p.y) - c.1 * (q.x - p.x);
        if se == 0.0 || sc == 0.0 {
            return false;
        }
        if !on_border && se < 0.0 {
            seen[0] = true;
        } else if sc > 0.0 {
            seen[1] = true;
        } else {
            seen[2] = true;
        }
    }
    seen[1] && seen[2] && (on_border || seen[0])
}

/// Every corner of a convex ring must rasterize 4-connected: each pixel
/// center adjacent to a vertex that falls inside the ring needs a
/// 4-neighbor center inside too, otherwise the apex pixel detaches into
/// its own face and the junction drifts off the lattice vertex.
fn corners_rasterize_connected(ring: &[Point64], w: f64, h: f64) -> bool {
    let inside = |q: Point64| {
        q.x > 0.0 && q.x < w && q.y > 0.0 && q.y < h && point_strictly_in_convex(ring, q)
    };
    for &p in ring {
        for (dx, dy) in [(0.5, 0.5), (-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5)] {
            let q = Point64::new(p.x + dx, p.y + dy);
            if !inside(q) {
                continue;
            }
            let linked = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)]
                .iter()
                .any(|&(ex, ey)| inside(Point64::new(q.x + ex, q.y + ey)));
            if !linked {
                return false;
            }
        }
    }
    true
}

/// Number of cells whose boundary passes through `p`.
fn incident_cells(cells: &[Vec<Point64>], p: Point64) -> usize {
    cells
        .iter()
        .filter(|ring| {
            let n = ring.len();
            (0..n).any(|i| {
                let (a, b) = (ring[i], ring[(i + 1) % n]);
                p == a || p == b || strictly_between(p, a, b)
            })
        })
        .count()
}

/// Split a convex ring by the chord (a, b); both must be boundary
/// lattice points. Returns the two sub-rings.
fn split_ring(ring: &[Point64], a: Point64, b: Point64) -> (Vec<Point64>, Vec<Point64>) {
    let mut aug = ring.to_vec();
    if !aug.contains(&a) {
        insert_point(&mut aug, a);
    }
    if !aug.contains(&b) {
        insert_point(&mut aug, b);
    }
    let ia = aug.iter().position(|&q| q == a).unwrap();
    let ib = aug.iter().position(|&q| q == b).unwrap();
    let n = aug.len();
    let walk = |from: usize, to: usize| {
        let mut r = Vec::new();
        let mut i = from;
        loop {
            r.push(aug[i]);
            if i == to {
                break;
            }
            i = (i + 1) % n;
        }
        r
    };
    (walk(ia, ib), walk(ib, ia))
}

/// Generate a valid labeled partition by recursive chord splitting of
/// the domain rectangle, greedy recoloring, and optional inset-rectangle
/// holes. Deterministic per config.
pub fn generate_partition(cfg: &SynthConfig) -> Result<Partition, SynthError> {
    cfg.validate()?;
    if cfg.cell_count > 1 && cfg.num_classes < 2 {
        return Err(SynthError::RecolorInfeasible(cfg.cell_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (w, h) = (cfg.width as f64, cfg.height as f64);
    let min_sep = (3.0 * cfg.heatmap_sigma).max(4.0);
    let min_area = (min_sep * min_sep).max(16.0);

    let mut cells: Vec<Vec<Point64>> = vec![vec![
        Point64::new(0.0, 0.0),
        Point64::new(w, 0.0),
        Point64::new(w, h),
        Point64::new(0.0, h),
    ]];
    let mut stuck: HashSet<usize> = HashSet::new();

    while cells.len() < cfg.cell_count {
        // Largest splittable cell.
        let target = (0..cells.len())
            .filter(|i| !stuck.contains(i))
            .max_by(|&i, &j| {
                signed_area(&cells[i])
                    .total_cmp(&signed_area(&cells[j]))
                    .then(j.cmp(&i))
            });
        let Some(ci) = target else { break };
        let all_vertices: Vec<Point64> = cells.iter().flatten().copied().collect();
        let candidates = boundary_lattice_points(&cells[ci]);
        let mut done = false;
        for _ in 0..2000 {
            let a = candidates[rng.gen_range(0..candidates.len())];
            let b = candidates[rng.gen_range(0..candidates.len())];
            if a == b || a.dist(b) < min_sep {
                continue;
            }
            // Chord must pass through the interior, not along the edge.
            let mid = Point64::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
            if !point_strictly_in_convex(&cells[ci], mid) {
                continue;
            }
            // Endpoints must be fresh points strictly inside an edge,
            // min_sep away from every existing vertex: stacking chords
            // on a shared corner blurs the junction under rasterization.
            let sep_ok = |p: Point64| all_vertices.iter().all(|&q| p.dist(q) >= min_sep);
            if !sep_ok(a) || !sep_ok(b) {
                continue;
            }
            // Each endpoint must rasterize to a clean T-junction at its
            // exact lattice position, so the reconstructed boundary
            // graph has an anchor exactly at every generated vertex.
            let host = |p: Point64| {
                let ring = &cells[ci];
                let n = ring.len();
                (0..n)
                    .map(|k| (ring[k], ring[(k + 1) % n]))
                    .find(|&(u, v)| strictly_between(p, u, v))
            };
            let exact = |p: Point64, other: Point64| {
                host(p).is_some_and(|(u, v)| junction_exact(p, u, v, other, w, h))
            };
            if !exact(a, b) || !exact(b, a) {
                continue;
            }
            // Splitting adds one incident cell at each endpoint; cells
            // meeting at a point form a clique under recoloring, so the
            // incidence must stay colorable.
            let colorable = |p: Point64| incident_cells(&cells, p) + 1 <= cfg.num_classes as usize;
            if !colorable(a) || !colorable(b) {
                continue;
            }
            let (r1, r2) = split_ring(&cells[ci], a, b);
            if r1.len() < 3 || r2.len() < 3 {
                continue;
            }
            if signed_area(&r1) < min_area || signed_area(&r2) < min_area {
                continue;
            }
            // Thin wedges and slivers rasterize to pinched, ambiguous
            // boundaries; keep every cell plump enough to survive the
            // raster round trip.
            if convex_width(&r1) < min_sep || convex_width(&r2) < min_sep {
                continue;
            }
            if min_corner_angle(&r1) < 0.35 || min_corner_angle(&r2) < 0.35 {
                continue;
            }
            if !corners_rasterize_connected(&r1, w, h) || !corners_rasterize_connected(&r2, w, h) {
                continue;
            }
            // Commit: insert the chord endpoints into every other cell
            // whose boundary passes through them.
            for (oi, other) in cells.iter_mut().enumerate() {
                if oi == ci {
                    continue;
                }
                insert_point(other, a);
                insert_point(other, b);
            }
            cells[ci] = r1;
            cells.push(r2);
            done = true;
            break;
        }
        if !done {
            stuck.insert(ci);
        }
    }

    // Greedy proper coloring over shared-segment adjacency.
    let classes = recolor(&cells, cfg.num_classes, &mut rng)?;

    // Holes: inset lattice rectangles fully inside a cell.
    let mut polygons: Vec<LabeledPolygon> = cells
        .iter()
        .zip(&classes)
        .map(|(ring, &class)| LabeledPolygon {
            class,
            outer: Ring(ring.clone()),
            holes: vec![],
        })
        .collect();
    if cfg.num_classes >= 2 {
        let side = min_sep.ceil() as i64;
        let n_cells = polygons.len();
        for ci in 0..n_cells {
            if rng.gen::<f64>() >= cfg.hole_probability {
                continue;
            }
            let all_vertices: Vec<Point64> = polygons
                .iter()
                .flat_map(|p| p.outer.0.iter().chain(p.holes.iter().flat_map(|r| r.0.iter())))
                .copied()
                .collect();
            let ring = &polygons[ci].outer.0;
            let bb = polygons[ci].bbox();
            for _ in 0..30 {
                let (x0r, y0r) = (bb.0 as i64, bb.1 as i64);
                let (x1r, y1r) = (bb.2 as i64, bb.3 as i64);
                if x1r - x0r <= side + 2 || y1r - y0r <= side + 2 {
                    break;
                }
                let x0 = rng.gen_range(x0r + 1..x1r - side);
                let y0 = rng.gen_range(y0r + 1..y1r - side);
                let rect = [
                    Point64::new(x0 as f64, y0 as f64),
                    Point64::new((x0 + side) as f64, y0 as f64),
                    Point64::new((x0 + side) as f64, (y0 + side) as f64),
                    Point64::new(x0 as f64, (y0 + side) as f64),
                ];
                // Corners (padded by 1 px) strictly inside the convex
                // cell, and separated from every existing vertex.
                let pad_ok = rect.iter().all(|&c| point_strictly_in_convex(ring, c))
                    && [
                    Point64::new(x0 as f64 - 1.0, y0 as f64 - 1.0),
                    Point64::new((x0 + side) as f64 + 1.0, y0 as f64 - 1.0),
                    Point64::new((x0 + side) as f64 + 1.0, (y0 + side) as f64 + 1.0),
                    Point64::new(x0 as f64 - 1.0, (y0 + side) as f64 + 1.0),
                ]
                .iter()
                .all(|&c| point_strictly_in_convex(ring, c));
                if !pad_ok {
                    continue;
                }
                if !rect
                    .iter()
                    .all(|&c| all_vertices.iter().all(|&q| c.dist(q) >= min_sep))
                {
                    continue;
                }
                let host_class = polygons[ci].class;
                let mut child_class = rng.gen_range(0..cfg.num_classes);
                if child_class == host_class {
                    child_class = (child_class + 1) % cfg.num_classes;
                }
                let mut hole = rect.to_vec();
                hole.reverse();
                polygons[ci].holes.push(Ring(hole));
                polygons.push(LabeledPolygon {
                    class: child_class,
                    outer: Ring(rect.to_vec()),
                    holes: vec![],
                });
                break;
            }
        }
    }

    Ok(Partition { width: cfg.width, height: cfg.height, polygons })
}

/// Proper coloring of the cell adjacency graph with `c` classes,
/// randomized but deterministic; retries a few shuffles before giving
/// up.
fn recolor(
    cells: &[Vec<Point64>],
    c: u16,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u16>, SynthError> {
    if cells.len() == 1 {
        return Ok(vec![rng.gen_range(0..c)]);
    }
    // Cells sharing any vertex must differ: point-contact between two
    // same-class cells would merge them in the rasterized mask and
    // erase the junction there.
    let mut by_vertex: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (i, ring) in cells.iter().enumerate() {
        for &p in ring {
            let owners = by_vertex.entry(key_of(p)).or_default();
            if !owners.contains(&i) {
                owners.push(i);
            }
        }
    }
    let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); cells.len()];
    for owners in by_vertex.values() {
        for (ai, &a) in owners.iter().enumerate() {
            for &b in &owners[ai + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
    }
    for _ in 0..50 {
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.shuffle(rng);
        let mut colors = vec![u16::MAX; cells.len()];
        let mut ok = true;
        for &i in &order {
            let used: HashSet<u16> = adj[i]
                .iter()
                .filter(|&&j| colors[j] != u16::MAX)
                .map(|&j| colors[j])
                .collect();
            let avail: Vec<u16> = (0..c).filter(|k| !used.contains(k)).collect();
            if avail.is_empty() {
                ok = false;
                break;
            }
            colors[i] = avail[rng.gen_range(0..avail.len())];
        }
        if ok {
            return Ok(colors);
        }
    }
    Err(SynthError::RecolorInfeasible(cells.len()))
}

/// Label each pixel with the class of the polygon containing its
/// center; centers on a boundary take the smallest incident class, and
/// (for defective inputs) uncovered centers take the class of the
/// nearest polygon boundary.
pub fn rasterize(p: &Partition) -> LabelMask {
    let (w, h) = (p.width, p.height);
    let num_classes = p.polygons.iter().map(|q| q.class).max().unwrap_or(0) + 1;
    let boxes: Vec<_> = p.polygons.iter().map(LabeledPolygon::bbox).collect();
    let mut labels = vec![0u16; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let c = Point64::new(x as f64 + 0.5, y as f64 + 0.5);
            let mut label: Option<u16> = None;
            for (pi, poly) in p.polygons.iter().enumerate() {
                let b = boxes[pi];
                if c.x < b.0 || c.x > b.2 || c.y < b.1 || c.y > b.3 {
                    continue;
                }
                if poly.contains(c) {
                    label = Some(match label {
                        Some(l) => l.min(poly.class),
                        None => poly.class,
                    });
                }
            }
            let label = label.unwrap_or_else(|| nearest_polygon_class(p, c));
            labels[(y * w + x) as usize] = label;
        }
    }
    LabelMask::new(w, h, labels, num_classes)
}

fn nearest_polygon_class(p: &Partition, c: Point64) -> u16 {
    let mut best = (f64::INFINITY, 0u16);
    for poly in &p.polygons {
        for (a, b) in poly.segments() {
            let d = crate::geom::point_segment_dist_sq(c, a, b);
            if d < best.0 {
                best = (d, poly.class);
            }
        }
    }
    best.1
}

/// Max-composed Gaussian heatmap with a peak of height 1 at every
/// distinct partition vertex. The grid covers the pixel-corner lattice,
/// so it is (width+1) x (height+1): cell (x, y) samples the field at
/// corner (x, y), and every vertex -- border vertices included --
/// produces a strict maximum at exactly one cell.
pub fn render_heatmap(p: &Partition, sigma: f64) -> Heatmap {
    assert!(sigma > 0.0);
    let (w, h) = (p.width as i64 + 1, p.height as i64 + 1);
    let mut values = vec![0.0f32; (w * h) as usize];
    let mut seen = HashSet::new();
    let radius = (4.0 * sigma).ceil() as i64 + 1;
    for poly in &p.polygons {
        for v in poly.vertices() {
            if !seen.insert(key_of(v)) {
                continue;
            }
            let (cx, cy) = (v.x, v.y);
            let x_lo = ((cx - radius as f64).floor() as i64).max(0);
            let x_hi = ((cx + radius as f64).ceil() as i64).min(w - 1);
            let y_lo = ((cy - radius as f64).floor() as i64).max(0);
            let y_hi = ((cy + radius as f64).ceil() as i64).min(h - 1);
            for y in y_lo..=y_hi {
                for x in x_lo..=x_hi {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    let g = (-d2 / (2.0 * sigma * sigma)).exp() as f32;
                    let cell = &mut values[(y * w + x) as usize];
                    *cell = cell.max(g.min(1.0));
                }
            }
        }
    }
    Heatmap::new(w as u32, h as u32, values)
}

/// Inject controlled noise into a mask/heatmap pair. Deterministic per
/// seed; all-zero rates are the identity.
pub fn perturb(
    mask: &LabelMask,
    hm: &Heatmap,
    noise: &NoiseConfig,
    sigma: f64,
    seed: u64,
) -> (LabelMask, Heatmap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (mask.width as i64, mask.height as i64);
    let mut labels = mask.labels.clone();
    let num_classes = mask.num_classes;

    // Boundary jitter: per round, boundary pixels adopt a random
    // differing 4-neighbor label with probability 1/2.
    for _ in 0..noise.boundary_jitter_px {
        let snapshot = labels.clone();
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                let mut diff = Vec::new();
                for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let l = snapshot[(ny * w + nx) as usize];
                    if l != snapshot[i] {
                        diff.push(l);
                    }
                }
                if !diff.is_empty() && rng.gen::<f64>() < 0.5 {
                    labels[i] = diff[rng.gen_range(0..diff.len())];
                }
            }
        }
    }

    // Label flips: random small blobs set to a random other class.
    if noise.label_flip_rate > 0.0 && num_classes > 1 {
        let blobs = ((noise.label_flip_rate * (w * h) as f64) / 9.0).ceil() as usize;
        for _ in 0..blobs {
            let (cx, cy) = (rng.gen_range(0..w), rng.gen_range(0..h));
            let r = rng.gen_range(1..=2i64);
            let cur = labels[(cy * w + cx) as usize];
            let mut new = rng.gen_range(0..num_classes);
            if new == cur {
                new = (new + 1) % num_classes;
            }
            for y in (cy - r).max(0)..=(cy + r).min(h - 1) {
                for x in (cx - r).max(0)..=(cx + r).min(w - 1) {
                    if (x - cx).pow(2) + (y - cy).pow(2) <= r * r {
                        labels[(y * w + x) as usize] = new;
                    }
                }
            }
        }
    }

    // Heatmap dropout: each detected peak is dropped with the given
    // probability; a dropped peak clears every cell nearer to it than to
    // any surviving peak (rate 1 clears the whole map).
    let mut values = hm.values.clone();
    let (hw, hh) = (hm.width as i64, hm.height as i64);
    let peaks = crate::simplify::extract_peaks(hm, 0.05).peaks;
    if noise.heatmap_dropout_rate > 0.0 && !peaks.is_empty() {
        let dropped: Vec<bool> = peaks
            .iter()
            .map(|_| rng.gen::<f64>() < noise.heatmap_dropout_rate)
            .collect();
        for y in 0..hh {
            for x in 0..hw {
                let c = Point64::new(x as f64, y as f64);
                let nearest = (0..peaks.len())
                    .min_by(|&a, &b| {
                        peaks[a]
                            .position
                            .dist(c)
                            .total_cmp(&peaks[b].position.dist(c))
                    })
                    .unwrap();
                if dropped[nearest] {
                    values[(y * hw + x) as usize] = 0.0;
                }
            }
        }
    }

    // Spurious peaks: Gaussians added away from any label boundary.
    if noise.spurious_peak_rate > 0.0 {
        let extra = (noise.spurious_peak_rate * peaks.len().max(1) as f64).ceil() as usize;
        let segs = crate::metrics::v2b::boundary_segments(mask);
        let mut added = 0;
        for _ in 0..extra * 30 {
            if added == extra {
                break;
            }
            let (cx, cy) = (rng.gen_range(0..hw), rng.gen_range(0..hh));
            let c = Point64::new(cx as f64, cy as f64);
            let d = segs
                .iter()
                .map(|&(a, b)| crate::geom::point_segment_dist_sq(c, a, b))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            if d <= 7.0 {
                continue;
            }
            let radius = (4.0 * sigma).ceil() as i64 + 1;
            for y in (cy - radius).max(0)..=(cy + radius).min(hh - 1) {
                for x in (cx - radius).max(0)..=(cx + radius).min(hw - 1) {
                    let d2 = ((x - cx).pow(2) + (y - cy).pow(2)) as f64;
                    let g = (-d2 / (2.0 * sigma * sigma)).exp() as f32;
                    let cell = &mut values[(y * hw + x) as usize];
                    *cell = cell.max(g);
                }
            }
            added += 1;
        }
    }

    (
        LabelMask::new(mask.width, mask.height, labels, num_classes),
        Heatmap::new(hm.width, hm.height, values),
    )
}
