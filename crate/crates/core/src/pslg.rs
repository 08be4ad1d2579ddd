//! Planar straight-line graph with half-edge connectivity: overdense
//! construction from a mask, anchor-bounded chain decomposition, face
//! tracing, and face labeling into a [`Partition`].

use std::collections::HashMap;

use crate::error::PslgError;
use crate::geom::{collinear, signed_area, Point};
use crate::partition::{interior_point, LabeledPolygon, Partition, Ring};
use crate::raster::LabelMask;
use crate::Point64;

/// One directed half of an undirected edge. The twin of half-edge `h`
/// is `h ^ 1`.
#[derive(Debug, Clone, Copy)]
pub struct HalfEdge {
    pub origin: u32,
    pub target: u32,
    pub on_border: bool,
}

/// Planar straight-line graph. Vertices carry explicit coordinates;
/// connectivity is a rotation system (outgoing half-edges sorted by
/// angle around each vertex).
#[derive(Debug, Clone)]
pub struct Pslg {
    pub points: Vec<Point64>,
    pub half_edges: Vec<HalfEdge>,
    /// Outgoing half-edge ids per vertex, sorted by atan2 angle.
    out: Vec<Vec<u32>>,
    pub width: u32,
    pub height: u32,
}

impl Pslg {
    /// Build from an undirected edge list `(u, v, on_border)`.
    pub fn from_edges(points: Vec<Point64>, edges: &[(u32, u32, bool)], width: u32, height: u32) -> Self {
        let mut half_edges = Vec::with_capacity(edges.len() * 2);
        let mut out: Vec<Vec<u32>> = vec![Vec::new(); points.len()];
        for &(u, v, border) in edges {
            debug_assert_ne!(u, v);
            let h0 = half_edges.len() as u32;
            half_edges.push(HalfEdge { origin: u, target: v, on_border: border });
            half_edges.push(HalfEdge { origin: v, target: u, on_border: border });
            out[u as usize].push(h0);
            out[v as usize].push(h0 + 1);
        }
        let angle = |h: &HalfEdge| {
            let a = points[h.origin as usize];
            let b = points[h.target as usize];
            (b.y - a.y).atan2(b.x - a.x)
        };
        for list in out.iter_mut() {
            list.sort_by(|&a, &b| {
                angle(&half_edges[a as usize])
                    .total_cmp(&angle(&half_edges[b as usize]))
            });
        }
        Pslg { points, half_edges, out, width, height }
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn degree(&self, v: u32) -> usize {
        self.out[v as usize].len()
    }

    pub fn outgoing(&self, v: u32) -> &[u32] {
        &self.out[v as usize]
    }

    /// Successor in the face walk: the half-edge after `twin(h)` in
    /// clockwise rotation around the target vertex. Bounded faces come
    /// out with positive shoelace area under this rule.
    fn next_half_edge(&self, h: u32) -> u32 {
        let v = self.half_edges[h as usize].target;
        let list = &self.out[v as usize];
        let twin = h ^ 1;
        let pos = list.iter().position(|&e| e == twin).unwrap();
        list[(pos + list.len() - 1) % list.len()]
    }

    /// Undirected edge as a canonical (min, max) vertex pair.
    pub fn edge_key(&self, h: u32) -> (u32, u32) {
        let e = &self.half_edges[h as usize];
        (e.origin.min(e.target), e.origin.max(e.target))
    }

    /// Number of connected components of the vertex set (isolated
    /// vertices excluded by construction).
    pub fn component_count(&self) -> usize {
        let n = self.points.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] || self.out[start].is_empty() {
                continue;
            }
            count += 1;
            let mut stack = vec![start as u32];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &h in &self.out[v as usize] {
                    let t = self.half_edges[h as usize].target;
                    if !seen[t as usize] {
                        seen[t as usize] = true;
                        stack.push(t);
                    }
                }
            }
        }
        count
    }
}

/// Build the overdense PSLG of a mask: one unit edge on the pixel-corner
/// lattice for every pixel-edge whose two adjacent pixels carry distinct
/// labels, plus all border unit edges.
pub fn build_overdense_pslg(mask: &LabelMask) -> Pslg {
    let (w, h) = (mask.width, mask.height);
    let lattice_id = |x: u32, y: u32| y * (w + 1) + x;
    let mut used = vec![false; ((w + 1) * (h + 1)) as usize];
    let mut raw_edges: Vec<(u32, u32, bool)> = Vec::new();
    // Vertical pixel-edges at integer x.
    for x in 0..=w {
        for y in 0..h {
            let transition = x == 0
                || x == w
                || mask.get(x - 1, y) != mask.get(x, y);
            if transition {
                let border = x == 0 || x == w;
                let a = lattice_id(x, y);
                let b = lattice_id(x, y + 1);
                used[a as usize] = true;
                used[b as usize] = true;
                raw_edges.push((a, b, border));
            }
        }
    }
    // Horizontal pixel-edges at integer y.
    for y in 0..=h {
        for x in 0..w {
            let transition = y == 0
                || y == h
                || mask.get(x, y - 1) != mask.get(x, y);
            if transition {
                let border = y == 0 || y == h;
                let a = lattice_id(x, y);
                let b = lattice_id(x + 1, y);
                used[a as usize] = true;
                used[b as usize] = true;
                raw_edges.push((a, b, border));
            }
        }
    }
    // Compact to the used lattice points.
    let mut remap = vec![u32::MAX; used.len()];
    let mut points = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = points.len() as u32;
            let x = (i as u32) % (w + 1);
            let y = (i as u32) / (w + 1);
            points.push(Point::new(x as f64, y as f64));
        }
    }
    let edges: Vec<_> = raw_edges
        .iter()
        .map(|&(a, b, border)| (remap[a as usize], remap[b as usize], border))
        .collect();
    Pslg::from_edges(points, &edges, w, h)
}

/// A maximal anchor-bounded path (or an anchor-free closed loop) of
/// PSLG vertices.
#[derive(Debug, Clone)]
pub struct Chain {
    /// Vertex ids along the chain. For loops, the first vertex is the
    /// designated start and is not repeated at the end.
    pub vertices: Vec<u32>,
    pub is_loop: bool,
}

impl Chain {
    pub fn points(&self, pslg: &Pslg) -> Vec<Point64> {
        self.vertices.iter().map(|&v| pslg.points[v as usize]).collect()
    }
}

/// Chain decomposition of a PSLG at its anchor vertices.
#[derive(Debug, Clone)]
pub struct ChainSet {
    pub chains: Vec<Chain>,
    /// Per-vertex anchor flag (degree != 2, plus the four domain corners).
    pub is_anchor: Vec<bool>,
}

/// Decompose the PSLG into anchor-bounded chains covering every edge
/// exactly once. Traversal is deterministic: anchors in (y, x) order,
/// outgoing edges in angle order.
pub fn decompose_chains(pslg: &Pslg) -> ChainSet {
    let n = pslg.num_vertices();
    let (w, h) = (pslg.width as f64, pslg.height as f64);
    let mut is_anchor = vec![false; n];
    for v in 0..n {
        let p = pslg.points[v];
        let corner = (p.x == 0.0 || p.x == w) && (p.y == 0.0 || p.y == h);
        is_anchor[v] = pslg.degree(v as u32) != 2 || corner;
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (pslg.points[a as usize], pslg.points[b as usize]);
        pa.y.total_cmp(&pb.y).then(pa.x.total_cmp(&pb.x))
    });

    let mut edge_used = vec![false; pslg.half_edges.len() / 2];
    let mut chains = Vec::new();

    let walk = |start_he: u32, edge_used: &mut Vec<bool>, stop_at_anchor: bool| -> Chain {
        let mut verts = vec![pslg.half_edges[start_he as usize].origin];
        let mut he = start_he;
        loop {
            edge_used[(he / 2) as usize] = true;
            let v = pslg.half_edges[he as usize].target;
            let at_anchor = is_anchor[v as usize];
            if stop_at_anchor && at_anchor {
                verts.push(v);
                break;
            }
            if !stop_at_anchor && v == verts[0] {
                break; // loop closed; start not repeated
            }
            verts.push(v);
            // Degree-2 continuation: the outgoing edge that is not the
            // reverse of the one we came in on.
            let twin = he ^ 1;
            he = *pslg
                .outgoing(v)
                .iter()
                .find(|&&e| e != twin)
                .expect("degree-2 vertex must have a continuation");
        }
        Chain { vertices: verts, is_loop: !stop_at_anchor }
    };

    for &v in &order {
        if !is_anchor[v as usize] {
            continue;
        }
        for &he in pslg.outgoing(v) {
            if !edge_used[(he / 2) as usize] {
                chains.push(walk(he, &mut edge_used, true));
            }
        }
    }
    // Anchor-free closed loops.
    for &v in &order {
        for &he in pslg.outgoing(v) {
            if !edge_used[(he / 2) as usize] {
                chains.push(walk(he, &mut edge_used, false));
            }
        }
    }
    ChainSet { chains, is_anchor }
}

/// Rebuild a PSLG from a set of chains over an existing vertex pool.
/// Unreferenced vertices are dropped.
pub fn pslg_from_chains(
    points: &[Point64],
    chains: &[Chain],
    border_flags: &[Vec<bool>],
    width: u32,
    height: u32,
) -> Pslg {
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut new_points = Vec::new();
    let mut edges: Vec<(u32, u32, bool)> = Vec::new();
    let mut seen_edges: HashMap<(u32, u32), ()> = HashMap::new();
    for (ci, chain) in chains.iter().enumerate() {
        let vs = &chain.vertices;
        let m = vs.len();
        let count = if chain.is_loop { m } else { m - 1 };
        for i in 0..count {
            let a = vs[i];
            let b = vs[(i + 1) % m];
            let ra = *remap.entry(a).or_insert_with(|| {
                new_points.push(points[a as usize]);
                (new_points.len() - 1) as u32
            });
            let rb = *remap.entry(b).or_insert_with(|| {
                new_points.push(points[b as usize]);
                (new_points.len() - 1) as u32
            });
            let key = (ra.min(rb), ra.max(rb));
            if seen_edges.insert(key, ()).is_none() {
                let border = border_flags
                    .get(ci)
                    .and_then(|f| f.get(i))
                    .copied()
                    .unwrap_or(false);
                edges.push((ra, rb, border));
            }
        }
    }
    Pslg::from_edges(new_points, &edges, width, height)
}

/// A simple boundary cycle produced by face tracing. Positive area =
/// face outer boundary; negative = hole boundary or the unbounded face.
#[derive(Debug, Clone)]
pub struct FaceCycle {
    pub vertices: Vec<u32>,
    pub half_edges: Vec<u32>,
    pub area: f64,
}

/// Trace all face boundary cycles via the half-edge rotation system.
/// Pinched walks (articulation vertices) are split into simple cycles.
pub fn trace_faces(pslg: &Pslg) -> Result<Vec<FaceCycle>, PslgError> {
    for v in 0..pslg.num_vertices() {
        if pslg.degree(v as u32) == 1 {
            return Err(PslgError::DanglingEdge(v));
        }
    }
    let nh = pslg.half_edges.len();
    let mut visited = vec![false; nh];
    let mut cycles = Vec::new();
    for start in 0..nh as u32 {
        if visited[start as usize] {
            continue;
        }
        // Collect the orbit.
        let mut orbit = Vec::new();
        let mut h = start;
        loop {
            visited[h as usize] = true;
            orbit.push(h);
            h = pslg.next_half_edge(h);
            if h == start {
                break;
            }
        }
        split_orbit(pslg, &orbit, &mut cycles);
    }
    Ok(cycles)
}

/// Split a closed half-edge walk into simple vertex cycles.
fn split_orbit(pslg: &Pslg, orbit: &[u32], cycles: &mut Vec<FaceCycle>) {
    // Stack of (vertex, incoming half-edge). A repeated vertex closes a
    // simple sub-cycle which is extracted immediately.
    let mut stack: Vec<(u32, u32)> = Vec::new();
    let mut pos: HashMap<u32, usize> = HashMap::new();
    for &he in orbit {
        let v = pslg.half_edges[he as usize].origin;
        if let Some(&p) = pos.get(&v) {
            let tail = stack.split_off(p);
            let vertices: Vec<u32> = tail.iter().map(|&(v, _)| v).collect();
            let half_edges: Vec<u32> = tail.iter().map(|&(_, h)| h).collect();
            for &(tv, _) in &tail {
                pos.remove(&tv);
            }
            push_cycle(pslg, vertices, half_edges, cycles);
        }
        pos.insert(v, stack.len());
        stack.push((v, he));
    }
    if !stack.is_empty() {
        let vertices: Vec<u32> = stack.iter().map(|&(v, _)| v).collect();
        let half_edges: Vec<u32> = stack.iter().map(|&(_, h)| h).collect();
        push_cycle(pslg, vertices, half_edges, cycles);
    }
}

fn push_cycle(pslg: &Pslg, vertices: Vec<u32>, half_edges: Vec<u32>, cycles: &mut Vec<FaceCycle>) {
    if vertices.len() < 3 {
        return; // degenerate back-and-forth remnant
    }
    let pts: Vec<Point64> = vertices.iter().map(|&v| pslg.points[v as usize]).collect();
    let area = signed_area(&pts);
    cycles.push(FaceCycle { vertices, half_edges, area });
}

/// Assemble traced cycles into labeled polygons: positive cycles become
/// faces, negative cycles become holes of their smallest strictly
/// containing face, and each face takes the majority label of the mask
/// pixels whose centers it contains. Adjacent same-label faces are
/// dissolved and the graph re-traced.
pub fn assemble_and_label(pslg: &Pslg, mask: &LabelMask) -> Result<Partition, PslgError> {
    if pslg.width != mask.width || pslg.height != mask.height {
        return Err(PslgError::DimensionMismatch(
            mask.width,
            mask.height,
            pslg.width,
            pslg.height,
        ));
    }
    let mut graph = pslg.clone();
    loop {
        let cycles = trace_faces(&graph)?;
        let faces = build_faces(&graph, &cycles, mask)?;
        // Constraint: adjacent faces must differ in label. Same-label
        // adjacency can appear after simplification; dissolve by
        // deleting the shared edges and re-tracing.
        let mut drop_edges: Vec<(u32, u32)> = Vec::new();
        for (he_idx, he) in graph.half_edges.iter().enumerate().step_by(2) {
            if he.on_border {
                continue;
            }
            let f1 = faces.face_of_half[he_idx];
            let f2 = faces.face_of_half[he_idx + 1];
            if let (Some(f1), Some(f2)) = (f1, f2) {
                if f1 != f2 && faces.labels[f1] == faces.labels[f2] {
                    drop_edges.push(graph.edge_key(he_idx as u32));
                }
            }
        }
        if drop_edges.is_empty() {
            return Ok(build_partition(&graph, faces, mask));
        }
        let drop: std::collections::HashSet<(u32, u32)> = drop_edges.into_iter().collect();
        let edges: Vec<(u32, u32, bool)> = (0..graph.half_edges.len())
            .step_by(2)
            .filter(|&i| !drop.contains(&graph.edge_key(i as u32)))
            .map(|i| {
                let he = graph.half_edges[i];
                (he.origin, he.target, he.on_border)
            })
            .collect();
        // Compact vertices that lost all incident edges.
        let mut remap = vec![u32::MAX; graph.points.len()];
        let mut pts = Vec::new();
        for &(u, v, _) in &edges {
            for x in [u, v] {
                if remap[x as usize] == u32::MAX {
                    remap[x as usize] = pts.len() as u32;
                    pts.push(graph.points[x as usize]);
                }
            }
        }
        let edges: Vec<_> = edges
            .iter()
            .map(|&(u, v, b)| (remap[u as usize], remap[v as usize], b))
            .collect();
        graph = Pslg::from_edges(pts, &edges, graph.width, graph.height);
    }
}

struct FaceAssembly {
    /// Indices into `cycles` of positive (outer) cycles, one per face.
    outer: Vec<FaceCycle>,
    /// Hole cycles attached per face.
    holes: Vec<Vec<FaceCycle>>,
    labels: Vec<u16>,
    face_of_half: Vec<Option<usize>>,
}

fn build_faces(
    pslg: &Pslg,
    cycles: &[FaceCycle],
    mask: &LabelMask,
) -> Result<FaceAssembly, PslgError> {
    let mut pos_idx: Vec<usize> = Vec::new();
    let mut neg_idx: Vec<usize> = Vec::new();
    for (i, c) in cycles.iter().enumerate() {
        if c.area > 0.0 {
            pos_idx.push(i);
        } else {
            neg_idx.push(i);
        }
    }
    // Deterministic face order: topmost-leftmost vertex of the outer cycle.
    pos_idx.sort_by(|&a, &b| {
        let key = |c: &FaceCycle| {
            c.vertices
                .iter()
                .map(|&v| {
                    let p = pslg.points[v as usize];
                    (p.y, p.x)
                })
                .fold((f64::INFINITY, f64::INFINITY), |acc, k| {
                    if (k.0, k.1) < acc {
                        k
                    } else {
                        acc
                    }
                })
        };
        let (ka, kb) = (key(&cycles[a]), key(&cycles[b]));
        ka.partial_cmp(&kb).unwrap()
    });

    let outer: Vec<FaceCycle> = pos_idx.iter().map(|&i| cycles[i].clone()).collect();
    let mut holes: Vec<Vec<FaceCycle>> = vec![Vec::new(); outer.len()];

    // Attach each negative cycle to the smallest positive cycle that
    // strictly contains it and has strictly larger area. Exactly one
    // negative cycle (the unbounded face) stays unassigned.
    let mut unbounded = 0usize;
    for (ni, &ci) in neg_idx.iter().enumerate() {
        let cyc = &cycles[ci];
        let mut ring: Vec<Point64> =
            cyc.vertices.iter().map(|&v| pslg.points[v as usize]).collect();
        ring.reverse();
        let probe = interior_point(&LabeledPolygon {
            class: 0,
            outer: Ring(ring),
            holes: vec![],
        })
        .map_err(|_| PslgError::UnassignableHole(ni))?;
        let hole_area = -cyc.area;
        let mut best: Option<usize> = None;
        for (fi, f) in outer.iter().enumerate() {
            if f.area <= hole_area {
                continue;
            }
            let fring: Vec<Point64> =
                f.vertices.iter().map(|&v| pslg.points[v as usize]).collect();
            if crate::geom::point_strictly_in_ring(probe, &fring)
                && best.map_or(true, |b| outer[b].area > f.area)
            {
                best = Some(fi);
            }
        }
        match best {
            Some(fi) => holes[fi].push(cyc.clone()),
            None => unbounded += 1,
        }
    }
    if unbounded != 1 {
        return Err(PslgError::UnassignableHole(usize::MAX));
    }

    // Pixel -> face map: rasterize positive cycles largest-first so the
    // innermost containing cycle wins.
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut face_map: Vec<u32> = vec![u32::MAX; w * h];
    let mut order: Vec<usize> = (0..outer.len()).collect();
    order.sort_by(|&a, &b| outer[b].area.total_cmp(&outer[a].area));
    for &fi in &order {
        let ring: Vec<Point64> = outer[fi]
            .vertices
            .iter()
            .map(|&v| pslg.points[v as usize])
            .collect();
        rasterize_ring_interior(&ring, w, h, |x, y| {
            face_map[y * w + x] = fi as u32;
        });
    }

    // Majority vote per face.
    let c = mask.num_classes as usize;
    let mut hist: Vec<Vec<u64>> = vec![vec![0; c]; outer.len()];
    for (i, &f) in face_map.iter().enumerate() {
        if f != u32::MAX {
            hist[f as usize][mask.labels[i] as usize] += 1;
        }
    }
    let mut labels = Vec::with_capacity(outer.len());
    for (fi, counts) in hist.iter().enumerate() {
        let best = counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i as u16)
            .unwrap_or(0);
        if counts.iter().all(|&n| n == 0) {
            // Sliver face without any pixel center: sample at an
            // interior point instead.
            let ring: Vec<Point64> = outer[fi]
                .vertices
                .iter()
                .map(|&v| pslg.points[v as usize])
                .collect();
            let probe = interior_point(&LabeledPolygon {
                class: 0,
                outer: Ring(ring),
                holes: vec![],
            })
            .map_err(|_| PslgError::UnassignableHole(fi))?;
            let x = (probe.x.floor() as usize).min(w - 1);
            let y = (probe.y.floor() as usize).min(h - 1);
            labels.push(mask.labels[y * w + x]);
        } else {
            labels.push(best);
        }
    }

    // Half-edge -> face map (outer cycles and attached holes).
    let mut face_of_half: Vec<Option<usize>> = vec![None; pslg.half_edges.len()];
    for (fi, f) in outer.iter().enumerate() {
        for &he in &f.half_edges {
            face_of_half[he as usize] = Some(fi);
        }
        for hole in &holes[fi] {
            for &he in &hole.half_edges {
                face_of_half[he as usize] = Some(fi);
            }
        }
    }

    Ok(FaceAssembly { outer, holes, labels, face_of_half })
}

/// Invoke `f(x, y)` for every pixel whose center lies inside the ring
/// (even-odd rule, half-open on exact crossings).
fn rasterize_ring_interior<F: FnMut(usize, usize)>(ring: &[Point64], w: usize, h: usize, mut f: F) {
    let n = ring.len();
    let ylo = ring.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let yhi = ring.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let j0 = (ylo.floor().max(0.0)) as usize;
    let j1 = (yhi.ceil().min(h as f64)) as usize;
    let mut xs: Vec<f64> = Vec::new();
    for j in j0..j1.min(h) {
        let y = j as f64 + 0.5;
        xs.clear();
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if (a.y > y) != (b.y > y) {
                let t = (y - a.y) / (b.y - a.y);
                xs.push(a.x + t * (b.x - a.x));
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            let mut i = (pair[0] - 0.5).floor() as i64 + 1;
            while (i as f64) + 0.5 <= pair[0] {
                i += 1;
            }
            while i >= 0 && (i as f64) + 0.5 < pair[1] {
                if (i as usize) < w {
                    f(i as usize, j);
                }
                i += 1;
                if i as f64 + 0.5 >= pair[1] {
                    break;
                }
            }
        }
    }
}

fn build_partition(pslg: &Pslg, faces: FaceAssembly, mask: &LabelMask) -> Partition {
    let mut polygons = Vec::with_capacity(faces.outer.len());
    for (fi, f) in faces.outer.iter().enumerate() {
        let outer = Ring(minimal_ring(pslg, &f.vertices));
        let mut holes: Vec<Ring> = faces.holes[fi]
            .iter()
            .map(|hc| Ring(minimal_ring(pslg, &hc.vertices)))
            .collect();
        holes.sort_by(|a, b| {
            let ka = a.0.iter().map(|p| (p.y, p.x)).fold((f64::INFINITY, f64::INFINITY), min2);
            let kb = b.0.iter().map(|p| (p.y, p.x)).fold((f64::INFINITY, f64::INFINITY), min2);
            ka.partial_cmp(&kb).unwrap()
        });
        polygons.push(LabeledPolygon { class: faces.labels[fi], outer, holes });
    }
    Partition { width: mask.width, height: mask.height, polygons }
}

fn min2(acc: (f64, f64), k: (f64, f64)) -> (f64, f64) {
    if k < acc {
        k
    } else {
        acc
    }
}

/// Ring vertices with redundant points removed: a vertex is dropped iff
/// it has degree 2 in the PSLG and its two neighbors are collinear with
/// it. Degree >= 3 vertices always stay so shared chains remain
/// geometrically identical on both sides.
fn minimal_ring(pslg: &Pslg, cycle: &[u32]) -> Vec<Point64> {
    let n = cycle.len();
    let mut keep = Vec::with_capacity(n);
    for i in 0..n {
        let v = cycle[i];
        let prev = pslg.points[cycle[(i + n - 1) % n] as usize];
        let cur = pslg.points[v as usize];
        let next = pslg.points[cycle[(i + 1) % n] as usize];
        let redundant = pslg.degree(v) == 2 && collinear(prev, cur, next);
        if !redundant {
            keep.push(cur);
        }
    }
    if keep.len() < 3 {
        // Degenerate after removal; fall back to the raw cycle.
        return cycle.iter().map(|&v| pslg.points[v as usize]).collect();
    }
    keep
}

/// Full reconstruction without simplification.
pub fn reconstruct(mask: &LabelMask) -> Result<Partition, PslgError> {
    let pslg = build_overdense_pslg(mask);
    assemble_and_label(&pslg, mask)
}
