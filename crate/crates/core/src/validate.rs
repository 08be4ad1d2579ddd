//! Structural validation of labeled partitions against the six
//! basemap constraints, plus tolerance-based vertex snapping for inputs
//! with microscopic gaps.

use std::collections::HashMap;

use crate::error::PslgError;
use crate::metrics::topology::global_topology;
use crate::partition::{LabeledPolygon, Partition, Ring};
use crate::Point64;

#[derive(Debug, Clone)]
pub struct ComplianceReport {
    /// (a) polygons tile the domain: disjoint interiors, full coverage.
    pub planar_partition_ok: bool,
    /// (b) every interior boundary segment is shared by exactly two
    /// polygons with identical geometry.
    pub shared_boundaries_ok: bool,
    /// (c) gap, inter-class and intra-class overlap rates are zero.
    pub zero_gap_overlap_ok: bool,
    /// (d) rings are finite, simple, with >= 3 distinct vertices.
    pub linear_geometry_ok: bool,
    /// (e) polygons sharing a boundary segment carry different classes.
    pub semantic_consistency_ok: bool,
    /// (f) no zero-length edges or collinear-redundant vertices.
    pub minimal_redundancy_ok: bool,
    pub gap_rate: f64,
    pub inter_overlap: f64,
    pub intra_overlap: f64,
    pub sec: f64,
    pub violations: Vec<String>,
}

impl ComplianceReport {
    pub fn all_ok(&self) -> bool {
        self.planar_partition_ok
            && self.shared_boundaries_ok
            && self.zero_gap_overlap_ok
            && self.linear_geometry_ok
            && self.semantic_consistency_ok
            && self.minimal_redundancy_ok
    }
}

fn key_of(p: Point64) -> (u64, u64) {
    ((p.y + 0.0).to_bits(), (p.x + 0.0).to_bits())
}

fn seg_key(a: Point64, b: Point64) -> ((u64, u64), (u64, u64)) {
    let (ka, kb) = (key_of(a), key_of(b));
    if ka <= kb {
        (ka, kb)
    } else {
        (kb, ka)
    }
}

pub fn validate_acpv(p: &Partition) -> ComplianceReport {
    let mut violations = Vec::new();
    let (w, h) = (p.width as f64, p.height as f64);
    // Tolerance of 1e-6 px^2 on absolute areas, expressed as a rate.
    let rate_eps = 1e-6 / (w * h);

    let rates = global_topology(p);
    let planar_partition_ok = rates.gap <= rate_eps
        && rates.inter <= rate_eps
        && rates.intra <= rate_eps;
    let zero_gap_overlap_ok = planar_partition_ok;
    if rates.gap > rate_eps {
        violations.push(format!("(a/c) gap rate {:.6}", rates.gap));
    }
    if rates.inter > rate_eps {
        violations.push(format!("(a/c) inter-class overlap rate {:.6}", rates.inter));
    }
    if rates.intra > rate_eps {
        violations.push(format!("(a/c) intra-class overlap rate {:.6}", rates.intra));
    }

    // (b) + (e): interior segment incidence by exact geometry.
    let mut incidence: HashMap<((u64, u64), (u64, u64)), Vec<usize>> = HashMap::new();
    for (pi, poly) in p.polygons.iter().enumerate() {
        for (a, b) in poly.segments() {
            if on_border(a, b, w, h) {
                continue;
            }
            incidence.entry(seg_key(a, b)).or_default().push(pi);
        }
    }
    let mut shared_boundaries_ok = true;
    let mut semantic_consistency_ok = true;
    for (key, polys) in &incidence {
        if polys.len() != 2 {
            shared_boundaries_ok = false;
            violations.push(format!(
                "(b) interior segment {} incident to {} polygon(s): {:?}",
                fmt_seg(*key),
                polys.len(),
                polys
            ));
        } else if polys[0] != polys[1]
            && p.polygons[polys[0]].class == p.polygons[polys[1]].class
        {
            semantic_consistency_ok = false;
            violations.push(format!(
                "(e) polygons {} and {} share segment {} with equal class {}",
                polys[0],
                polys[1],
                fmt_seg(*key),
                p.polygons[polys[0]].class
            ));
        }
    }

    // (d) ring geometry.
    let mut linear_geometry_ok = true;
    for (pi, poly) in p.polygons.iter().enumerate() {
        for (ri, ring) in rings(poly) {
            if ring.0.iter().any(|q| !q.x.is_finite() || !q.y.is_finite()) {
                linear_geometry_ok = false;
                violations.push(format!("(d) polygon {pi} ring {ri}: non-finite coordinate"));
                continue;
            }
            let distinct: std::collections::HashSet<(u64, u64)> =
                ring.0.iter().map(|&q| key_of(q)).collect();
            if distinct.len() < 3 {
                linear_geometry_ok = false;
                violations.push(format!(
                    "(d) polygon {pi} ring {ri}: fewer than 3 distinct vertices"
                ));
                continue;
            }
            if !ring.is_simple() {
                linear_geometry_ok = false;
                violations.push(format!("(d) polygon {pi} ring {ri}: self-intersecting"));
            }
        }
    }

    // (f) zero-length edges and globally collinear vertices. A point is
    // redundant only if every ring occurrence is collinear with its
    // neighbors; shared corners and T-junctions are kept.
    let mut minimal_redundancy_ok = true;
    let mut occurrence: HashMap<(u64, u64), (bool, Point64)> = HashMap::new();
    for (pi, poly) in p.polygons.iter().enumerate() {
        for (ri, ring) in rings(poly) {
            let n = ring.0.len();
            for i in 0..n {
                let (prev, cur, next) = (
                    ring.0[(i + n - 1) % n],
                    ring.0[i],
                    ring.0[(i + 1) % n],
                );
                if cur == next {
                    minimal_redundancy_ok = false;
                    violations.push(format!(
                        "(f) polygon {pi} ring {ri}: zero-length edge at ({}, {})",
                        cur.x, cur.y
                    ));
                }
                let cross = (cur.x - prev.x) * (next.y - prev.y)
                    - (cur.y - prev.y) * (next.x - prev.x);
                let collinear = cross.abs() <= 1e-9;
                occurrence
                    .entry(key_of(cur))
                    .and_modify(|e| e.0 &= collinear)
                    .or_insert((collinear, cur));
            }
        }
    }
    for (_, (all_collinear, pt)) in occurrence {
        if all_collinear {
            minimal_redundancy_ok = false;
            violations.push(format!(
                "(f) redundant collinear vertex at ({}, {})",
                pt.x, pt.y
            ));
        }
    }

    ComplianceReport {
        planar_partition_ok,
        shared_boundaries_ok: shared_boundaries_ok && rates.sec == 1.0,
        zero_gap_overlap_ok,
        linear_geometry_ok,
        semantic_consistency_ok,
        minimal_redundancy_ok,
        gap_rate: rates.gap,
        inter_overlap: rates.inter,
        intra_overlap: rates.intra,
        sec: rates.sec,
        violations,
    }
}

fn rings(poly: &LabeledPolygon) -> impl Iterator<Item = (usize, &Ring)> {
    std::iter::once(&poly.outer).chain(poly.holes.iter()).enumerate()
}

fn on_border(a: Point64, b: Point64, w: f64, h: f64) -> bool {
    (a.x == 0.0 && b.x == 0.0)
        || (a.x == w && b.x == w)
        || (a.y == 0.0 && b.y == 0.0)
        || (a.y == h && b.y == h)
}

fn fmt_seg(key: ((u64, u64), (u64, u64))) -> String {
    let p = |k: (u64, u64)| (f64::from_bits(k.1), f64::from_bits(k.0));
    let (a, b) = (p(key.0), p(key.1));
    format!("({}, {})-({}, {})", a.0, a.1, b.0, b.1)
}

/// Merge vertices within `tolerance` (union-find over a spatial grid,
/// cluster centroid as representative) and drop the resulting duplicate
/// ring points. Idempotent; `tolerance = 0` is the identity.
pub fn snap_and_clean(p: &Partition, tolerance: f64) -> Result<Partition, PslgError> {
    assert!(tolerance >= 0.0);
    if tolerance == 0.0 {
        return Ok(p.clone());
    }
    // Gather all ring vertices.
    let mut pts: Vec<Point64> = Vec::new();
    for poly in &p.polygons {
        for (_, ring) in rings(poly) {
            pts.extend(ring.0.iter().copied());
        }
    }
    // Spatial grid keyed by cell of size `tolerance`.
    let cell = |q: Point64| ((q.x / tolerance).floor() as i64, (q.y / tolerance).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &q) in pts.iter().enumerate() {
        grid.entry(cell(q)).or_default().push(i);
    }
    let mut uf = UnionFind::new(pts.len());
    for (i, &q) in pts.iter().enumerate() {
        let (cx, cy) = cell(q);
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(others) = grid.get(&(cx + dx, cy + dy)) {
                    for &j in others {
                        if j > i && pts[i].dist(pts[j]) <= tolerance {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }
    // Cluster centroids.
    let mut sums: HashMap<usize, (f64, f64, usize)> = HashMap::new();
    for (i, &q) in pts.iter().enumerate() {
        let r = uf.find(i);
        let e = sums.entry(r).or_insert((0.0, 0.0, 0));
        e.0 += q.x;
        e.1 += q.y;
        e.2 += 1;
    }
    let rep: HashMap<usize, Point64> = sums
        .into_iter()
        .map(|(r, (sx, sy, n))| (r, Point64::new(sx / n as f64, sy / n as f64)))
        .collect();

    let mut cursor = 0usize;
    let mut out = Vec::with_capacity(p.polygons.len());
    for (pi, poly) in p.polygons.iter().enumerate() {
        let mut snap_ring = |ring: &Ring, cursor: &mut usize| -> Result<Ring, PslgError> {
            let mut new_pts: Vec<Point64> = Vec::with_capacity(ring.0.len());
            for _ in &ring.0 {
                let q = rep[&uf.find(*cursor)];
                *cursor += 1;
                if new_pts.last() != Some(&q) {
                    new_pts.push(q);
                }
            }
            while new_pts.len() > 1 && new_pts.first() == new_pts.last() {
                new_pts.pop();
            }
            let distinct: std::collections::HashSet<(u64, u64)> =
                new_pts.iter().map(|&q| key_of(q)).collect();
            if distinct.len() < 3 {
                return Err(PslgError::DegenerateAfterSnap(pi));
            }
            let r = Ring(new_pts);
            if !r.is_simple() {
                return Err(PslgError::SelfIntersectingAfterSnap(pi));
            }
            Ok(r)
        };
        let outer = snap_ring(&poly.outer, &mut cursor)?;
        let holes = poly
            .holes
            .iter()
            .map(|hr| snap_ring(hr, &mut cursor))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(LabeledPolygon { class: poly.class, outer, holes });
    }
    Ok(Partition { width: p.width, height: p.height, polygons: out })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pslg::reconstruct;
    use crate::raster::LabelMask;

    fn rect(class: u16, x0: f64, y0: f64, x1: f64, y1: f64) -> LabeledPolygon {
        LabeledPolygon {
            class,
            outer: Ring(vec![
                Point64::new(x0, y0),
                Point64::new(x1, y0),
                Point64::new(x1, y1),
                Point64::new(x0, y1),
            ]),
            holes: vec![],
        }
    }

    #[test]
    fn reconstruction_satisfies_all_constraints() {
        // Building-in-parcel: class-1 square inside a class-0 field.
        let mut labels = vec![0u16; 256];
        for y in 5..11 {
            for x in 5..11 {
                labels[y * 16 + x] = 1;
            }
        }
        let mask = LabelMask::new(16, 16, labels, 2);
        let part = reconstruct(&mask).unwrap();
        let r = validate_acpv(&part);
        assert!(r.all_ok(), "violations: {:?}", r.violations);
        assert_eq!((r.gap_rate, r.inter_overlap, r.intra_overlap, r.sec), (0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn overlapping_squares_fail_gap_overlap() {
        let p = Partition {
            width: 3,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0), rect(1, 1.0, 0.0, 3.0, 2.0)],
        };
        let r = validate_acpv(&p);
        assert!(!r.zero_gap_overlap_ok);
        assert!(r.inter_overlap > 0.0 || r.intra_overlap > 0.0);
    }

    #[test]
    fn offset_shared_edge_fails_shared_boundaries() {
        let p = Partition {
            width: 4,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0), rect(1, 2.1, 0.0, 4.0, 2.0)],
        };
        let r = validate_acpv(&p);
        assert!(!r.shared_boundaries_ok);
        assert!(r.sec < 1.0);
    }

    #[test]
    fn bowtie_ring_fails_linear_geometry() {
        let mut p = Partition {
            width: 2,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0)],
        };
        p.polygons[0].outer = Ring(vec![
            Point64::new(0.0, 0.0),
            Point64::new(2.0, 2.0),
            Point64::new(2.0, 0.0),
            Point64::new(0.0, 2.0),
        ]);
        let r = validate_acpv(&p);
        assert!(!r.linear_geometry_ok);
    }

    #[test]
    fn same_class_neighbors_fail_semantic_consistency() {
        let p = Partition {
            width: 4,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0), rect(0, 2.0, 0.0, 4.0, 2.0)],
        };
        let r = validate_acpv(&p);
        assert!(!r.semantic_consistency_ok);
        // The shared edge itself is properly shared.
        assert_eq!(r.sec, 1.0);
    }

    #[test]
    fn collinear_vertex_fails_minimal_redundancy() {
        let mut p = Partition {
            width: 2,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0)],
        };
        p.polygons[0].outer = Ring(vec![
            Point64::new(0.0, 0.0),
            Point64::new(1.0, 0.0),
            Point64::new(2.0, 0.0),
            Point64::new(2.0, 2.0),
            Point64::new(0.0, 2.0),
        ]);
        let r = validate_acpv(&p);
        assert!(!r.minimal_redundancy_ok);
    }

    #[test]
    fn t_junction_vertices_are_not_redundant() {
        // Left column split into two rectangles; right column one tall
        // rectangle whose edge passes straight through the junctions.
        let mut labels = vec![0u16; 16];
        for y in 0..4 {
            for x in 0..4 {
                labels[y * 4 + x] = if x >= 2 {
                    2
                } else if y >= 2 {
                    1
                } else {
                    0
                };
            }
        }
        let mask = LabelMask::new(4, 4, labels, 3);
        let part = reconstruct(&mask).unwrap();
        let r = validate_acpv(&part);
        assert!(r.all_ok(), "violations: {:?}", r.violations);
    }

    #[test]
    fn snap_merges_offset_edge() {
        let p = Partition {
            width: 4,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0), rect(1, 2.05, 0.0, 4.0, 2.0)],
        };
        assert!(validate_acpv(&p).sec < 1.0);
        let snapped = snap_and_clean(&p, 0.1).unwrap();
        let r = validate_acpv(&snapped);
        assert_eq!(r.sec, 1.0, "violations: {:?}", r.violations);
        // Idempotent: snapping again changes nothing.
        let twice = snap_and_clean(&snapped, 0.1).unwrap();
        for (a, b) in snapped.polygons.iter().zip(&twice.polygons) {
            assert_eq!(a.outer.0, b.outer.0);
        }
    }

    #[test]
    fn snap_zero_tolerance_is_identity() {
        let p = Partition {
            width: 4,
            height: 2,
            polygons: vec![rect(0, 0.0, 0.0, 2.0, 2.0), rect(1, 2.05, 0.0, 4.0, 2.0)],
        };
        let s = snap_and_clean(&p, 0.0).unwrap();
        assert_eq!(s.polygons[1].outer.0, p.polygons[1].outer.0);
    }

    #[test]
    fn snap_valid_partition_unchanged() {
        let mut labels = vec![0u16; 16];
        labels[5] = 1;
        let mask = LabelMask::new(4, 4, labels, 2);
        let part = reconstruct(&mask).unwrap();
        let snapped = snap_and_clean(&part, 0.1).unwrap();
        for (a, b) in part.polygons.iter().zip(&snapped.polygons) {
            assert_eq!(a.outer.0, b.outer.0);
            assert_eq!(a.holes.len(), b.holes.len());
        }
    }

    #[test]
    fn snap_reporting_self_intersection() {
        // Merging the two near points (2, 2.01) and (2, 1.99) pinches the
        // ring into a figure-eight.
        let p = Partition {
            width: 4,
            height: 4,
            polygons: vec![LabeledPolygon {
                class: 0,
                outer: Ring(vec![
                    Point64::new(0.0, 0.0),
                    Point64::new(4.0, 0.0),
                    Point64::new(2.0, 2.01),
                    Point64::new(4.0, 4.0),
                    Point64::new(0.0, 4.0),
                    Point64::new(2.0, 1.99),
                ]),
                holes: vec![],
            }],
        };
        match snap_and_clean(&p, 0.1) {
            Err(PslgError::SelfIntersectingAfterSnap(0)) => {}
            other => panic!("expected self-intersection error, got {other:?}"),
        }
    }
}
