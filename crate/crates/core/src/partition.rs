//! Labeled polygons-with-holes over a rectangular pixel domain, plus the
//! GeoJSON FeatureCollection interchange format.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{GeomError, PartitionError};
use crate::geom::{point_strictly_in_ring, signed_area, Point};
use crate::Point64;

/// Closed vertex cycle; the closing duplicate is not stored. Outer rings
/// carry positive shoelace area, holes negative (x right, y down).
#[derive(Debug, Clone, PartialEq)]
pub struct Ring(pub Vec<Point64>);

impl Ring {
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.0)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reverse(&mut self) {
        self.0.reverse();
    }

    /// Segments of the ring, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Point64, Point64)> + '_ {
        let n = self.0.len();
        (0..n).map(move |i| (self.0[i], self.0[(i + 1) % n]))
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    /// No two non-adjacent segments intersect.
    pub fn is_simple(&self) -> bool {
        use crate::geom::{segments_intersect, SegIntersection};
        let segs: Vec<_> = self.segments().collect();
        let n = segs.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                match segments_intersect(segs[i].0, segs[i].1, segs[j].0, segs[j].1, adjacent) {
                    SegIntersection::None => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// One polygon of the partition: an outer ring plus zero or more holes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPolygon {
    pub class: u16,
    pub outer: Ring,
    pub holes: Vec<Ring>,
}

impl LabeledPolygon {
    /// Outer area minus hole areas.
    pub fn area(&self) -> f64 {
        self.outer.area() - self.holes.iter().map(Ring::area).sum::<f64>()
    }

    /// All ring vertices (outer first, then holes), closing duplicates
    /// excluded.
    pub fn vertices(&self) -> impl Iterator<Item = Point64> + '_ {
        self.outer
            .0
            .iter()
            .chain(self.holes.iter().flat_map(|h| h.0.iter()))
            .copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(Ring::len).sum::<usize>()
    }

    /// All boundary segments, holes included.
    pub fn segments(&self) -> impl Iterator<Item = (Point64, Point64)> + '_ {
        self.outer
            .segments()
            .chain(self.holes.iter().flat_map(|h| h.segments()))
    }

    /// Boundary-inclusive containment (holes subtract).
    pub fn contains(&self, p: Point64) -> bool {
        if !crate::geom::point_in_ring(p, &self.outer.0) {
            return false;
        }
        !self.holes.iter().any(|h| point_strictly_in_ring(p, &h.0))
    }

    /// Strictly inside the outer ring and strictly outside all holes.
    pub fn contains_strict(&self, p: Point64) -> bool {
        if !point_strictly_in_ring(p, &self.outer.0) {
            return false;
        }
        !self
            .holes
            .iter()
            .any(|h| crate::geom::point_in_ring(p, &h.0))
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.outer.0 {
            lo.0 = lo.0.min(p.x);
            lo.1 = lo.1.min(p.y);
            hi.0 = hi.0.max(p.x);
            hi.1 = hi.1.max(p.y);
        }
        (lo.0, lo.1, hi.0, hi.1)
    }
}

/// A point strictly inside the polygon (outside all holes), found by
/// scanning horizontal lines through the outer ring's bbox.
pub fn interior_point(poly: &LabeledPolygon) -> Result<Point64, GeomError> {
    let (_, ylo, _, yhi) = poly.bbox();
    // Candidate scanlines: midpoints between consecutive distinct vertex
    // y-coordinates, densified with bbox subdivisions as fallback.
    let mut ys: Vec<f64> = poly.vertices().map(|p| p.y).collect();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut candidates: Vec<f64> = ys.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    for k in 1..16 {
        candidates.push(ylo + (yhi - ylo) * k as f64 / 16.0);
    }
    let mut best: Option<(f64, Point64)> = None;
    for y in candidates {
        let mut xs: Vec<f64> = Vec::new();
        for (a, b) in poly.segments() {
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
            let width = pair[1] - pair[0];
            let mid = Point::new(0.5 * (pair[0] + pair[1]), y);
            if width > 0.0
                && poly.contains_strict(mid)
                && best.map_or(true, |(w, _)| width > w)
            {
                best = Some((width, mid));
            }
        }
    }
    best.map(|(_, p)| p).ok_or(GeomError::EmptyInterior)
}

/// Labeled polygonal partition of a W×H pixel domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub width: u32,
    pub height: u32,
    pub polygons: Vec<LabeledPolygon>,
}

impl Partition {
    pub fn domain_area(&self) -> f64 {
        self.width as f64 * self.height as f64
    }

    pub fn num_classes(&self) -> u16 {
        self.polygons.iter().map(|p| p.class + 1).max().unwrap_or(1)
    }
}

/// Serialize as a GeoJSON FeatureCollection (pixel coordinates, no CRS).
pub fn write_partition(partition: &Partition, path: &Path) -> Result<(), PartitionError> {
    let json = partition_to_json(partition);
    fs::write(path, serde_json::to_string_pretty(&json)?)?;
    Ok(())
}

pub fn partition_to_json(partition: &Partition) -> Value {
    let features: Vec<Value> = partition
        .polygons
        .iter()
        .map(|poly| {
            let mut rings: Vec<Value> = Vec::with_capacity(1 + poly.holes.len());
            rings.push(ring_to_json(&poly.outer));
            rings.extend(poly.holes.iter().map(ring_to_json));
            json!({
                "type": "Feature",
                "properties": { "class": poly.class },
                "geometry": { "type": "Polygon", "coordinates": rings },
            })
        })
        .collect();
    json!({
        "type": "FeatureCollection",
        "properties": { "width": partition.width, "height": partition.height },
        "features": features,
    })
}

fn ring_to_json(ring: &Ring) -> Value {
    let mut coords: Vec<Value> = ring.0.iter().map(|p| json!([p.x, p.y])).collect();
    coords.push(json!([ring.0[0].x, ring.0[0].y]));
    Value::Array(coords)
}

/// Outcome flags from [`load_partition`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadFlags {
    /// Rings whose orientation had to be normalized.
    pub reoriented: usize,
}

/// Parse a GeoJSON FeatureCollection written by [`write_partition`].
/// Ring orientation is normalized on load (outer positive, holes
/// negative).
pub fn load_partition(path: &Path) -> Result<(Partition, LoadFlags), PartitionError> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    partition_from_json(&v)
}

pub fn partition_from_json(v: &Value) -> Result<(Partition, LoadFlags), PartitionError> {
    if v["type"] != "FeatureCollection" {
        return Err(PartitionError::NotFeatureCollection);
    }
    let width = v["properties"]["width"]
        .as_u64()
        .ok_or(PartitionError::MissingDimension("width"))? as u32;
    let height = v["properties"]["height"]
        .as_u64()
        .ok_or(PartitionError::MissingDimension("height"))? as u32;
    let features = v["features"].as_array().cloned().unwrap_or_default();
    let mut flags = LoadFlags::default();
    let mut polygons = Vec::with_capacity(features.len());
    for (idx, f) in features.iter().enumerate() {
        let geom_type = f["geometry"]["type"].as_str().unwrap_or("");
        if geom_type == "MultiPolygon" {
            return Err(PartitionError::MultiPolygon);
        }
        if geom_type != "Polygon" {
            return Err(PartitionError::NonPolygonGeometry(idx));
        }
        let class = f["properties"]["class"]
            .as_u64()
            .ok_or(PartitionError::MissingClass(idx))? as u16;
        let rings_json = f["geometry"]["coordinates"]
            .as_array()
            .ok_or(PartitionError::NonPolygonGeometry(idx))?;
        let mut rings: Vec<Ring> = Vec::with_capacity(rings_json.len());
        for rj in rings_json {
            let coords = rj.as_array().ok_or(PartitionError::NonPolygonGeometry(idx))?;
            let mut pts: Vec<Point64> = Vec::with_capacity(coords.len());
            for c in coords {
                let xy = c.as_array().ok_or(PartitionError::NonPolygonGeometry(idx))?;
                let x = xy[0].as_f64().ok_or(PartitionError::NonPolygonGeometry(idx))?;
                let y = xy[1].as_f64().ok_or(PartitionError::NonPolygonGeometry(idx))?;
                pts.push(Point::new(x, y));
            }
            if pts.len() < 4 || pts.first() != pts.last() {
                return Err(PartitionError::UnclosedRing(idx));
            }
            pts.pop();
            let mut distinct = pts.clone();
            distinct.dedup_by(|a, b| a == b);
            if distinct.len() < 3 {
                return Err(PartitionError::DegenerateRing(idx));
            }
            rings.push(Ring(pts));
        }
        if rings.is_empty() {
            return Err(PartitionError::DegenerateRing(idx));
        }
        let mut outer = rings.remove(0);
        if outer.signed_area() < 0.0 {
            outer.reverse();
            flags.reoriented += 1;
        }
        for h in rings.iter_mut() {
            if h.signed_area() > 0.0 {
                h.reverse();
                flags.reoriented += 1;
            }
        }
        polygons.push(LabeledPolygon { class, outer, holes: rings });
    }
    Ok((Partition { width, height, polygons }, flags))
}

/// Convert a polygon to the `geo` crate's type for overlay operations.
pub fn to_geo(poly: &LabeledPolygon) -> geo::Polygon<f64> {
    let to_ls = |ring: &Ring| {
        geo::LineString::from(
            ring.0
                .iter()
                .map(|p| geo::coord! { x: p.x, y: p.y })
                .collect::<Vec<_>>(),
        )
    };
    geo::Polygon::new(to_ls(&poly.outer), poly.holes.iter().map(to_ls).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("acpv-partition-tests");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn square(class: u16, x0: f64, y0: f64, s: f64) -> LabeledPolygon {
        LabeledPolygon {
            class,
            outer: Ring(vec![
                Point::new(x0, y0),
                Point::new(x0 + s, y0),
                Point::new(x0 + s, y0 + s),
                Point::new(x0, y0 + s),
            ]),
            holes: vec![],
        }
    }

    #[test]
    fn round_trip_unit_square() {
        let p = Partition { width: 1, height: 1, polygons: vec![square(0, 0.0, 0.0, 1.0)] };
        let path = tmp("rt.geojson");
        write_partition(&p, &path).unwrap();
        let (q, flags) = load_partition(&path).unwrap();
        assert_eq!(p, q);
        assert_eq!(flags.reoriented, 0);
    }

    #[test]
    fn clockwise_outer_reoriented_on_load() {
        let path = tmp("cw.geojson");
        let v = json!({
            "type": "FeatureCollection",
            "properties": {"width": 1, "height": 1},
            "features": [{
                "type": "Feature",
                "properties": {"class": 0},
                "geometry": {"type": "Polygon", "coordinates":
                    [[[0.0,0.0],[0.0,1.0],[1.0,1.0],[1.0,0.0],[0.0,0.0]]]},
            }],
        });
        fs::write(&path, v.to_string()).unwrap();
        let (p, flags) = load_partition(&path).unwrap();
        assert_eq!(flags.reoriented, 1);
        assert!(p.polygons[0].outer.signed_area() > 0.0);
    }

    #[test]
    fn multipolygon_rejected() {
        let path = tmp("mp.geojson");
        let v = json!({
            "type": "FeatureCollection",
            "properties": {"width": 1, "height": 1},
            "features": [{
                "type": "Feature",
                "properties": {"class": 0},
                "geometry": {"type": "MultiPolygon", "coordinates": []},
            }],
        });
        fs::write(&path, v.to_string()).unwrap();
        assert!(matches!(load_partition(&path), Err(PartitionError::MultiPolygon)));
    }

    #[test]
    fn unclosed_ring_rejected() {
        let path = tmp("uc.geojson");
        let v = json!({
            "type": "FeatureCollection",
            "properties": {"width": 1, "height": 1},
            "features": [{
                "type": "Feature",
                "properties": {"class": 0},
                "geometry": {"type": "Polygon", "coordinates":
                    [[[0.0,0.0],[1.0,0.0],[1.0,1.0],[0.0,1.0]]]},
            }],
        });
        fs::write(&path, v.to_string()).unwrap();
        assert!(matches!(load_partition(&path), Err(PartitionError::UnclosedRing(0))));
    }

    #[test]
    fn interior_point_unit_square() {
        let poly = square(0, 0.0, 0.0, 1.0);
        let p = interior_point(&poly).unwrap();
        assert!(poly.contains_strict(p));
    }

    #[test]
    fn interior_point_annulus() {
        let mut poly = square(0, 0.0, 0.0, 4.0);
        poly.holes.push(Ring(vec![
            Point::new(1.0, 1.0),
            Point::new(1.0, 3.0),
            Point::new(3.0, 3.0),
            Point::new(3.0, 1.0),
        ]));
        let p = interior_point(&poly).unwrap();
        // Point-in-polygon oracle: inside outer, outside the hole.
        assert!(poly.contains_strict(p));
        assert!(!crate::geom::point_in_ring(p, &poly.holes[0].0));
    }

    #[test]
    fn interior_point_zero_area_errors() {
        let poly = LabeledPolygon {
            class: 0,
            outer: Ring(vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(1.0, 0.0),
            ]),
            holes: vec![],
        };
        assert!(interior_point(&poly).is_err());
    }

    #[test]
    fn coordinates_exact_after_round_trip() {
        let mut poly = square(3, 0.0, 0.0, 7.0);
        poly.outer.0.push(Point::new(1.0 / 3.0, 7.0));
        let p = Partition { width: 7, height: 7, polygons: vec![poly] };
        let path = tmp("exact.geojson");
        write_partition(&p, &path).unwrap();
        let (q, _) = load_partition(&path).unwrap();
        for (a, b) in p.polygons[0].outer.0.iter().zip(&q.polygons[0].outer.0) {
            assert!((a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9);
        }
    }
}
