//! Deterministic SVG rendering of labeled partitions: per-class fills,
//! outlines, optional vertex markers, and an optional overlay that
//! shades overlaps red and gaps black.

use std::fmt::Write as _;
use std::panic::{catch_unwind, AssertUnwindSafe};

use geo::BooleanOps;

use crate::partition::{to_geo, Partition};

#[derive(Debug, Clone)]
pub struct SvgStyle {
    pub vertex_markers: bool,
    pub overlay: bool,
    /// Fill colors cycled by class index.
    pub palette: Vec<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            vertex_markers: false,
            overlay: true,
            palette: [
                "#8dd3c7", "#fdb462", "#bebada", "#fb8072", "#80b1d3", "#b3de69", "#fccde5",
                "#d9d9d9", "#bc80bd", "#ccebc5",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        }
    }
}

fn ring_path(out: &mut String, ring: &[crate::Point64]) {
    for (i, p) in ring.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(out, "{cmd}{} {} ", p.x, p.y);
    }
    out.push('Z');
}

fn poly_path(poly: &crate::partition::LabeledPolygon) -> String {
    let mut d = String::new();
    ring_path(&mut d, &poly.outer.0);
    for hole in &poly.holes {
        d.push(' ');
        ring_path(&mut d, &hole.0);
    }
    d
}

fn geo_path(mp: &geo::MultiPolygon<f64>) -> String {
    let mut d = String::new();
    for poly in mp {
        let mut ring: Vec<crate::Point64> = poly
            .exterior()
            .coords()
            .map(|c| crate::Point64::new(c.x, c.y))
            .collect();
        ring.pop();
        if ring.len() >= 3 {
            if !d.is_empty() {
                d.push(' ');
            }
            ring_path(&mut d, &ring);
        }
        for interior in poly.interiors() {
            let mut ring: Vec<crate::Point64> =
                interior.coords().map(|c| crate::Point64::new(c.x, c.y)).collect();
            ring.pop();
            if ring.len() >= 3 {
                d.push(' ');
                ring_path(&mut d, &ring);
            }
        }
    }
    d
}

/// Gap and overlap regions by exact overlay; None when the boolean ops
/// degenerate on the input.
fn overlay_regions(p: &Partition) -> Option<(geo::MultiPolygon<f64>, geo::MultiPolygon<f64>)> {
    catch_unwind(AssertUnwindSafe(|| {
        let (w, h) = (p.width as f64, p.height as f64);
        let domain: geo::MultiPolygon<f64> = geo::MultiPolygon(vec![geo::Rect::new(
            geo::coord! { x: 0.0, y: 0.0 },
            geo::coord! { x: w, y: h },
        )
        .to_polygon()]);
        let polys: Vec<geo::MultiPolygon<f64>> = p
            .polygons
            .iter()
            .map(|q| geo::MultiPolygon(vec![to_geo(q)]))
            .collect();
        let mut covered = geo::MultiPolygon::<f64>(vec![]);
        for q in &polys {
            covered = covered.union(q);
        }
        let gap = domain.difference(&covered);
        let mut overlap = geo::MultiPolygon::<f64>(vec![]);
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                let inter = polys[i].intersection(&polys[j]);
                if !inter.0.is_empty() {
                    overlap = overlap.union(&inter);
                }
            }
        }
        (gap, overlap)
    }))
    .ok()
}

fn geo_area(mp: &geo::MultiPolygon<f64>) -> f64 {
    use geo::Area;
    mp.unsigned_area()
}

/// Render the partition to a standalone SVG document. Output is a pure
/// function of the input, byte for byte.
pub fn render_svg(p: &Partition, style: &SvgStyle) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">",
        p.width, p.height, p.width, p.height
    );
    let _ = writeln!(s, "<g stroke=\"black\" stroke-width=\"0.15\" fill-rule=\"evenodd\">");
    for poly in &p.polygons {
        let fill = &style.palette[poly.class as usize % style.palette.len()];
        let _ = writeln!(s, "<path d=\"{}\" fill=\"{}\"/>", poly_path(poly), fill);
    }
    let _ = writeln!(s, "</g>");
    if style.overlay {
        if let Some((gap, overlap)) = overlay_regions(p) {
            if geo_area(&gap) > 1e-9 {
                let _ = writeln!(
                    s,
                    "<path d=\"{}\" fill=\"black\" fill-rule=\"evenodd\" stroke=\"none\"/>",
                    geo_path(&gap)
                );
            }
            if geo_area(&overlap) > 1e-9 {
                let _ = writeln!(
                    s,
                    "<path d=\"{}\" fill=\"red\" fill-rule=\"evenodd\" stroke=\"none\"/>",
                    geo_path(&overlap)
                );
            }
        }
    }
    if style.vertex_markers {
        let _ = writeln!(s, "<g fill=\"#1a1a1a\" stroke=\"none\">");
        for poly in &p.polygons {
            for v in poly.vertices() {
                let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"0.4\"/>", v.x, v.y);
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
