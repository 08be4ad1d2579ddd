//! 2-D primitives shared by every other module.
//!
//! All operations are generic over the scalar type through [`Scalar`];
//! the crate root exposes `f64` aliases which the rest of the pipeline
//! uses. Coordinates produced by the PSLG stage are integers or
//! half-integers, so the exact orientation fallback is cheap.

use num_traits::Float;

use crate::error::GeomError;

/// Scalar trait bound for all geometry: an IEEE float convertible to
/// `f64` for the exact orientation predicate.
pub trait Scalar: Float + Into<f64> + Copy + std::fmt::Debug + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A 2-D point in pixel-corner coordinates (origin top-left, x right,
/// y down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<F> {
    pub x: F,
    pub y: F,
}

impl<F: Scalar> Point<F> {
    pub fn new(x: F, y: F) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Self) -> F {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn dist_sq(self, other: Self) -> F {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// An open chain of ≥ 2 points with distinct consecutive vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<F> {
    pub points: Vec<Point<F>>,
}

impl<F: Scalar> Polyline<F> {
    pub fn new(points: Vec<Point<F>>) -> Result<Self, GeomError> {
        if points.len() < 2 {
            return Err(GeomError::TooFewPoints(points.len()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(GeomError::RepeatedPoint);
        }
        Ok(Polyline { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total Euclidean arc length.
    pub fn arc_length(&self) -> F {
        self.points
            .windows(2)
            .fold(F::zero(), |acc, w| acc + w[0].dist(w[1]))
    }
}

/// Orientation of the ordered triple (a, b, c).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Robust orientation test: sign of the cross product (b-a)×(c-a),
/// evaluated exactly (adaptive-precision predicate) so that near-collinear
/// lattice configurations are never misclassified.
pub fn orient2d<F: Scalar>(a: Point<F>, b: Point<F>, c: Point<F>) -> Orientation {
    let d = robust::orient2d(
        robust::Coord { x: a.x.into(), y: a.y.into() },
        robust::Coord { x: b.x.into(), y: b.y.into() },
        robust::Coord { x: c.x.into(), y: c.y.into() },
    );
    if d > 0.0 {
        Orientation::CounterClockwise
    } else if d < 0.0 {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

/// Exact collinearity test for the triple (a, b, c).
pub fn collinear<F: Scalar>(a: Point<F>, b: Point<F>, c: Point<F>) -> bool {
    orient2d(a, b, c) == Orientation::Collinear
}

/// Squared distance from `p` to the segment [a, b].
pub fn point_segment_dist_sq<F: Scalar>(p: Point<F>, a: Point<F>, b: Point<F>) -> F {
    let ab = Point::new(b.x - a.x, b.y - a.y);
    let ap = Point::new(p.x - a.x, p.y - a.y);
    let len_sq = ab.x * ab.x + ab.y * ab.y;
    if len_sq == F::zero() {
        return ap.x * ap.x + ap.y * ap.y;
    }
    let t = ((ap.x * ab.x + ap.y * ab.y) / len_sq)
        .max(F::zero())
        .min(F::one());
    let proj = Point::new(a.x + t * ab.x, a.y + t * ab.y);
    p.dist_sq(proj)
}

/// Distance from `p` to the segment [a, b].
pub fn point_segment_dist<F: Scalar>(p: Point<F>, a: Point<F>, b: Point<F>) -> F {
    point_segment_dist_sq(p, a, b).sqrt()
}

/// Minimal Euclidean distance from `p` to an open polyline.
pub fn point_to_polyline_distance<F: Scalar>(p: Point<F>, poly: &Polyline<F>) -> F {
    poly.points
        .windows(2)
        .map(|w| point_segment_dist_sq(p, w[0], w[1]))
        .fold(F::infinity(), F::min)
        .sqrt()
}

/// Minimal Euclidean distance from `p` to the boundary of a closed ring
/// given as a point cycle (closing segment implied).
pub fn point_to_ring_distance<F: Scalar>(p: Point<F>, ring: &[Point<F>]) -> Result<F, GeomError> {
    if ring.len() < 2 || ring.iter().all(|&q| q == ring[0]) {
        return Err(GeomError::DegenerateBoundary);
    }
    let mut best = F::infinity();
    let n = ring.len();
    for i in 0..n {
        let d = point_segment_dist_sq(p, ring[i], ring[(i + 1) % n]);
        best = best.min(d);
    }
    Ok(best.sqrt())
}

/// Douglas–Peucker simplification.
///
/// Endpoints are preserved and every removed point lies within `epsilon`
/// of the simplified chain. On distance ties the earlier index is kept,
/// so the result is deterministic.
pub fn douglas_peucker<F: Scalar>(line: &Polyline<F>, epsilon: F) -> Polyline<F> {
    let keep = douglas_peucker_indices(&line.points, epsilon);
    Polyline { points: keep.iter().map(|&i| line.points[i]).collect() }
}

/// Douglas–Peucker on a raw point slice, returning the kept indices
/// (always including both endpoints) in ascending order.
pub fn douglas_peucker_indices<F: Scalar>(pts: &[Point<F>], epsilon: F) -> Vec<usize> {
    assert!(epsilon >= F::zero(), "epsilon must be non-negative");
    assert!(pts.len() >= 2);
    let mut keep = vec![false; pts.len()];
    keep[0] = true;
    keep[pts.len() - 1] = true;
    dp_mark(pts, 0, pts.len() - 1, epsilon, &mut keep);
    keep.iter()
        .enumerate()
        .filter_map(|(i, &k)| k.then_some(i))
        .collect()
}

fn dp_mark<F: Scalar>(pts: &[Point<F>], lo: usize, hi: usize, eps: F, keep: &mut [bool]) {
    if hi <= lo + 1 {
        return;
    }
    let mut max_d = F::neg_infinity();
    let mut max_i = lo + 1;
    for i in lo + 1..hi {
        let d = point_segment_dist_sq(pts[i], pts[lo], pts[hi]);
        if d > max_d {
            max_d = d;
            max_i = i;
        }
    }
    if max_d.sqrt() > eps {
        keep[max_i] = true;
        dp_mark(pts, lo, max_i, eps, keep);
        dp_mark(pts, max_i, hi, eps, keep);
    }
}

/// Result of a segment–segment intersection query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegIntersection<F> {
    None,
    /// Proper or endpoint-touching intersection at a single point.
    Point(Point<F>),
    /// Collinear segments overlapping over a positive-length interval.
    Overlap,
}

/// Classify the intersection of segments [a1,a2] and [b1,b2] using exact
/// orientation predicates. When `adjacent` is set, a shared endpoint of
/// consecutive chain segments is reported as `None`.
pub fn segments_intersect<F: Scalar>(
    a1: Point<F>,
    a2: Point<F>,
    b1: Point<F>,
    b2: Point<F>,
    adjacent: bool,
) -> SegIntersection<F> {
    let o1 = orient2d(a1, a2, b1);
    let o2 = orient2d(a1, a2, b2);
    let o3 = orient2d(b1, b2, a1);
    let o4 = orient2d(b1, b2, a2);

    use Orientation::Collinear as Col;
    if o1 == Col && o2 == Col {
        // Collinear: project on the dominant axis and compare intervals.
        let horiz = (a2.x - a1.x).abs() >= (a2.y - a1.y).abs();
        let key = |p: Point<F>| if horiz { p.x } else { p.y };
        let (alo, ahi) = minmax(key(a1), key(a2));
        let (blo, bhi) = minmax(key(b1), key(b2));
        let lo = alo.max(blo);
        let hi = ahi.min(bhi);
        return if lo < hi {
            SegIntersection::Overlap
        } else if lo == hi {
            let shared = shared_endpoint(a1, a2, b1, b2);
            match shared {
                Some(p) if !adjacent => SegIntersection::Point(p),
                Some(_) => SegIntersection::None,
                None => SegIntersection::None,
            }
        } else {
            SegIntersection::None
        };
    }

    let straddle_a = o1 != o2 || o1 == Col || o2 == Col;
    let straddle_b = o3 != o4 || o3 == Col || o4 == Col;
    if !(straddle_a && straddle_b) {
        return SegIntersection::None;
    }
    // Endpoint-on-segment and shared-endpoint cases.
    if let Some(p) = shared_endpoint(a1, a2, b1, b2) {
        return if adjacent {
            SegIntersection::None
        } else {
            SegIntersection::Point(p)
        };
    }
    for (&p, (u, v)) in [(&b1, (a1, a2)), (&b2, (a1, a2)), (&a1, (b1, b2)), (&a2, (b1, b2))] {
        if collinear(u, v, p) && on_segment_interval(u, v, p) {
            return SegIntersection::Point(p);
        }
    }
    // Proper crossing: compute the intersection point in floating point.
    let d1 = Point::new(a2.x - a1.x, a2.y - a1.y);
    let d2 = Point::new(b2.x - b1.x, b2.y - b1.y);
    let denom = d1.x * d2.y - d1.y * d2.x;
    let t = ((b1.x - a1.x) * d2.y - (b1.y - a1.y) * d2.x) / denom;
    SegIntersection::Point(Point::new(a1.x + t * d1.x, a1.y + t * d1.y))
}

fn minmax<F: Scalar>(a: F, b: F) -> (F, F) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn shared_endpoint<F: Scalar>(
    a1: Point<F>,
    a2: Point<F>,
    b1: Point<F>,
    b2: Point<F>,
) -> Option<Point<F>> {
    for &p in &[a1, a2] {
        if p == b1 || p == b2 {
            return Some(p);
        }
    }
    None
}

/// Assumes p collinear with [u,v]; is p within the closed interval?
fn on_segment_interval<F: Scalar>(u: Point<F>, v: Point<F>, p: Point<F>) -> bool {
    let (xlo, xhi) = minmax(u.x, v.x);
    let (ylo, yhi) = minmax(u.y, v.y);
    p.x >= xlo && p.x <= xhi && p.y >= ylo && p.y <= yhi
}

/// Shoelace signed area of a point cycle (closing segment implied).
/// Outer rings are positive by convention in this crate.
pub fn signed_area<F: Scalar>(ring: &[Point<F>]) -> F {
    let n = ring.len();
    let two = F::one() + F::one();
    let mut acc = F::zero();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc = acc + (a.x * b.y - b.x * a.y);
    }
    acc / two
}

/// Even-odd point-in-polygon test for a single ring. Points exactly on
/// the boundary return `true`.
pub fn point_in_ring<F: Scalar>(p: Point<F>, ring: &[Point<F>]) -> bool {
    let n = ring.len();
    // Boundary first, exactly.
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if collinear(a, b, p) && on_segment_interval(a, b, p) {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let t = (p.y - a.y) / (b.y - a.y);
            let x = a.x + t * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// True if `p` is strictly inside `ring` (not on its boundary).
pub fn point_strictly_in_ring<F: Scalar>(p: Point<F>, ring: &[Point<F>]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if collinear(a, b, p) && on_segment_interval(a, b, p) {
            return false;
        }
    }
    point_in_ring(p, ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Point<f64>;

    fn pl(pts: &[(f64, f64)]) -> Polyline<f64> {
        Polyline::new(pts.iter().map(|&(x, y)| P::new(x, y)).collect()).unwrap()
    }

    fn unit_square() -> Vec<P> {
        vec![P::new(0.0, 0.0), P::new(1.0, 0.0), P::new(1.0, 1.0), P::new(0.0, 1.0)]
    }

    #[test]
    fn center_of_unit_square_distance() {
        let d = point_to_ring_distance(P::new(0.5, 0.5), &unit_square()).unwrap();
        assert_eq!(d, 0.5);
    }

    #[test]
    fn on_vertex_distance_is_zero() {
        let d = point_to_ring_distance(P::new(1.0, 1.0), &unit_square()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn outside_unit_square_distance() {
        // Dense boundary-sampling oracle at 1e-3 spacing.
        let ring = unit_square();
        let p = P::new(2.0, 0.0);
        let exact = point_to_ring_distance(p, &ring).unwrap();
        let mut best = f64::INFINITY;
        let n = ring.len();
        for i in 0..n {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            let len = a.dist(b);
            let steps = (len / 1e-3).ceil() as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                let q = P::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
                best = best.min(p.dist(q));
            }
        }
        assert!((exact - 1.0).abs() < 1e-12);
        assert!((exact - best).abs() < 1e-3);
    }

    #[test]
    fn degenerate_ring_errors() {
        let ring = vec![P::new(1.0, 1.0), P::new(1.0, 1.0), P::new(1.0, 1.0)];
        assert!(point_to_ring_distance(P::new(0.0, 0.0), &ring).is_err());
    }

    #[test]
    fn dp_collinear_removal() {
        let out = douglas_peucker(&pl(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (2.0, 1.0)]), 0.1);
        assert_eq!(out, pl(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0)]));
    }

    #[test]
    fn dp_within_tolerance_removed() {
        // Max deviation 0.5 <= eps, checked against the recursive reference.
        let input = pl(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.0)]);
        let out = douglas_peucker(&input, 1.0);
        assert_eq!(out, pl(&[(0.0, 0.0), (2.0, 0.0)]));
        assert_eq!(out, dp_reference(&input, 1.0));
    }

    #[test]
    fn dp_zero_epsilon_keeps_noisy_chain() {
        let input = pl(&[(0.0, 0.0), (1.0, 0.3), (2.0, -0.2), (3.0, 0.1), (4.0, 0.0)]);
        assert_eq!(douglas_peucker(&input, 0.0), input);
    }

    #[test]
    fn dp_two_point_input_unchanged() {
        let input = pl(&[(0.0, 0.0), (5.0, 5.0)]);
        assert_eq!(douglas_peucker(&input, 10.0), input);
    }

    /// Naive recursive reference used as the oracle for DP tests.
    pub(crate) fn dp_reference(line: &Polyline<f64>, eps: f64) -> Polyline<f64> {
        fn rec(pts: &[P], eps: f64, out: &mut Vec<P>) {
            let (lo, hi) = (0, pts.len() - 1);
            if hi <= lo + 1 {
                out.push(pts[lo]);
                return;
            }
            let mut max_d = f64::NEG_INFINITY;
            let mut max_i = lo + 1;
            for i in lo + 1..hi {
                let d = point_segment_dist(pts[i], pts[lo], pts[hi]);
                if d > max_d {
                    max_d = d;
                    max_i = i;
                }
            }
            if max_d > eps {
                rec(&pts[lo..=max_i], eps, out);
                out.pop();
                rec(&pts[max_i..=hi], eps, out);
            } else {
                out.push(pts[lo]);
            }
        }
        let mut out = Vec::new();
        rec(&line.points, eps, &mut out);
        out.push(*line.points.last().unwrap());
        Polyline { points: out }
    }

    #[test]
    fn segments_cross_at_point() {
        let r = segments_intersect(
            P::new(0.0, 0.0),
            P::new(2.0, 2.0),
            P::new(0.0, 2.0),
            P::new(2.0, 0.0),
            false,
        );
        assert_eq!(r, SegIntersection::Point(P::new(1.0, 1.0)));
    }

    #[test]
    fn segments_parallel_disjoint() {
        let r = segments_intersect(
            P::new(0.0, 0.0),
            P::new(2.0, 0.0),
            P::new(0.0, 1.0),
            P::new(2.0, 1.0),
            false,
        );
        assert_eq!(r, SegIntersection::None);
    }

    #[test]
    fn segments_collinear_overlap() {
        let r = segments_intersect(
            P::new(0.0, 0.0),
            P::new(2.0, 0.0),
            P::new(1.0, 0.0),
            P::new(3.0, 0.0),
            false,
        );
        assert_eq!(r, SegIntersection::Overlap);
    }

    #[test]
    fn adjacent_shared_endpoint_suppressed() {
        let r = segments_intersect(
            P::new(0.0, 0.0),
            P::new(1.0, 0.0),
            P::new(1.0, 0.0),
            P::new(1.0, 1.0),
            true,
        );
        assert_eq!(r, SegIntersection::None);
    }

    #[test]
    fn endpoint_in_segment_interior_detected() {
        let r = segments_intersect(
            P::new(0.0, 0.0),
            P::new(2.0, 0.0),
            P::new(1.0, 0.0),
            P::new(1.0, 1.0),
            false,
        );
        assert_eq!(r, SegIntersection::Point(P::new(1.0, 0.0)));
    }

    #[test]
    fn signed_area_reversal_negates() {
        let ring = unit_square();
        let mut rev = ring.clone();
        rev.reverse();
        assert_eq!(signed_area(&ring), -signed_area(&rev));
        assert_eq!(signed_area(&ring), 1.0);
    }

    #[test]
    fn point_in_ring_boundary_inclusive() {
        let ring = unit_square();
        assert!(point_in_ring(P::new(0.5, 0.5), &ring));
        assert!(point_in_ring(P::new(1.0, 0.5), &ring));
        assert!(!point_in_ring(P::new(1.5, 0.5), &ring));
        assert!(!point_strictly_in_ring(P::new(1.0, 0.5), &ring));
    }
}
