//! Planar primitives: points, lines, half-plane clipping, and membership.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A point in the plane. Unlike [`crate::State2D`] it is not confined to
/// the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Add for Point {
    type Output = Point;

    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

impl From<crate::State2D> for Point {
    fn from(s: crate::State2D) -> Self {
        Point::new(s.x, s.y)
    }
}

/// Line through `origin` with direction `dir` (not necessarily unit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub origin: Point,
    pub dir: Point,
}

impl Line {
    pub fn new(origin: Point, dir: Point) -> Self {
        Line { origin, dir }
    }

    pub fn with_slope(origin: Point, slope: f64) -> Self {
        Line::new(origin, Point::new(1.0, slope))
    }

    /// Signed, unnormalized side of `p`: positive on the left of `dir`.
    pub fn side(&self, p: Point) -> f64 {
        self.dir.cross(p - self.origin)
    }

    pub fn distance(&self, p: Point) -> f64 {
        self.side(p).abs() / self.dir.norm()
    }

    /// Unique intersection, or `None` when the lines are parallel to within
    /// a relative tolerance `tol` on the sine of the angle between them.
    pub fn intersect(&self, other: &Line, tol: f64) -> Option<Point> {
        let denom = self.dir.cross(other.dir);
        if denom.abs() <= tol * self.dir.norm() * other.dir.norm() {
            return None;
        }
        let t = other.dir.cross(self.origin - other.origin) / denom;
        Some(self.origin + self.dir.scale(t))
    }
}

/// Clips a polygon to the closed half-plane `{p : sign · line.side(p) >= 0}`
/// (Sutherland–Hodgman, one edge).
pub fn clip_half_plane(poly: &[Point], line: &Line, sign: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let sc = sign * line.side(cur);
        let sn = sign * line.side(next);
        if sc >= 0.0 {
            out.push(cur);
        }
        if (sc >= 0.0) != (sn >= 0.0) {
            let t = sc / (sc - sn);
            out.push(cur + (next - cur).scale(t));
        }
    }
    out
}

/// The unit square as a counter-clockwise polygon.
pub fn unit_square() -> Vec<Point> {
    vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ]
}

/// Clips any polygon to the unit square.
pub fn clip_to_unit_square(poly: &[Point]) -> Vec<Point> {
    let sq = unit_square();
    let mut out = poly.to_vec();
    for i in 0..4 {
        let edge = Line::new(sq[i], sq[(i + 1) % 4] - sq[i]);
        out = clip_half_plane(&out, &edge, 1.0);
        if out.is_empty() {
            break;
        }
    }
    // intersections computed on the square's edges can land a rounding
    // error outside it
    let out = out
        .into_iter()
        .map(|p| Point::new(p.x.clamp(0.0, 1.0), p.y.clamp(0.0, 1.0)))
        .collect();
    dedup_ring(out, 1e-12)
}

/// Removes consecutive (cyclically) coincident vertices.
pub fn dedup_ring(mut pts: Vec<Point>, tol: f64) -> Vec<Point> {
    pts.dedup_by(|a, b| a.dist(*b) <= tol);
    while pts.len() > 1 && pts[0].dist(pts[pts.len() - 1]) <= tol {
        pts.pop();
    }
    pts
}

/// Twice the signed area (positive for counter-clockwise rings).
pub fn signed_area2(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum()
}

pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let a2 = signed_area2(poly);
    if a2.abs() < 1e-300 {
        let s = poly.iter().fold(Point::new(0.0, 0.0), |acc, p| acc + *p);
        return s.scale(1.0 / n as f64);
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let c = p.cross(q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point::new(cx / (3.0 * a2), cy / (3.0 * a2))
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab.scale(t))
}

/// Distance from `p` to the boundary of a closed ring (or polyline for two
/// vertices).
pub fn boundary_distance(p: Point, poly: &[Point]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => p.dist(poly[0]),
        2 => segment_distance(p, poly[0], poly[1]),
        n => (0..n)
            .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Crossing-number point-in-polygon test with the boundary (within `tol`)
/// counted as inside. Works for non-convex simple rings.
pub fn contains(poly: &[Point], p: Point, tol: f64) -> bool {
    if boundary_distance(p, poly) <= tol {
        return true;
    }
    if poly.len() < 3 {
        return false;
    }
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_and_parallel() {
        let l1 = Line::with_slope(Point::new(0.0, 0.0), 1.0);
        let l2 = Line::with_slope(Point::new(1.0, 0.0), -1.0);
        let p = l1.intersect(&l2, 1e-12).unwrap();
        assert!((p.x - 0.5).abs() < 1e-15 && (p.y - 0.5).abs() < 1e-15);
        let l3 = Line::with_slope(Point::new(0.0, 1.0), 1.0);
        assert!(l1.intersect(&l3, 1e-12).is_none());
    }

    #[test]
    fn clip_square_by_diagonal() {
        let sq = unit_square();
        let diag = Line::new(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        let upper = clip_half_plane(&sq, &diag, 1.0);
        let area = signed_area2(&dedup_ring(upper, 1e-12)) / 2.0;
        assert!((area - 0.5).abs() < 1e-15);
    }

    #[test]
    fn membership_counts_boundary() {
        let sq = unit_square();
        assert!(contains(&sq, Point::new(0.5, 0.5), 0.0));
        assert!(contains(&sq, Point::new(1.0, 0.3), 1e-12));
        assert!(!contains(&sq, Point::new(1.1, 0.3), 1e-12));
        // non-convex L-shape
        let l = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(0.0, 2.0),
        ];
        assert!(contains(&l, Point::new(0.5, 1.5), 0.0));
        assert!(!contains(&l, Point::new(1.5, 1.5), 0.0));
    }

    #[test]
    fn centroid_of_square() {
        let c = centroid(&unit_square());
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!((boundary_distance(c, &unit_square()) - 0.5).abs() < 1e-15);
    }
}
