//! Planar primitives: points, hulls, convex clipping.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
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

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

pub fn mean(points: &[Point]) -> Point {
    let n = points.len().max(1) as f64;
    let s = points.iter().fold(Point::default(), |acc, &p| acc + p);
    s * (1.0 / n)
}

/// Shoelace area, positive for counter-clockwise order.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Convex hull by Andrew's monotone chain, counter-clockwise, without
/// collinear points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    convex_hull_indices(points).into_iter().map(|i| points[i]).collect()
}

/// Indices into `points` of its convex hull, counter-clockwise, without
/// collinear or repeated points.
pub fn convex_hull_indices(points: &[Point]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        let (p, q) = (points[a], points[b]);
        p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)).then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// True when `poly` is convex and counter-clockwise (collinear runs allowed).
pub fn is_convex_ccw(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return true;
    }
    let scale = poly.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let tol = 1e-12 * scale * scale;
    (0..n).all(|i| cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) >= -tol) && signed_area(poly) >= 0.0
}

/// Clips `subject` against the convex counter-clockwise polygon `clip`
/// (Sutherland–Hodgman).
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % n]);
        let input = std::mem::take(&mut out);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let cin = cross(a, b, cur) >= 0.0;
            let pin = cross(a, b, prev) >= 0.0;
            if cin {
                if !pin {
                    out.push(line_intersection(prev, cur, a, b));
                }
                out.push(cur);
            } else if pin {
                out.push(line_intersection(prev, cur, a, b));
            }
        }
    }
    out
}

fn line_intersection(p: Point, q: Point, a: Point, b: Point) -> Point {
    let cp = cross(a, b, p);
    let cq = cross(a, b, q);
    let t = cp / (cp - cq);
    p + (q - p) * t
}

/// Area of the intersection of two convex counter-clockwise polygons.
pub fn intersection_area(p: &[Point], q: &[Point]) -> Result<f64> {
    if !is_convex_ccw(p) || !is_convex_ccw(q) {
        return Err(Error::NonConvex);
    }
    if p.len() < 3 || q.len() < 3 {
        return Ok(0.0);
    }
    Ok(signed_area(&clip_convex(p, q)).max(0.0))
}

/// Regular `n`-gon of circumradius `r` around `c`, counter-clockwise.
pub fn regular_polygon(c: Point, r: f64, n: usize, phase: f64) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let a = phase + 2.0 * PI * i as f64 / n as f64;
            c + Point::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Segment `a`–`b` thickened by `half_width` with semicircular caps, each
/// cap sampled with `per_cap` points.
pub fn stadium(a: Point, b: Point, half_width: f64, per_cap: usize) -> Vec<Point> {
    let d = b - a;
    let base = if d.norm() > 0.0 { d.y.atan2(d.x) } else { 0.0 };
    let mut out = Vec::with_capacity(2 * per_cap);
    let steps = (per_cap.max(2) - 1) as f64;
    for (center, start) in [(b, base - PI / 2.0), (a, base + PI / 2.0)] {
        for i in 0..per_cap.max(2) {
            let t = start + PI * i as f64 / steps;
            out.push(center + Point::new(half_width * t.cos(), half_width * t.sin()));
        }
    }
    out
}
