//! Planar geometry shared by every layer: points, poses, polygons and segments.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point in the local Cartesian frame, meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Point2D) -> Point2D {
        Point2D::new(self.x - other.x, self.y - other.y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Point2D) -> Point2D {
        Point2D::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point2D {
        Point2D::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point2D) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2D) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn lerp(self, other: Point2D, t: f64) -> Point2D {
        Point2D::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Robot pose on a floor. `theta` is kept in (-pi, pi].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub level: String,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64, level: impl Into<String>) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
            level: level.into(),
        }
    }

    pub fn position(&self) -> Point2D {
        Point2D::new(self.x, self.y)
    }

    /// Maps a point from the pose's body frame into the world frame.
    pub fn transform(&self, p: Point2D) -> Point2D {
        let (s, c) = self.theta.sin_cos();
        Point2D::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    if !a.is_finite() {
        return a;
    }
    let mut r = a % (2.0 * PI);
    if r <= -PI {
        r += 2.0 * PI;
    } else if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Shortest signed angular difference `b - a`.
pub fn angle_diff(b: f64, a: f64) -> f64 {
    normalize_angle(b - a)
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: Point2D,
    pub max: Point2D,
}

impl Bounds {
    pub fn empty() -> Self {
        Self {
            min: Point2D::new(f64::INFINITY, f64::INFINITY),
            max: Point2D::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point2D>) -> Self {
        let mut b = Self::empty();
        for p in pts {
            b.include(*p);
        }
        b
    }

    pub fn include(&mut self, p: Point2D) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, other: &Bounds) -> Bounds {
        let mut b = *self;
        b.include(other.min);
        b.include(other.max);
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y
    }

    pub fn intersects(&self, other: &Bounds) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn contains(&self, p: Point2D) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn expanded(&self, d: f64) -> Bounds {
        Bounds {
            min: Point2D::new(self.min.x - d, self.min.y - d),
            max: Point2D::new(self.max.x + d, self.max.y + d),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2D {
        self.min.lerp(self.max, 0.5)
    }
}

/// Closed polygon stored without the repeated closing vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point2D>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2D>) -> Self {
        Self { vertices }
    }

    /// Shoelace area; positive for counter-clockwise winding.
    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut acc = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            acc += a.cross(b);
        }
        acc * 0.5
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::from_points(&self.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2D, Point2D)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Even-odd ray casting test. Points exactly on the boundary may land on
    /// either side; use [`Polygon::boundary_distance`] when that matters.
    pub fn contains(&self, p: Point2D) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let vi = self.vertices[i];
            let vj = self.vertices[j];
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = vj.x + (p.y - vj.y) * (vi.x - vj.x) / (vi.y - vj.y);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point2D) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self) -> Point2D {
        let n = self.vertices.len();
        let a = self.signed_area();
        if a.abs() < 1e-12 {
            let s = self
                .vertices
                .iter()
                .fold(Point2D::default(), |acc, v| acc.add(*v));
            return s.scale(1.0 / n as f64);
        }
        let mut cx = 0.0;
        let mut cy = 0.0;
        for (p, q) in self.edges() {
            let f = p.cross(q);
            cx += (p.x + q.x) * f;
            cy += (p.y + q.y) * f;
        }
        Point2D::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    /// A point guaranteed to be strictly inside (for simple polygons with
    /// non-zero area). Uses the centroid when it is interior, otherwise the
    /// midpoint of the widest horizontal interior span through the bbox middle.
    pub fn interior_point(&self) -> Point2D {
        let c = self.centroid();
        if self.contains(c) && self.boundary_distance(c) > 1e-6 {
            return c;
        }
        let b = self.bounds();
        for k in 1..16 {
            let y = b.min.y + b.height() * (k as f64) / 16.0;
            let mut xs: Vec<f64> = Vec::new();
            for (p, q) in self.edges() {
                if (p.y > y) != (q.y > y) {
                    xs.push(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
                }
            }
            xs.sort_by(f64::total_cmp);
            let mut best: Option<(f64, f64)> = None;
            for w in xs.chunks(2) {
                if w.len() == 2 {
                    let span = w[1] - w[0];
                    if best.is_none_or(|(s, _)| span > s) {
                        best = Some((span, 0.5 * (w[0] + w[1])));
                    }
                }
            }
            if let Some((span, x)) = best {
                if span > 1e-9 {
                    return Point2D::new(x, y);
                }
            }
        }
        c
    }
}

pub fn point_segment_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    p.distance(closest_point_on_segment(p, a, b))
}

pub fn closest_point_on_segment(p: Point2D, a: Point2D, b: Point2D) -> Point2D {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    a.lerp(b, t)
}

/// Signed distance of `p` from the infinite line through `a`,`b`; positive on
/// the left of the direction a→b.
pub fn signed_line_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    let ab = b.sub(a);
    let len = ab.norm();
    if len == 0.0 {
        return p.distance(a);
    }
    ab.cross(p.sub(a)) / len
}

/// Ray-segment intersection: returns the ray parameter `t >= 0` (distance when
/// `dir` is a unit vector) at which the ray from `origin` hits segment a–b.
pub fn ray_segment_intersection(
    origin: Point2D,
    dir: Point2D,
    a: Point2D,
    b: Point2D,
) -> Option<f64> {
    let e = b.sub(a);
    let denom = dir.cross(e);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = a.sub(origin);
    let t = w.cross(e) / denom;
    let u = w.cross(dir) / denom;
    if t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
        Some(t)
    } else {
        None
    }
}

/// Ray-circle intersection: nearest non-negative ray parameter.
pub fn ray_circle_intersection(origin: Point2D, dir: Point2D, c: Point2D, r: f64) -> Option<f64> {
    let oc = origin.sub(c);
    let b = oc.dot(dir);
    let cc = oc.dot(oc) - r * r;
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = -b - sq;
    let t1 = -b + sq;
    if t0 >= 0.0 {
        Some(t0)
    } else if t1 >= 0.0 {
        Some(t1)
    } else {
        None
    }
}

/// Total length of a polyline.
pub fn polyline_length(pts: &[Point2D]) -> f64 {
    pts.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Point at half the total arclength of a polyline.
pub fn polyline_midpoint(pts: &[Point2D]) -> Point2D {
    match pts.len() {
        0 => Point2D::default(),
        1 => pts[0],
        _ => {
            let half = polyline_length(pts) * 0.5;
            let mut acc = 0.0;
            for w in pts.windows(2) {
                let d = w[0].distance(w[1]);
                if acc + d >= half && d > 0.0 {
                    return w[0].lerp(w[1], (half - acc) / d);
                }
                acc += d;
            }
            *pts.last().unwrap()
        }
    }
}

/// Clips segment p→q against an axis-aligned rectangle (Liang–Barsky).
/// Returns the parameter interval `[t0, t1]` of the segment inside the box.
pub fn clip_segment(p: Point2D, q: Point2D, b: &Bounds) -> Option<(f64, f64)> {
    let d = q.sub(p);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let checks = [
        (-d.x, p.x - b.min.x),
        (d.x, b.max.x - p.x),
        (-d.y, p.y - b.min.y),
        (d.y, b.max.y - p.y),
    ];
    for (pk, qk) in checks {
        if pk == 0.0 {
            if qk < 0.0 {
                return None;
            }
        } else {
            let r = qk / pk;
            if pk < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polygon {
        Polygon::new(vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(10.0, 0.0),
            Point2D::new(10.0, 10.0),
            Point2D::new(0.0, 10.0),
        ])
    }

    #[test]
    fn square_area_and_winding() {
        let p = square();
        assert_eq!(p.signed_area(), 100.0);
        assert!(p.is_ccw());
        assert_eq!(p.centroid(), Point2D::new(5.0, 5.0));
    }

    #[test]
    fn ray_cast_contains() {
        let p = square();
        assert!(p.contains(Point2D::new(5.0, 5.0)));
        assert!(!p.contains(Point2D::new(-0.1, 5.0)));
        assert!(!p.contains(Point2D::new(5.0, 10.5)));
    }

    #[test]
    fn interior_point_of_l_shape() {
        let l = Polygon::new(vec![
            Point2D::new(0.0, 0.0),
            Point2D::new(10.0, 0.0),
            Point2D::new(10.0, 1.0),
            Point2D::new(1.0, 1.0),
            Point2D::new(1.0, 10.0),
            Point2D::new(0.0, 10.0),
        ]);
        let ip = l.interior_point();
        assert!(l.contains(ip));
    }

    #[test]
    fn normalize_wraps_into_half_open_interval() {
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(-PI) - PI).abs() < 1e-12);
        assert!((normalize_angle(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ray_hits_wall() {
        let t = ray_segment_intersection(
            Point2D::new(5.0, 5.0),
            Point2D::new(1.0, 0.0),
            Point2D::new(10.0, 0.0),
            Point2D::new(10.0, 10.0),
        );
        assert_eq!(t, Some(5.0));
    }

    #[test]
    fn polyline_mid_is_arclength_half() {
        let pts = [
            Point2D::new(0.0, 0.0),
            Point2D::new(1.0, 0.0),
            Point2D::new(1.0, 3.0),
        ];
        assert_eq!(polyline_midpoint(&pts), Point2D::new(1.0, 1.0));
    }

    #[test]
    fn liang_barsky_clip() {
        let b = Bounds {
            min: Point2D::new(0.0, 0.0),
            max: Point2D::new(10.0, 10.0),
        };
        let (t0, t1) = clip_segment(Point2D::new(5.0, 5.0), Point2D::new(25.0, 5.0), &b).unwrap();
        assert_eq!(t0, 0.0);
        assert!((t1 - 0.25).abs() < 1e-12);
    }
}
