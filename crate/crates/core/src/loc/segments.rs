use crate::geometry::{point_segment_distance, ray_segment_intersection, Point2D};
use crate::model::AreaGraph;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Wall segment of a leaf-area boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSegment {
    pub a: Point2D,
    pub b: Point2D,
    pub area: String,
    /// Unit normal pointing into the owning area.
    pub normal: Point2D,
}

impl MapSegment {
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn direction(&self) -> Point2D {
        self.b.sub(self.a).scale(1.0 / self.length())
    }

    /// Signed distance along the inward normal.
    pub fn signed_distance(&self, p: Point2D) -> f64 {
        p.sub(self.a).dot(self.normal)
    }

    pub fn line_distance(&self, p: Point2D) -> f64 {
        self.signed_distance(p).abs()
    }

    /// Orientation of the supporting line in [0, π).
    pub fn orientation(&self) -> f64 {
        let d = self.b.sub(self.a);
        let o = d.y.atan2(d.x).rem_euclid(std::f64::consts::PI);
        // -0.0 and tiny negative angles land just below π
        if o > std::f64::consts::PI - 1e-9 {
            0.0
        } else {
            o
        }
    }
}

/// Permanent structure of one floor: the boundary edges of its leaf areas,
/// minus passage openings, with shared walls kept once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSegments {
    pub level: Option<String>,
    pub segments: Vec<MapSegment>,
}

const OPENING_TOL: f64 = 1e-3;

impl MapSegments {
    /// Walls of the leaf areas on `level` (all leaves when `None`).
    pub fn from_graph(graph: &AreaGraph, level: Option<&str>) -> Self {
        let passages: Vec<&[Point2D]> = graph
            .passages
            .iter()
            .map(|p| p.geometry.as_slice())
            .collect();
        let on_opening = |p: Point2D| {
            passages.iter().any(|pl| {
                pl.windows(2)
                    .any(|w| point_segment_distance(p, w[0], w[1]) <= OPENING_TOL)
            })
        };
        let key = |p: Point2D| ((p.x * 1e6).round() as i64, (p.y * 1e6).round() as i64);
        let mut seen = HashSet::new();
        let mut segments = Vec::new();
        for id in graph.leaf_ids() {
            let area = graph.area(id);
            if level.is_some() && area.level.as_deref() != level {
                continue;
            }
            let ccw = area.polygon.is_ccw();
            for (a, b) in area.polygon.edges() {
                let len = a.distance(b);
                if len < 1e-9 {
                    continue;
                }
                if on_opening(a) && on_opening(b) && on_opening(a.lerp(b, 0.5)) {
                    continue;
                }
                let (ka, kb) = (key(a), key(b));
                if !seen.insert(if ka <= kb { (ka, kb) } else { (kb, ka) }) {
                    continue;
                }
                let d = b.sub(a).scale(1.0 / len);
                let left = Point2D::new(-d.y, d.x);
                segments.push(MapSegment {
                    a,
                    b,
                    area: area.name.clone(),
                    normal: if ccw { left } else { left.scale(-1.0) },
                });
            }
        }
        Self {
            level: level.map(Into::into),
            segments,
        }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Segments that come within `radius` of `center`.
    pub fn near(&self, center: Point2D, radius: f64) -> LocalMap<'_> {
        let ids = self
            .segments
            .iter()
            .enumerate()
            .filter(|(_, s)| point_segment_distance(center, s.a, s.b) <= radius)
            .map(|(i, _)| i as u32)
            .collect();
        LocalMap { map: self, ids }
    }

    pub fn all(&self) -> LocalMap<'_> {
        LocalMap {
            map: self,
            ids: (0..self.segments.len() as u32).collect(),
        }
    }
}

/// A subset of the map's segments, for repeated queries around one pose.
pub struct LocalMap<'a> {
    pub map: &'a MapSegments,
    pub ids: Vec<u32>,
}

impl LocalMap<'_> {
    pub fn segment(&self, id: u32) -> &MapSegment {
        &self.map.segments[id as usize]
    }

    /// First wall hit along a unit-direction ray.
    pub fn raycast(&self, origin: Point2D, dir: Point2D) -> Option<(f64, u32)> {
        let mut best: Option<(f64, u32)> = None;
        for &i in &self.ids {
            let s = &self.map.segments[i as usize];
            if let Some(t) = ray_segment_intersection(origin, dir, s.a, s.b) {
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, i));
                }
            }
        }
        best
    }

    /// Segment nearest to `p` (point-to-segment distance) within `radius`.
    pub fn nearest(&self, p: Point2D, radius: f64) -> Option<(u32, f64)> {
        let mut best: Option<(u32, f64)> = None;
        for &i in &self.ids {
            let s = &self.map.segments[i as usize];
            let d = point_segment_distance(p, s.a, s.b);
            if d <= radius && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best
    }
}
