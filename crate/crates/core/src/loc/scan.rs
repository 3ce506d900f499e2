use super::segments::MapSegments;
use super::LocError;
use crate::geometry::{ray_circle_intersection, Point2D, Pose2D};
use crate::model::AreaGraph;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamLabel {
    Structure,
    Clutter,
    MaxRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    /// Sensor-frame angle in radians.
    pub angle: f64,
    pub range: f64,
    pub label: BeamLabel,
}

impl Beam {
    pub fn is_return(&self) -> bool {
        self.label != BeamLabel::MaxRange
    }

    /// Hit point in the sensor frame.
    pub fn point(&self) -> Point2D {
        Point2D::new(self.range * self.angle.cos(), self.range * self.angle.sin())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanFrame {
    pub timestamp: f64,
    pub beams: Vec<Beam>,
    pub max_range: f64,
    /// Pose the scan was synthesized from; test data only.
    pub truth: Option<Pose2D>,
}

impl ScanFrame {
    pub fn returns(&self) -> impl Iterator<Item = &Beam> {
        self.beams.iter().filter(|b| b.is_return())
    }
}

/// Circular obstacle that is not part of the map (a person, a bin).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClutterDisc {
    pub center: Point2D,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub beams: usize,
    pub max_range: f64,
    /// Gaussian range noise in meters.
    pub sigma: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            beams: 360,
            max_range: 30.0,
            sigma: 0.0,
        }
    }
}

/// Evenly spaced beam angles over (−π, π], strictly increasing.
pub fn beam_angles(n: usize) -> Vec<f64> {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    (0..n)
        .map(|i| -std::f64::consts::PI + step * (i + 1) as f64)
        .collect()
}

/// Ray-casts a planar scan from `pose` against the walls of its floor and
/// the clutter discs; the nearest hit wins.
pub fn simulate_scan(
    graph: &AreaGraph,
    pose: &Pose2D,
    spec: &ScanSpec,
    clutter: &[ClutterDisc],
    timestamp: f64,
    rng: &mut impl Rng,
) -> Result<ScanFrame, LocError> {
    graph
        .locate_leaf_id(pose.position(), &pose.level)
        .map_err(|_| LocError::PoseOutsideMap(pose.x, pose.y))?;
    let level = graph
        .levels()
        .contains(&pose.level)
        .then_some(pose.level.as_str());
    let walls = MapSegments::from_graph(graph, level);
    Ok(simulate_scan_on(
        &walls, pose, spec, clutter, timestamp, rng,
    ))
}

/// [`simulate_scan`] against prebuilt wall segments, without the
/// inside-the-map check.
pub fn simulate_scan_on(
    walls: &MapSegments,
    pose: &Pose2D,
    spec: &ScanSpec,
    clutter: &[ClutterDisc],
    timestamp: f64,
    rng: &mut impl Rng,
) -> ScanFrame {
    let origin = pose.position();
    let local = walls.near(origin, spec.max_range);
    let noise = (spec.sigma > 0.0).then(|| Normal::new(0.0, spec.sigma).expect("finite sigma"));
    let beams = beam_angles(spec.beams)
        .into_iter()
        .map(|angle| {
            let a = pose.theta + angle;
            let dir = Point2D::new(a.cos(), a.sin());
            let mut hit = local
                .raycast(origin, dir)
                .map(|(t, _)| (t, BeamLabel::Structure));
            for c in clutter {
                if let Some(t) = ray_circle_intersection(origin, dir, c.center, c.radius) {
                    if hit.is_none_or(|(ht, _)| t < ht) {
                        hit = Some((t, BeamLabel::Clutter));
                    }
                }
            }
            match hit {
                Some((t, label)) if t <= spec.max_range => {
                    let n = noise.as_ref().map_or(0.0, |d| d.sample(rng));
                    Beam {
                        angle,
                        range: (t + n).max(1e-3),
                        label,
                    }
                }
                _ => Beam {
                    angle,
                    range: spec.max_range,
                    label: BeamLabel::MaxRange,
                },
            }
        })
        .collect();
    ScanFrame {
        timestamp,
        beams,
        max_range: spec.max_range,
        truth: Some(pose.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point_segment_distance;
    use crate::loc::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    #[test]
    fn four_beams_in_square_room() {
        let g = fixtures::square_room(10.0).unwrap();
        let c = g.areas[0].polygon.centroid();
        let spec = ScanSpec {
            beams: 4,
            ..Default::default()
        };
        let scan = simulate_scan(
            &g,
            &Pose2D::new(c.x, c.y, 0.0, "1"),
            &spec,
            &[],
            0.0,
            &mut rng(),
        )
        .unwrap();
        for b in &scan.beams {
            // the builder snaps corners to 1e-7 degrees
            assert!((b.range - 5.0).abs() < 0.02, "{b:?}");
            assert_eq!(b.label, BeamLabel::Structure);
        }
        assert!(scan.beams.windows(2).all(|w| w[0].angle < w[1].angle));
    }

    #[test]
    fn clutter_occludes_wall() {
        let g = fixtures::square_room(10.0).unwrap();
        let pose = Pose2D::new(5.0, 5.0, 0.0, "1");
        let disc = ClutterDisc {
            center: Point2D::new(6.2, 5.0),
            radius: 0.2,
        };
        let spec = ScanSpec {
            beams: 4,
            ..Default::default()
        };
        let scan = simulate_scan(&g, &pose, &spec, &[disc], 0.0, &mut rng()).unwrap();
        let ahead = scan.beams.iter().find(|b| b.angle.abs() < 1e-12).unwrap();
        assert!((ahead.range - 1.0).abs() < 1e-9);
        assert_eq!(ahead.label, BeamLabel::Clutter);
    }

    #[test]
    fn noiseless_returns_lie_on_walls() {
        let g = fixtures::niche_corridor(40.0, 3.0).unwrap();
        let walls = MapSegments::from_graph(&g, Some("1"));
        let pose = Pose2D::new(12.3, 1.1, 0.4, "1");
        let scan = simulate_scan(&g, &pose, &ScanSpec::default(), &[], 0.0, &mut rng()).unwrap();
        let mut n = 0;
        for b in scan
            .beams
            .iter()
            .filter(|b| b.label == BeamLabel::Structure)
        {
            let p = pose.transform(b.point());
            let d = walls
                .segments
                .iter()
                .map(|s| point_segment_distance(p, s.a, s.b))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-9, "beam {b:?} is {d} m off the walls");
            n += 1;
        }
        assert!(n > 300);
    }

    #[test]
    fn outside_pose_is_rejected() {
        let g = fixtures::square_room(10.0).unwrap();
        let r = simulate_scan(
            &g,
            &Pose2D::new(15.0, 5.0, 0.0, "1"),
            &ScanSpec::default(),
            &[],
            0.0,
            &mut rng(),
        );
        assert_eq!(r, Err(LocError::PoseOutsideMap(15.0, 5.0)));
    }
}
