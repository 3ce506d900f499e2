use super::scan::ScanFrame;
use super::segments::{LocalMap, MapSegments};
use super::{corridor_direction_factor, gate, robust_weight, LocError, TrackerConfig, WeightMode};
use crate::geometry::{angle_diff, Point2D, Pose2D};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Between the sensor and the matched wall.
    Inside,
    /// Behind the matched wall.
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub beam: usize,
    /// World point under the current pose estimate.
    pub point: Point2D,
    /// Unit beam direction in the world frame.
    pub direction: Point2D,
    pub segment: Option<u32>,
    /// Matched wall normal, oriented toward the sensor.
    pub normal: Point2D,
    /// Perpendicular distance to the matched wall line.
    pub residual: f64,
    /// Distance to the matched wall segment, used by the gate.
    pub wall_distance: f64,
    /// Measured range minus the map's expected range along the beam.
    pub ray_error: f64,
    pub side: Side,
    pub retained: bool,
    pub robust_weight: f64,
    pub direction_factor: f64,
    /// Weight used by the solver under the configured mode.
    pub weight: f64,
}

/// Matches every return to its nearest wall and applies the clutter gate.
/// Unmatched returns are kept in the list but never retained.
pub fn clutter_filter(
    scan: &ScanFrame,
    map: &LocalMap<'_>,
    pose: &Pose2D,
    cfg: &TrackerConfig,
) -> Vec<Correspondence> {
    let origin = pose.position();
    let radius = cfg.match_radius();
    let mut out = Vec::with_capacity(scan.beams.len());
    for (i, beam) in scan.beams.iter().enumerate() {
        if !beam.is_return() {
            continue;
        }
        let a = pose.theta + beam.angle;
        let dir = Point2D::new(a.cos(), a.sin());
        let point = origin.add(dir.scale(beam.range));
        let d_map = map.raycast(origin, dir).map_or(f64::INFINITY, |(t, _)| t);
        let ray_error = beam.range - d_map;
        let mut c = Correspondence {
            beam: i,
            point,
            direction: dir,
            segment: None,
            normal: Point2D::default(),
            residual: f64::INFINITY,
            wall_distance: f64::INFINITY,
            ray_error,
            side: if ray_error > 0.0 {
                Side::Outside
            } else {
                Side::Inside
            },
            retained: false,
            robust_weight: 0.0,
            direction_factor: 0.0,
            weight: 0.0,
        };
        if let Some((sid, dist)) = map.nearest(point, radius) {
            let seg = map.segment(sid);
            let toward = if origin.sub(seg.a).dot(seg.normal) >= 0.0 {
                1.0
            } else {
                -1.0
            };
            let n = seg.normal.scale(toward);
            let signed = point.sub(seg.a).dot(n);
            c.segment = Some(sid);
            c.normal = n;
            c.residual = signed.abs();
            c.wall_distance = dist;
            c.side = if signed >= 0.0 {
                Side::Inside
            } else {
                Side::Outside
            };
            // gate on the distance to the wall piece itself, so points that
            // merely line up with a short niche wall are not accepted
            c.retained = gate(ray_error, c.wall_distance, cfg);
            if c.retained {
                c.robust_weight = robust_weight(c.residual, c.side, cfg);
                c.direction_factor = corridor_direction_factor(n, dir);
                c.weight = match cfg.weighting {
                    WeightMode::Off => 1.0,
                    WeightMode::RobustOnly => c.robust_weight,
                    WeightMode::RobustTimesCorridor => c.robust_weight * c.direction_factor,
                };
            }
        }
        out.push(c);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorridorStats {
    /// Center of the dominant orientation bin, in [0, π).
    pub dominant_orientation: f64,
    /// Share of retained points in the dominant bin.
    pub dominance: f64,
    pub axial: usize,
    pub cross: usize,
    /// Per correspondence: dropped by axial downsampling.
    pub drop: Vec<bool>,
}

/// Orientation histogram of the matched walls. When one direction holds
/// more than `corridor_dominance` of the retained points, its points are
/// thinned to `axial_cap`; all other points are kept.
pub fn corridorness(
    corrs: &[Correspondence],
    map: &MapSegments,
    cfg: &TrackerConfig,
) -> CorridorStats {
    let bins = cfg.corridor_bins.max(1);
    let width = std::f64::consts::PI / bins as f64;
    let bin_of = |c: &Correspondence| -> Option<usize> {
        let s = &map.segments[c.segment? as usize];
        Some(((s.orientation() / width) as usize).min(bins - 1))
    };
    let mut hist = vec![0usize; bins];
    let mut total = 0;
    for c in corrs.iter().filter(|c| c.retained) {
        if let Some(b) = bin_of(c) {
            hist[b] += 1;
            total += 1;
        }
    }
    let (top, &count) = hist
        .iter()
        .enumerate()
        .max_by_key(|(i, c)| (**c, std::cmp::Reverse(*i)))
        .unwrap_or((0, &0));
    let dominance = if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    };
    let mut drop = vec![false; corrs.len()];
    if total > 0 && dominance > cfg.corridor_dominance && count > cfg.axial_cap {
        let axial: Vec<usize> = corrs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.retained && bin_of(c) == Some(top))
            .map(|(i, _)| i)
            .collect();
        // keep an evenly spread subset of `axial_cap` points
        let n = axial.len();
        let mut kept = vec![false; n];
        for k in 0..cfg.axial_cap {
            kept[k * n / cfg.axial_cap] = true;
        }
        for (j, &i) in axial.iter().enumerate() {
            drop[i] = !kept[j];
        }
    }
    CorridorStats {
        dominant_orientation: (top as f64 + 0.5) * width,
        dominance,
        axial: count,
        cross: total - count,
        drop,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub translation_step: f64,
    pub rotation_step: f64,
    /// The raw solve exceeded a step limit and was scaled down.
    pub clamped: bool,
    pub retained: usize,
    pub used: usize,
    pub mean_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcpResult {
    pub pose: Pose2D,
    /// Confidence in [0, 1].
    pub score: f64,
    pub valid_ratio: f64,
    pub mean_residual: f64,
    pub weight_variance: f64,
    pub converged: bool,
    pub iterations: Vec<IterationReport>,
    pub dominance: f64,
}

/// Weighted point-to-line cost `Σ w (n·(T p − a))²` of fixed
/// correspondences under `pose`.
pub fn point_to_line_objective(
    scan: &ScanFrame,
    corrs: &[Correspondence],
    map: &MapSegments,
    pose: &Pose2D,
) -> f64 {
    corrs
        .iter()
        .filter(|c| c.retained && c.weight > 0.0)
        .map(|c| {
            let seg = &map.segments[c.segment.expect("retained points are matched") as usize];
            let p = pose.transform(scan.beams[c.beam].point());
            let r = p.sub(seg.a).dot(c.normal);
            c.weight * r * r
        })
        .sum()
}

fn summary(corrs: &[Correspondence], returns: usize) -> (f64, f64, f64) {
    let kept: Vec<&Correspondence> = corrs.iter().filter(|c| c.retained).collect();
    if kept.is_empty() || returns == 0 {
        return (0.0, f64::INFINITY, 0.0);
    }
    let n = kept.len() as f64;
    let valid = n / returns as f64;
    let mean_res = kept.iter().map(|c| c.residual).sum::<f64>() / n;
    let mean_w = kept.iter().map(|c| c.robust_weight).sum::<f64>() / n;
    let var = kept
        .iter()
        .map(|c| (c.robust_weight - mean_w).powi(2))
        .sum::<f64>()
        / n;
    (valid, mean_res, var)
}

/// Confidence from the valid-correspondence ratio, the mean residual and
/// the spread of the robust weights.
pub(crate) fn confidence(
    valid: f64,
    mean_residual: f64,
    weight_variance: f64,
    cfg: &TrackerConfig,
) -> f64 {
    valid.clamp(0.0, 1.0)
        * (-mean_residual / cfg.tau_in).exp().clamp(0.0, 1.0)
        * (1.0 - weight_variance).clamp(0.0, 1.0)
}

/// Point-to-line ICP from `prior`: re-associate, gate, weight, solve a
/// damped Gauss-Newton step, clamp it, repeat. Fails if too few points
/// survive the gate or the result jumps too far from the prior.
pub fn icp_track(
    scan: &ScanFrame,
    map: &MapSegments,
    prior: &Pose2D,
    cfg: &TrackerConfig,
) -> Result<IcpResult, LocError> {
    let returns = scan.returns().count();
    let reach =
        scan.max_range + cfg.match_radius() + cfg.max_step_translation * cfg.max_iterations as f64;
    let local = map.near(prior.position(), reach);
    let mut pose = prior.clone();
    let mut iterations = Vec::new();
    let mut converged = false;
    let mut dominance = 0.0;

    for _ in 0..cfg.max_iterations {
        let corrs = clutter_filter(scan, &local, &pose, cfg);
        let stats = corridorness(&corrs, map, cfg);
        dominance = stats.dominance;
        let mut h = Matrix3::<f64>::zeros();
        let mut g = Vector3::<f64>::zeros();
        let mut used = 0;
        let mut retained = 0;
        let mut res_sum = 0.0;
        let origin = pose.position();
        for (i, c) in corrs.iter().enumerate() {
            if !c.retained {
                continue;
            }
            retained += 1;
            res_sum += c.residual;
            if c.weight <= 0.0 || (cfg.corridor_downsample && stats.drop[i]) {
                continue;
            }
            used += 1;
            let seg = &map.segments[c.segment.expect("retained points are matched") as usize];
            let r = c.point.sub(seg.a).dot(c.normal);
            let q = c.point.sub(origin);
            let j = Vector3::new(c.normal.x, c.normal.y, c.normal.x * -q.y + c.normal.y * q.x);
            h += j * j.transpose() * c.weight;
            g += j * (c.weight * r);
        }
        if used < cfg.min_correspondences {
            return Err(LocError::TooFewCorrespondences(used));
        }
        let lt = cfg.damping * 0.5 * (h[(0, 0)] + h[(1, 1)]);
        let lr = cfg.damping * h[(2, 2)];
        let damped = h + Matrix3::from_diagonal(&Vector3::new(lt, lt, lr));
        let Some(delta) = damped.lu().solve(&(-g)) else {
            return Err(LocError::TooFewCorrespondences(used));
        };
        let (mut dx, mut dy, mut dth) = (delta[0], delta[1], delta[2]);
        let t = dx.hypot(dy);
        let mut clamped = false;
        if t > cfg.max_step_translation {
            let k = cfg.max_step_translation / t;
            dx *= k;
            dy *= k;
            clamped = true;
        }
        if dth.abs() > cfg.max_step_rotation {
            dth = dth.signum() * cfg.max_step_rotation;
            clamped = true;
        }
        // rotate about the sensor origin, then translate
        pose = Pose2D::new(
            pose.x + dx,
            pose.y + dy,
            pose.theta + dth,
            pose.level.clone(),
        );
        iterations.push(IterationReport {
            translation_step: dx.hypot(dy),
            rotation_step: dth.abs(),
            clamped,
            retained,
            used,
            mean_residual: if retained > 0 {
                res_sum / retained as f64
            } else {
                f64::INFINITY
            },
        });
        if dx.hypot(dy) < cfg.convergence_eps && dth.abs() < cfg.convergence_eps {
            converged = true;
            break;
        }
    }

    let translation = pose.position().distance(prior.position());
    let rotation = angle_diff(pose.theta, prior.theta).abs();
    if translation > cfg.jump_translation || rotation > cfg.jump_rotation {
        return Err(LocError::Diverged {
            translation,
            rotation,
        });
    }
    let corrs = clutter_filter(scan, &local, &pose, cfg);
    let (valid_ratio, mean_residual, weight_variance) = summary(&corrs, returns);
    Ok(IcpResult {
        score: confidence(valid_ratio, mean_residual, weight_variance, cfg),
        pose,
        valid_ratio,
        mean_residual,
        weight_variance,
        converged,
        iterations,
        dominance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loc::fixtures;
    use crate::loc::scan::{simulate_scan_on, BeamLabel, ClutterDisc, ScanSpec};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn square() -> MapSegments {
        MapSegments::from_graph(&fixtures::square_room(10.0).unwrap(), Some("1"))
    }

    fn corridor() -> MapSegments {
        MapSegments::from_graph(&fixtures::niche_corridor(40.0, 3.0).unwrap(), Some("1"))
    }

    fn scan(
        walls: &MapSegments,
        pose: &Pose2D,
        sigma: f64,
        clutter: &[ClutterDisc],
        seed: u64,
    ) -> ScanFrame {
        let spec = ScanSpec {
            sigma,
            ..Default::default()
        };
        simulate_scan_on(
            walls,
            pose,
            &spec,
            clutter,
            0.0,
            &mut ChaCha8Rng::seed_from_u64(seed),
        )
    }

    #[test]
    fn fixed_point_at_truth() {
        let walls = square();
        let truth = Pose2D::new(4.0, 6.0, 0.3, "1");
        let s = scan(&walls, &truth, 0.0, &[], 0);
        let r = icp_track(&s, &walls, &truth, &TrackerConfig::default()).unwrap();
        assert!(r.iterations.len() <= 2, "{:?}", r.iterations);
        let last = r.iterations.last().unwrap();
        assert!(last.translation_step < 1e-6 && last.rotation_step < 1e-6);
        assert!(r.converged);
        assert!(r.score > 0.99);
    }

    #[test]
    fn lateral_offset_recovered() {
        let walls = square();
        let truth = Pose2D::new(5.0, 5.0, 0.0, "1");
        let s = scan(&walls, &truth, 0.0, &[], 0);
        let prior = Pose2D::new(5.0, 5.3, 0.0, "1");
        let r = icp_track(&s, &walls, &prior, &TrackerConfig::default()).unwrap();
        assert!(
            r.pose.position().distance(truth.position()) < 1e-3,
            "{:?}",
            r.pose
        );
    }

    #[test]
    fn increments_respect_clamp() {
        let walls = square();
        let truth = Pose2D::new(5.0, 5.0, 0.0, "1");
        let s = scan(&walls, &truth, 0.0, &[], 0);
        let cfg = TrackerConfig {
            max_step_translation: 0.2,
            damping: 0.0,
            max_iterations: 40,
            jump_translation: 100.0,
            ..TrackerConfig::default()
        };
        let prior = Pose2D::new(5.6, 4.4, 0.1, "1");
        let r = icp_track(&s, &walls, &prior, &cfg).unwrap();
        assert!(r.iterations.iter().any(|i| i.clamped), "{:?}", r.iterations);
        assert!(r.pose.position().distance(truth.position()) < 1e-3);
        for it in &r.iterations {
            assert!(it.translation_step <= 0.2 + 1e-12);
            assert!(it.rotation_step <= cfg.max_step_rotation + 1e-12);
        }
    }

    #[test]
    fn jump_guard_fires() {
        let walls = corridor();
        let truth = Pose2D::new(20.0, 1.5, 0.0, "1");
        let s = scan(&walls, &truth, 0.0, &[], 0);
        let cfg = TrackerConfig {
            jump_translation: 0.1,
            ..TrackerConfig::default()
        };
        let prior = Pose2D::new(20.4, 1.5, 0.0, "1");
        assert!(matches!(
            icp_track(&s, &walls, &prior, &cfg),
            Err(LocError::Diverged { .. })
        ));
    }

    #[test]
    fn empty_scan_has_too_few_points() {
        let walls = square();
        let mut s = scan(&walls, &Pose2D::new(5.0, 5.0, 0.0, "1"), 0.0, &[], 0);
        s.beams.truncate(3);
        assert!(matches!(
            icp_track(
                &s,
                &walls,
                &Pose2D::new(5.0, 5.0, 0.0, "1"),
                &TrackerConfig::default()
            ),
            Err(LocError::TooFewCorrespondences(3))
        ));
    }

    #[test]
    fn gradient_vanishes_at_solution() {
        let walls = square();
        let truth = Pose2D::new(3.0, 6.5, -0.4, "1");
        let s = scan(&walls, &truth, 0.0, &[], 0);
        let prior = Pose2D::new(3.05, 6.45, -0.37, "1");
        let cfg = TrackerConfig {
            max_iterations: 60,
            convergence_eps: 1e-12,
            ..TrackerConfig::default()
        };
        let r = icp_track(&s, &walls, &prior, &cfg).unwrap();
        let corrs = clutter_filter(&s, &walls.all(), &r.pose, &cfg);
        let h = 1e-6;
        let f = |dx: f64, dy: f64, dt: f64| {
            let p = Pose2D::new(r.pose.x + dx, r.pose.y + dy, r.pose.theta + dt, "1");
            point_to_line_objective(&s, &corrs, &walls, &p)
        };
        let grad = [
            (f(h, 0.0, 0.0) - f(-h, 0.0, 0.0)) / (2.0 * h),
            (f(0.0, h, 0.0) - f(0.0, -h, 0.0)) / (2.0 * h),
            (f(0.0, 0.0, h) - f(0.0, 0.0, -h)) / (2.0 * h),
        ];
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        assert!(norm < 1e-6, "gradient {grad:?}");
    }

    #[test]
    fn clutter_in_front_of_wall_is_rejected() {
        let walls = square();
        let pose = Pose2D::new(5.0, 5.0, 0.0, "1");
        // wall 5 m ahead, disc surface 2 m ahead
        let disc = ClutterDisc {
            center: Point2D::new(7.1, 5.0),
            radius: 0.1,
        };
        let s = scan(&walls, &pose, 0.0, &[disc], 0);
        let corrs = clutter_filter(&s, &walls.all(), &pose, &TrackerConfig::default());
        let ahead = corrs
            .iter()
            .find(|c| s.beams[c.beam].angle.abs() < 1e-9)
            .unwrap();
        assert_eq!(s.beams[ahead.beam].label, BeamLabel::Clutter);
        assert!((ahead.ray_error + 3.0).abs() < 0.02);
        assert!(!ahead.retained);
        assert_eq!(ahead.weight, 0.0);
        let exact = corrs
            .iter()
            .find(|c| (s.beams[c.beam].angle - 1.0).abs() < 0.01)
            .unwrap();
        assert!(exact.retained && exact.residual < 1e-9 && exact.ray_error.abs() < 1e-9);
    }

    #[test]
    fn gate_keeps_structure_and_drops_clutter_in_corridor() {
        let walls = corridor();
        let pose = Pose2D::new(18.0, 1.5, 0.05, "1");
        let clutter: Vec<ClutterDisc> = [(14.0, 1.0), (21.0, 2.0), (25.0, 1.4), (11.0, 1.8)]
            .iter()
            .map(|&(x, y)| ClutterDisc {
                center: Point2D::new(x, y),
                radius: 0.25,
            })
            .collect();
        let s = scan(&walls, &pose, 0.02, &clutter, 7);
        let cfg = TrackerConfig::default();
        let corrs = clutter_filter(&s, &walls.all(), &pose, &cfg);
        let (mut st, mut st_kept, mut cl, mut cl_kept) = (0, 0, 0, 0);
        for c in &corrs {
            let label = s.beams[c.beam].label;
            let standoff = walls
                .segments
                .iter()
                .map(|w| w.line_distance(c.point))
                .fold(f64::INFINITY, f64::min);
            match label {
                BeamLabel::Structure => {
                    st += 1;
                    st_kept += c.retained as usize;
                }
                BeamLabel::Clutter if standoff > cfg.tau_in => {
                    cl += 1;
                    cl_kept += c.retained as usize;
                }
                _ => {}
            }
        }
        assert!(cl > 10);
        assert_eq!(cl_kept, 0);
        assert!(st_kept as f64 >= 0.99 * st as f64, "{st_kept}/{st}");
    }

    fn corr_on(segment: u32) -> Correspondence {
        Correspondence {
            beam: 0,
            point: Point2D::default(),
            direction: Point2D::new(1.0, 0.0),
            segment: Some(segment),
            normal: Point2D::new(0.0, 1.0),
            residual: 0.0,
            wall_distance: 0.0,
            ray_error: 0.0,
            side: Side::Inside,
            retained: true,
            robust_weight: 1.0,
            direction_factor: 1.0,
            weight: 1.0,
        }
    }

    #[test]
    fn dominance_of_parallel_and_orthogonal_walls() {
        let walls = square();
        let horizontal: Vec<u32> = (0..walls.len() as u32)
            .filter(|&i| walls.segments[i as usize].orientation() < 0.1)
            .collect();
        let vertical: Vec<u32> = (0..walls.len() as u32)
            .filter(|&i| {
                (walls.segments[i as usize].orientation() - std::f64::consts::FRAC_PI_2).abs() < 0.1
            })
            .collect();
        let cfg = TrackerConfig::default();
        let parallel: Vec<_> = (0..40)
            .map(|k| corr_on(horizontal[k % horizontal.len()]))
            .collect();
        assert_eq!(corridorness(&parallel, &walls, &cfg).dominance, 1.0);
        let mixed: Vec<_> = (0..40)
            .map(|k| {
                corr_on(if k % 2 == 0 {
                    horizontal[0]
                } else {
                    vertical[0]
                })
            })
            .collect();
        let st = corridorness(&mixed, &walls, &cfg);
        assert_eq!(st.dominance, 0.5);
        assert!(st.drop.iter().all(|d| !d));
    }

    #[test]
    fn corridor_mask_keeps_cross_axis_points() {
        let walls = corridor();
        let pose = Pose2D::new(20.0, 1.5, 0.0, "1");
        let s = scan(&walls, &pose, 0.0, &[], 0);
        let cfg = TrackerConfig::default();
        let corrs = clutter_filter(&s, &walls.all(), &pose, &cfg);
        let st = corridorness(&corrs, &walls, &cfg);
        assert!(st.dominance > cfg.corridor_dominance, "{}", st.dominance);
        let axial =
            |c: &Correspondence| walls.segments[c.segment.unwrap() as usize].orientation() < 1e-6;
        let mut kept_axial = 0;
        for (c, &d) in corrs.iter().zip(&st.drop) {
            if !c.retained {
                assert!(!d);
                continue;
            }
            if axial(c) {
                kept_axial += !d as usize;
            } else {
                assert!(!d, "cross-axis point dropped");
            }
        }
        assert_eq!(kept_axial, cfg.axial_cap);
        assert_eq!(
            st.axial,
            corrs.iter().filter(|c| c.retained && axial(c)).count()
        );
    }

    proptest! {
        #[test]
        fn rejected_points_fail_the_gate(dx in -0.8f64..0.8, dy in -0.6f64..0.6, dt in -0.2f64..0.2, seed in 0u64..50) {
            let walls = corridor();
            let truth = Pose2D::new(15.0, 1.5, 0.0, "1");
            let s = scan(&walls, &truth, 0.02, &[ClutterDisc { center: Point2D::new(18.0, 1.0), radius: 0.3 }], seed);
            let est = Pose2D::new(15.0 + dx, 1.5 + dy, dt, "1");
            let cfg = TrackerConfig::default();
            for c in clutter_filter(&s, &walls.all(), &est, &cfg) {
                let e = c.ray_error;
                let d = c.wall_distance;
                prop_assert!(c.residual <= d + 1e-9);
                if c.retained {
                    prop_assert!((e <= 0.0 && d < cfg.tau_in) || (e > 0.0 && d < cfg.tau_out));
                    prop_assert!((0.0..=1.0).contains(&c.weight) && c.residual >= 0.0);
                } else {
                    prop_assert!((e <= 0.0 && d >= cfg.tau_in) || (e > 0.0 && d >= cfg.tau_out));
                }
            }
        }

        #[test]
        fn robust_weight_is_monotone(r in 0.0f64..5.0, dr in 1e-6f64..1.0) {
            let cfg = TrackerConfig { tau_in: 0.5, tau_out: 0.5, ..TrackerConfig::default() };
            for side in [Side::Inside, Side::Outside] {
                prop_assert!(crate::loc::robust_weight(r + dr, side, &cfg) < crate::loc::robust_weight(r, side, &cfg));
            }
            prop_assert!(crate::loc::robust_weight(r, Side::Outside, &cfg) <= crate::loc::robust_weight(r, Side::Inside, &cfg));
        }
    }
}
