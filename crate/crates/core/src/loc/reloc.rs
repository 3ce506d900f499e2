use super::icp::{clutter_filter, confidence};
use super::{icp_track, LocError, LocalMap, MapSegments, ScanFrame, Side, TrackerConfig};
use crate::geometry::{Point2D, Pose2D};
use crate::model::AreaGraph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelocConfig {
    pub grid_pitch: f64,
    pub angle_step: f64,
    /// Candidates closer than this to a wall are skipped.
    pub clearance: f64,
    /// Distinct modes refined by ICP.
    pub modes: usize,
    /// Hypotheses closer than this in the same area count as one mode.
    pub mode_separation: f64,
    pub min_returns: usize,
    pub tracker: TrackerConfig,
}

impl Default for RelocConfig {
    fn default() -> Self {
        Self {
            grid_pitch: 1.0,
            angle_step: 10f64.to_radians(),
            clearance: 0.2,
            modes: 2,
            mode_separation: 2.0,
            min_returns: 10,
            tracker: TrackerConfig {
                max_iterations: 60,
                jump_translation: 2.0,
                jump_rotation: 20f64.to_radians(),
                ..TrackerConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub pose: Pose2D,
    pub area: String,
    /// `1 / (S_in + S_out + ε)` of the residual sums.
    pub base_score: f64,
    /// Inside/outside count balance times the share of beams passing the gate.
    pub edge_quality: f64,
    pub score: f64,
    /// ICP confidence after refinement (0 before).
    pub icp_score: f64,
    pub refined: bool,
}

const SCORE_EPS: f64 = 1e-6;
const BALANCE_FLOOR: f64 = 0.2;

struct Scored {
    base: f64,
    edge: f64,
}

fn score_pose(scan: &ScanFrame, map: &LocalMap<'_>, pose: &Pose2D, cfg: &TrackerConfig) -> Scored {
    let corrs = clutter_filter(scan, map, pose, cfg);
    let penalty = cfg.match_radius();
    let (mut s_in, mut s_out) = (0.0, 0.0);
    let (mut n_in, mut n_out) = (0usize, 0usize);
    let mut retained = 0usize;
    for c in &corrs {
        match (c.segment, c.side) {
            (Some(_), Side::Inside) => {
                s_in += c.residual;
                n_in += 1;
            }
            (Some(_), Side::Outside) => {
                s_out += c.residual;
                n_out += 1;
            }
            (None, _) => s_out += penalty,
        }
        retained += c.retained as usize;
    }
    let n = n_in + n_out;
    let balance = if n > 0 {
        (1.0 - n_in.abs_diff(n_out) as f64 / n as f64).max(BALANCE_FLOOR)
    } else {
        BALANCE_FLOOR
    };
    let support = if scan.beams.is_empty() {
        0.0
    } else {
        retained as f64 / scan.beams.len() as f64
    };
    Scored {
        base: 1.0 / (s_in + s_out + SCORE_EPS),
        edge: balance * support,
    }
}

/// Global pose search without a prior: score a grid of poses inside every
/// leaf area of `level`, keep the best well-separated modes, refine them by
/// ICP and return them best first.
pub fn global_relocalize(
    graph: &AreaGraph,
    level: &str,
    scan: &ScanFrame,
    cfg: &RelocConfig,
) -> Result<Vec<Hypothesis>, LocError> {
    if scan.returns().count() < cfg.min_returns {
        return Err(LocError::NoHypothesis);
    }
    let lvl = graph.levels().contains(&level.to_string()).then_some(level);
    let walls = MapSegments::from_graph(graph, lvl);
    let all = walls.all();
    let steps = ((2.0 * std::f64::consts::PI / cfg.angle_step).round() as usize).max(1);

    let mut seeds: Vec<(Point2D, String)> = Vec::new();
    for a in graph.area_ids().filter(|&a| graph.is_leaf(a)) {
        let area = graph.area(a);
        if lvl.is_some() && area.level.as_deref().is_some_and(|l| l != level) {
            continue;
        }
        let poly = &area.polygon;
        let b = poly.bounds();
        let nx = ((b.width() / cfg.grid_pitch).floor() as usize).max(1);
        let ny = ((b.height() / cfg.grid_pitch).floor() as usize).max(1);
        let ox = b.min.x + (b.width() - (nx - 1) as f64 * cfg.grid_pitch) / 2.0;
        let oy = b.min.y + (b.height() - (ny - 1) as f64 * cfg.grid_pitch) / 2.0;
        for i in 0..nx {
            for j in 0..ny {
                let p = Point2D::new(
                    ox + i as f64 * cfg.grid_pitch,
                    oy + j as f64 * cfg.grid_pitch,
                );
                if poly.contains(p) && poly.boundary_distance(p) >= cfg.clearance {
                    seeds.push((p, area.name.clone()));
                }
            }
        }
    }
    if seeds.is_empty() {
        return Err(LocError::NoHypothesis);
    }

    let tcfg = &cfg.tracker;
    let mut coarse: Vec<Hypothesis> = seeds
        .par_iter()
        .flat_map_iter(|(p, area)| {
            let all = &all;
            (0..steps).map(move |k| {
                let pose = Pose2D::new(p.x, p.y, k as f64 * cfg.angle_step, level);
                let s = score_pose(scan, all, &pose, tcfg);
                Hypothesis {
                    pose,
                    area: area.clone(),
                    base_score: s.base,
                    edge_quality: s.edge,
                    score: s.base * s.edge,
                    icp_score: 0.0,
                    refined: false,
                }
            })
        })
        .collect();
    coarse.sort_by(|a, b| b.score.total_cmp(&a.score));

    let mut modes: Vec<Hypothesis> = Vec::new();
    for h in coarse {
        if modes.len() >= cfg.modes {
            break;
        }
        let distinct = modes.iter().all(|m| {
            m.area != h.area || m.pose.position().distance(h.pose.position()) >= cfg.mode_separation
        });
        if distinct {
            modes.push(h);
        }
    }

    let mut out: Vec<Hypothesis> = modes
        .into_par_iter()
        .map(|h| match icp_track(scan, &walls, &h.pose, tcfg) {
            Ok(r) => {
                let s = score_pose(scan, &all, &r.pose, tcfg);
                Hypothesis {
                    area: graph
                        .locate_leaf_area(r.pose.position(), level)
                        .unwrap_or(h.area),
                    pose: r.pose,
                    base_score: s.base,
                    edge_quality: s.edge,
                    score: s.base * s.edge,
                    icp_score: confidence(r.valid_ratio, r.mean_residual, r.weight_variance, tcfg),
                    refined: true,
                }
            }
            Err(_) => h,
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(out)
}
