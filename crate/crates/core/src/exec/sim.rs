use super::{
    project_goal_to_window, Dispatch, ExecError, SegmentDispatcher, GOAL_REACH_THRESHOLD_M,
    PROJECTION_MARGIN_M,
};
use crate::geometry::{closest_point_on_segment, Point2D};
use crate::model::AreaGraph;
use crate::planner::PlanResult;
use crate::raster::{Cell, RollingWindow, WINDOW_RESOLUTION_M, WINDOW_SIZE_M};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub max_speed: f64,
    /// Acceleration limit in m/s².
    pub max_accel: f64,
    pub tick_s: f64,
}

impl Default for RobotModel {
    fn default() -> Self {
        Self {
            max_speed: 1.0,
            max_accel: 1.0,
            tick_s: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionConfig {
    pub goal_reach_threshold: f64,
    pub projection_margin: f64,
    pub window_m: f64,
    pub window_resolution: f64,
    /// Defaults to twice the nominal travel time plus 100 ticks.
    pub max_ticks: Option<usize>,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            goal_reach_threshold: GOAL_REACH_THRESHOLD_M,
            projection_margin: PROJECTION_MARGIN_M,
            window_m: WINDOW_SIZE_M,
            window_resolution: WINDOW_RESOLUTION_M,
            max_ticks: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionSample {
    pub tick: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub level: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MissionEventKind {
    /// Handoff to goal `index` after reaching `reached`.
    GoalSwitch {
        index: usize,
        reached: String,
    },
    MapSwitch {
        from: String,
        to: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionEvent {
    pub tick: usize,
    pub t: f64,
    #[serde(flatten)]
    pub kind: MissionEventKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum MissionStatus {
    Success,
    Aborted(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionLog {
    pub status: MissionStatus,
    pub ticks: usize,
    pub duration_s: f64,
    pub path_length: f64,
    pub planned_passages: usize,
    pub goal_switches: usize,
    pub map_switches: usize,
    /// Ticks on which the active goal had to be projected into the window.
    pub proxy_ticks: usize,
    /// Proxy goals found outside the margin-inset window (should be zero).
    pub proxy_violations: usize,
    /// Ticks on which the robot stood on an occupied window cell.
    pub collisions: usize,
    /// Largest gap between the acceleration-limited commanded speed and
    /// the achieved speed on the ticks around any switch event.
    pub max_switch_speed_delta: f64,
    pub window_cells: usize,
    pub samples: Vec<MissionSample>,
    pub events: Vec<MissionEvent>,
}

impl MissionLog {
    pub fn succeeded(&self) -> bool {
        self.status == MissionStatus::Success
    }

    /// JSON summary without the per-tick samples.
    pub fn summary_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("log serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("samples");
        }
        serde_json::to_string_pretty(&v).expect("log serializes")
    }

    /// One row per tick: t, x, y, theta, v, event.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "y", "theta", "v", "event"])?;
        let mut ev = self.events.iter().peekable();
        for s in &self.samples {
            let mut tags = Vec::new();
            while let Some(e) = ev.peek() {
                if e.tick != s.tick {
                    break;
                }
                tags.push(match &e.kind {
                    MissionEventKind::GoalSwitch { index, .. } => format!("goal_switch:{index}"),
                    MissionEventKind::MapSwitch { to, .. } => format!("map_switch:{to}"),
                });
                ev.next();
            }
            w.write_record([
                format!("{:.3}", s.t),
                format!("{:.4}", s.x),
                format!("{:.4}", s.y),
                format!("{:.4}", s.theta),
                format!("{:.4}", s.v),
                tags.join(";"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Dense path with cumulative arclength.
struct Track {
    pts: Vec<Point2D>,
    cum: Vec<f64>,
}

impl Track {
    fn new(pts: &[Point2D]) -> Self {
        let mut cum = Vec::with_capacity(pts.len());
        let mut s = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if i > 0 {
                s += pts[i - 1].distance(*p);
            }
            cum.push(s);
        }
        Self {
            pts: pts.to_vec(),
            cum,
        }
    }

    fn length(&self) -> f64 {
        *self.cum.last().unwrap_or(&0.0)
    }

    fn segment(&self, s: f64) -> usize {
        let i = self.cum.partition_point(|&c| c <= s);
        i.clamp(1, self.pts.len().max(2) - 1) - 1
    }

    fn at(&self, s: f64) -> (Point2D, f64) {
        if self.pts.len() < 2 {
            return (self.pts[0], 0.0);
        }
        let i = self.segment(s);
        let (a, b) = (self.pts[i], self.pts[i + 1]);
        let len = self.cum[i + 1] - self.cum[i];
        let t = if len > 0.0 {
            ((s - self.cum[i]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (a.lerp(b, t), (b.y - a.y).atan2(b.x - a.x))
    }

    /// Arclength of the first point at or after `from` that lies within
    /// `tol` of `p`, else of the closest point after `from`.
    fn locate(&self, p: Point2D, from: f64, tol: f64) -> f64 {
        let mut best = (f64::INFINITY, self.length());
        for i in self.segment(from)..self.pts.len().saturating_sub(1) {
            let (a, b) = (self.pts[i], self.pts[i + 1]);
            let q = closest_point_on_segment(p, a, b);
            let s = (self.cum[i] + a.distance(q)).max(from);
            let d = q.distance(p);
            if d <= tol {
                return s;
            }
            if d < best.0 {
                best = (d, s);
            }
        }
        best.1
    }

    /// Path points from arclength `s0` up to `s1`.
    fn slice(&self, s0: f64, s1: f64) -> Vec<Point2D> {
        let mut out = vec![self.at(s0).0];
        for (i, &c) in self.cum.iter().enumerate() {
            if c > s0 && c < s1 {
                out.push(self.pts[i]);
            }
        }
        out.push(self.at(s1).0);
        out
    }
}

/// Replays `plan` with a path-following robot. Each tick refreshes the
/// rolling window around the robot, dispatches (and if needed projects) the
/// segment goal, then advances the robot along the dense path toward it.
pub fn simulate_mission(
    graph: &AreaGraph,
    plan: &PlanResult,
    robot_model: &RobotModel,
    config: &MissionConfig,
) -> Result<MissionLog, ExecError> {
    if plan.dense_path.is_empty() {
        return Err(ExecError::EmptyPlan);
    }
    let track = Track::new(&plan.dense_path);
    let total = track.length();
    let dt = robot_model.tick_s;
    let vmax = robot_model.max_speed;
    let max_ticks = config
        .max_ticks
        .unwrap_or_else(|| (2.0 * total / (vmax * dt)).ceil() as usize + 100);
    let window = RollingWindow::new(config.window_m, config.window_resolution);
    let mut dispatcher = SegmentDispatcher::new(graph, plan, config.goal_reach_threshold);

    // arclength of every dispatched goal along the dense path
    let mut goal_s = Vec::with_capacity(dispatcher.goals().len());
    let mut from = 0.0;
    for g in dispatcher.goals() {
        let s = track.locate(g.pose.position(), from, 1e-6);
        goal_s.push(s);
        from = s;
    }
    if let Some(last) = goal_s.last_mut() {
        *last = total;
    }

    let mut robot = plan.start.clone();
    let mut s = 0.0;
    let mut v = 0.0;
    let mut log = MissionLog {
        status: MissionStatus::Aborted("tick budget exhausted".into()),
        ticks: 0,
        duration_s: 0.0,
        path_length: total,
        planned_passages: plan.passages.len(),
        goal_switches: 0,
        map_switches: 0,
        proxy_ticks: 0,
        proxy_violations: 0,
        collisions: 0,
        max_switch_speed_delta: 0.0,
        window_cells: window.cells_per_side() * window.cells_per_side(),
        samples: Vec::new(),
        events: Vec::new(),
    };
    let mut switch_ticks = Vec::new();
    // commanded minus achieved speed, per tick
    let mut shortfall = Vec::new();
    let mut prev_level = robot.level.clone();

    for tick in 0..max_ticks {
        let t = tick as f64 * dt;
        let before = dispatcher.active_index();
        let dispatch = dispatcher.next_segment_goal(&robot);
        for idx in before..dispatcher.active_index() {
            let reached = dispatcher.goals()[idx].clone();
            log.events.push(MissionEvent {
                tick,
                t,
                kind: MissionEventKind::GoalSwitch {
                    index: idx + 1,
                    reached: reached.passage.unwrap_or_default(),
                },
            });
            switch_ticks.push(tick);
            // stacked vertical passages can be handed off on one tick; each
            // level change is still its own map switch
            if reached.pose.level != robot.level {
                robot.level = reached.pose.level.clone();
                log.events.push(MissionEvent {
                    tick,
                    t,
                    kind: MissionEventKind::MapSwitch {
                        from: std::mem::replace(&mut prev_level, robot.level.clone()),
                        to: robot.level.clone(),
                    },
                });
                log.map_switches += 1;
            }
        }

        let frame = window.tick(graph, &robot);
        if let Some(c) = frame.raster.cell_of(robot.position()) {
            if frame.raster.get(c) == Cell::Occupied {
                log.collisions += 1;
            }
        }
        log.samples.push(MissionSample {
            tick,
            t,
            x: robot.x,
            y: robot.y,
            theta: robot.theta,
            v,
            level: robot.level.clone(),
        });

        let goal = match dispatch {
            Dispatch::Done => {
                log.status = MissionStatus::Success;
                log.ticks = tick;
                break;
            }
            Dispatch::Goal(g) => g,
        };
        let gs = goal_s[goal.index].max(s);
        let ahead = track.slice(s, gs);
        let target = project_goal_to_window(
            &ahead,
            &robot,
            &goal,
            &frame.raster,
            config.projection_margin,
        )?;
        let target_s = if target.is_proxy {
            log.proxy_ticks += 1;
            let inset = frame
                .raster
                .world_bounds()
                .expanded(-config.projection_margin);
            if !(inset.contains(target.pose.position())) {
                log.proxy_violations += 1;
            }
            track.locate(target.pose.position(), s, 1e-6).min(gs)
        } else {
            gs
        };

        // accelerate up to max speed, brake only for the final goal
        let brake = (2.0 * robot_model.max_accel * (total - s).max(0.0)).sqrt();
        let v_cmd = vmax.min(v + robot_model.max_accel * dt).min(brake);
        let step = (v_cmd * dt).min((target_s - s).max(0.0));
        v = step / dt;
        shortfall.push(v_cmd - v);
        s += step;
        let (p, heading) = track.at(s);
        robot.x = p.x;
        robot.y = p.y;
        if step > 0.0 {
            robot.theta = heading;
        }
        log.ticks = tick + 1;
    }

    log.duration_s = log.ticks as f64 * dt;
    log.goal_switches = dispatcher.switches();
    for &k in &switch_ticks {
        for i in [k, k + 1] {
            if let Some(d) = shortfall.get(i) {
                log.max_switch_speed_delta = log.max_switch_speed_delta.max(d.abs());
            }
        }
    }
    Ok(log)
}
