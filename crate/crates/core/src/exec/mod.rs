//! Segmented mission execution: passage-by-passage goal dispatch with
//! continuous handoff, projection of far goals into the rolling window, and
//! a path-following robot model that replays a plan tick by tick.

mod sim;

pub use sim::{
    simulate_mission, MissionConfig, MissionEvent, MissionEventKind, MissionLog, MissionSample,
    MissionStatus, RobotModel,
};

use crate::geometry::{clip_segment, Bounds, Point2D, Pose2D};
use crate::model::AreaGraph;
use crate::planner::PlanResult;
use crate::raster::OccupancyRaster;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const GOAL_REACH_THRESHOLD_M: f64 = 0.5;
pub const PROJECTION_MARGIN_M: f64 = 1.0;

/// Keeps projected goals strictly inside the inset window.
const INSET_EPS: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ExecError {
    #[error("plan has no dense path")]
    EmptyPlan,
    #[error("robot at ({0:.2}, {1:.2}) is outside the window")]
    NoProjection(f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentGoal {
    pub pose: Pose2D,
    /// Target passage; `None` for the final goal.
    pub passage: Option<String>,
    /// Position in the dispatch sequence.
    pub index: usize,
    pub is_proxy: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Dispatch {
    Goal(SegmentGoal),
    Done,
}

/// Issues one goal per planned passage, then the final pose.
#[derive(Clone, Debug)]
pub struct SegmentDispatcher {
    goals: Vec<SegmentGoal>,
    active: usize,
    threshold: f64,
    switches: usize,
}

impl SegmentDispatcher {
    /// Passage goals sit at passage centers, facing the final goal. Each
    /// carries the level of the area entered through that passage.
    pub fn new(graph: &AreaGraph, plan: &PlanResult, threshold: f64) -> Self {
        let fin = plan.goal.position();
        let mut goals = Vec::with_capacity(plan.passages.len() + 1);
        for (i, step) in plan.steps.iter().enumerate() {
            if step.to == "goal" {
                continue;
            }
            let Some(p) = graph.passage_by_name(&step.to) else {
                continue;
            };
            let c = p.center();
            let level = plan
                .steps
                .get(i + 1)
                .and_then(|n| graph.area_by_name(&n.through_area))
                .and_then(|a| a.level.clone())
                .unwrap_or_else(|| plan.goal.level.clone());
            let theta = if fin.distance(c) > 1e-9 {
                (fin.y - c.y).atan2(fin.x - c.x)
            } else {
                plan.goal.theta
            };
            goals.push(SegmentGoal {
                pose: Pose2D::new(c.x, c.y, theta, level),
                passage: Some(step.to.clone()),
                index: goals.len(),
                is_proxy: false,
            });
        }
        goals.push(SegmentGoal {
            pose: plan.goal.clone(),
            passage: None,
            index: goals.len(),
            is_proxy: false,
        });
        Self {
            goals,
            active: 0,
            threshold,
            switches: 0,
        }
    }

    pub fn goals(&self) -> &[SegmentGoal] {
        &self.goals
    }

    pub fn active_index(&self) -> usize {
        self.active
    }

    /// Passage goals handed off so far.
    pub fn switches(&self) -> usize {
        self.switches
    }

    /// Advances past every passage goal within the handoff threshold
    /// (without stopping) and returns the active goal, or `Done` once the
    /// robot is within the threshold of the final pose.
    pub fn next_segment_goal(&mut self, robot: &Pose2D) -> Dispatch {
        let last = self.goals.len() - 1;
        while self.active < last
            && self.goals[self.active]
                .pose
                .position()
                .distance(robot.position())
                <= self.threshold
        {
            self.active += 1;
            self.switches += 1;
        }
        if self.active == last
            && self.goals[last].pose.position().distance(robot.position()) <= self.threshold
        {
            return Dispatch::Done;
        }
        Dispatch::Goal(self.goals[self.active].clone())
    }
}

/// Orientation cue of a passage goal: toward the final goal.
pub fn orientation_cue(passage: Point2D, final_goal: Point2D) -> f64 {
    (final_goal.y - passage.y).atan2(final_goal.x - passage.x)
}

fn heading(a: Point2D, b: Point2D) -> f64 {
    (b.y - a.y).atan2(b.x - a.x)
}

/// Keeps `goal` if it lies inside the window. Otherwise returns a proxy:
/// the farthest point of `path` (which runs from the robot to the goal)
/// inside the window inset by `margin`, or failing that the point where the
/// straight robot→goal segment leaves the inset window.
pub fn project_goal_to_window(
    path: &[Point2D],
    robot: &Pose2D,
    goal: &SegmentGoal,
    window: &OccupancyRaster,
    margin: f64,
) -> Result<SegmentGoal, ExecError> {
    let bounds = window.world_bounds();
    if !bounds.contains(robot.position()) {
        return Err(ExecError::NoProjection(robot.x, robot.y));
    }
    if bounds.contains(goal.pose.position()) {
        return Ok(goal.clone());
    }
    let inset = bounds.expanded(-(margin + INSET_EPS));
    let proxy = |p: Point2D, theta: f64| SegmentGoal {
        pose: Pose2D::new(p.x, p.y, theta, goal.pose.level.clone()),
        passage: goal.passage.clone(),
        index: goal.index,
        is_proxy: true,
    };
    if !inset.is_empty() {
        for w in path.windows(2).rev() {
            if let Some((_, t1)) = clip_segment(w[0], w[1], &inset) {
                return Ok(proxy(w[0].lerp(w[1], t1), heading(w[0], w[1])));
            }
        }
        if path.len() == 1 && inset.contains(path[0]) {
            return Ok(proxy(path[0], goal.pose.theta));
        }
        let (r, g) = (robot.position(), goal.pose.position());
        if let Some((_, t1)) = clip_segment(r, g, &inset) {
            return Ok(proxy(r.lerp(g, t1), heading(r, g)));
        }
    }
    // robot sits in the margin band itself
    Ok(proxy(
        clamp_into(&inset, &bounds, robot.position()),
        heading(robot.position(), goal.pose.position()),
    ))
}

fn clamp_into(inset: &Bounds, outer: &Bounds, p: Point2D) -> Point2D {
    let b = if inset.is_empty() {
        let c = outer.center();
        Bounds { min: c, max: c }
    } else {
        *inset
    };
    Point2D::new(p.x.clamp(b.min.x, b.max.x), p.y.clamp(b.min.y, b.max.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Cell;

    fn window(cx: f64, cy: f64, size: f64, res: f64) -> OccupancyRaster {
        let n = (size / res).round() as usize;
        let origin = (
            ((cx / res).floor() as i64) - n as i64 / 2,
            ((cy / res).floor() as i64) - n as i64 / 2,
        );
        OccupancyRaster::new(origin, n, n, res, "1", Cell::Free)
    }

    fn goal_at(x: f64, y: f64) -> SegmentGoal {
        SegmentGoal {
            pose: Pose2D::new(x, y, 0.0, "1"),
            passage: Some("d".into()),
            index: 0,
            is_proxy: false,
        }
    }

    #[test]
    fn cue_points_at_final_goal() {
        assert_eq!(
            orientation_cue(Point2D::new(0.0, 0.0), Point2D::new(10.0, 0.0)),
            0.0
        );
        let t = orientation_cue(Point2D::new(0.0, 0.0), Point2D::new(0.0, -3.0));
        assert!((t + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn goal_inside_window_is_unchanged() {
        let w = window(0.0, 0.0, 50.0, 0.05);
        let g = goal_at(10.0, 3.0);
        let robot = Pose2D::new(0.0, 0.0, 0.0, "1");
        let out =
            project_goal_to_window(&[robot.position(), g.pose.position()], &robot, &g, &w, 1.0)
                .unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn straight_corridor_proxy_at_half_window_minus_margin() {
        let w = window(0.0, 0.0, 50.0, 0.05);
        let g = goal_at(40.0, 0.0);
        let robot = Pose2D::new(0.0, 0.0, 0.0, "1");
        let path = [robot.position(), Point2D::new(20.0, 0.0), g.pose.position()];
        let out = project_goal_to_window(&path, &robot, &g, &w, 1.0).unwrap();
        assert!(out.is_proxy);
        assert!((out.pose.x - 24.0).abs() < 0.06, "{}", out.pose.x);
        assert!(w
            .world_bounds()
            .expanded(-1.0)
            .contains(out.pose.position()));
    }

    #[test]
    fn farthest_inside_point_wins_over_first_exit() {
        // the path leaves the window to the north, comes back, and exits east
        let w = window(0.0, 0.0, 20.0, 0.1);
        let path = [
            Point2D::new(0.0, 0.0),
            Point2D::new(0.0, 15.0),
            Point2D::new(5.0, 15.0),
            Point2D::new(5.0, 0.0),
            Point2D::new(30.0, 0.0),
        ];
        let g = goal_at(30.0, 0.0);
        let robot = Pose2D::new(0.0, 0.0, 0.0, "1");
        let out = project_goal_to_window(&path, &robot, &g, &w, 1.0).unwrap();
        assert!(
            (out.pose.x - 9.0).abs() < 1e-5 && out.pose.y.abs() < 1e-9,
            "{:?}",
            out.pose
        );
    }

    #[test]
    fn straight_line_fallback_when_path_never_inside() {
        let w = window(0.0, 0.0, 20.0, 0.1);
        let g = goal_at(0.0, 40.0);
        let robot = Pose2D::new(0.0, 0.0, 0.0, "1");
        // a path that lies wholly outside the inset window
        let path = [Point2D::new(30.0, 30.0), Point2D::new(0.0, 40.0)];
        let out = project_goal_to_window(&path, &robot, &g, &w, 1.0).unwrap();
        assert!(out.is_proxy);
        assert!(out.pose.x.abs() < 1e-9 && (out.pose.y - 9.0).abs() < 1e-5);
    }

    #[test]
    fn robot_outside_window_is_an_error() {
        let w = window(0.0, 0.0, 10.0, 0.1);
        let robot = Pose2D::new(50.0, 0.0, 0.0, "1");
        let g = goal_at(60.0, 0.0);
        assert!(matches!(
            project_goal_to_window(&[], &robot, &g, &w, 1.0),
            Err(ExecError::NoProjection(..))
        ));
    }
}
