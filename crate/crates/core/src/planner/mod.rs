//! Passage-level route planning: a flat A* over the whole passage graph and
//! the hierarchical attach/lift/common-parent planner that works on cached
//! summaries.

mod flat;
mod hier;

pub use flat::{plan_flat, plan_flat_with};
pub use hier::{plan_hierarchical, PlannerConfig};

use crate::geometry::{Point2D, Pose2D};
use crate::graph::{
    EdgeKind, GraphError, HierCache, Hop, PassageGraph, Traversal, VirtualAttachment, VirtualEdge,
};
use crate::model::{AreaGraph, ModelError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Locate(#[from] ModelError),
    #[error("no route between start and goal")]
    NoRoute,
    #[error("could not attach `{0}` to its passages")]
    AttachFailed(String),
}

impl From<GraphError> for PlanError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Model(m) => PlanError::Locate(m),
            GraphError::AttachFailed(a) => PlanError::AttachFailed(a),
            other => PlanError::AttachFailed(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "level")]
pub enum FloorConstraint {
    Unconstrained,
    SameFloor(String),
}

impl FloorConstraint {
    pub fn level(&self) -> Option<&str> {
        match self {
            FloorConstraint::Unconstrained => None,
            FloorConstraint::SameFloor(l) => Some(l),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub rebuild_us: f64,
    pub attach_us: f64,
    pub lift_us: f64,
    pub assemble_us: f64,
    pub astar_us: f64,
    pub expand_us: f64,
    pub total_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorTransition {
    /// Passage crossed when the level changes.
    pub passage: String,
    pub from_area: String,
    pub to_area: String,
    pub from_level: String,
    pub to_level: String,
}

/// One traversed edge of the expanded route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteStep {
    pub from: String,
    pub to: String,
    pub through_area: String,
    pub kind: EdgeKind,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub planner: String,
    pub start: Pose2D,
    pub goal: Pose2D,
    /// Passage names in travel order.
    pub passages: Vec<String>,
    /// Passages of the compact search before expansion.
    pub compact_passages: Vec<String>,
    pub dense_path: Vec<Point2D>,
    pub cost: f64,
    pub steps: Vec<RouteStep>,
    /// States closed by the route search itself.
    pub closed_states: usize,
    /// States settled while attaching and lifting.
    pub frontier_states: usize,
    pub stage_times_us: StageTimes,
    pub used_fallback: bool,
    pub floor_constraint: FloorConstraint,
    pub floor_transitions: Vec<FloorTransition>,
    pub common_parent: Option<String>,
    pub lifted_through: Vec<String>,
}

impl PlanResult {
    pub fn hops(&self) -> usize {
        self.steps.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }
}

/// Query-local node keys for the two injected poses.
pub(crate) const START: u32 = u32::MAX - 1;
pub(crate) const GOAL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Side {
    Start,
    Goal,
}

/// What an arc of a query-time search graph stands for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum QArc {
    Hop(Hop),
    /// Virtual edge `idx` of one side; `outward` means pose → passage.
    Virtual {
        side: Side,
        idx: u32,
        outward: bool,
    },
    /// Same-leaf start→goal edge.
    Direct {
        forward: bool,
    },
    /// Frontier entry `idx` of one side (only in the common-parent graph).
    Frontier {
        side: Side,
        idx: u32,
    },
}

impl From<Hop> for QArc {
    fn from(h: Hop) -> Self {
        QArc::Hop(h)
    }
}

impl QArc {
    pub(crate) fn reversed(self) -> QArc {
        match self {
            QArc::Hop(h) => QArc::Hop(h.reversed()),
            QArc::Virtual { side, idx, outward } => QArc::Virtual {
                side,
                idx,
                outward: !outward,
            },
            QArc::Direct { forward } => QArc::Direct { forward: !forward },
            f @ QArc::Frontier { .. } => f,
        }
    }
}

/// Expanded route element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Step {
    Base(Traversal),
    Virtual { side: Side, idx: u32, outward: bool },
    Direct { forward: bool },
}

pub(crate) struct Query<'a> {
    pub graph: &'a AreaGraph,
    pub pg: &'a PassageGraph,
    pub cache: &'a HierCache,
    pub s: &'a VirtualAttachment,
    pub g: &'a VirtualAttachment,
    pub direct: Option<&'a VirtualEdge>,
}

impl Query<'_> {
    pub(crate) fn position(&self, key: u32) -> Point2D {
        match key {
            START => self.s.position(),
            GOAL => self.g.position(),
            p => self.pg.position(p),
        }
    }

    fn attachment(&self, side: Side) -> &VirtualAttachment {
        match side {
            Side::Start => self.s,
            Side::Goal => self.g,
        }
    }

    /// Expands non-frontier arcs into steps.
    pub(crate) fn expand(&self, arc: QArc, out: &mut Vec<Step>) {
        match arc {
            QArc::Hop(h) => {
                let mut tr = Vec::new();
                self.cache.expand_hop(h, &mut tr);
                out.extend(tr.into_iter().map(Step::Base));
            }
            QArc::Virtual { side, idx, outward } => out.push(Step::Virtual { side, idx, outward }),
            QArc::Direct { forward } => out.push(Step::Direct { forward }),
            QArc::Frontier { .. } => unreachable!("frontier arcs are expanded by the planner"),
        }
    }

    /// Builds the result record from expanded steps, starting at START.
    pub(crate) fn materialize(&self, planner: &str, steps: &[Step], cost: f64) -> PlanResult {
        let mut passages: Vec<String> = Vec::new();
        let mut dense: Vec<Point2D> = Vec::new();
        let mut route = Vec::with_capacity(steps.len());
        let name = |k: u32| -> String {
            match k {
                START => "start".into(),
                GOAL => "goal".into(),
                p => self.pg.vertices[p as usize].name.clone(),
            }
        };
        let push_trace = |dense: &mut Vec<Point2D>, pts: &mut dyn Iterator<Item = Point2D>| {
            for p in pts {
                if dense.last() != Some(&p) {
                    dense.push(p);
                }
            }
        };
        for st in steps {
            let (from, to, area, kind, weight) = match *st {
                Step::Base(Traversal { edge, forward }) => {
                    let e = &self.pg.edges[edge as usize];
                    if forward {
                        push_trace(&mut dense, &mut e.trace.iter().copied());
                    } else {
                        push_trace(&mut dense, &mut e.trace.iter().rev().copied());
                    }
                    let (f, t) = if forward { (e.a, e.b) } else { (e.b, e.a) };
                    (f, t, e.through_area.clone(), e.kind, e.weight)
                }
                Step::Virtual { side, idx, outward } => {
                    let att = self.attachment(side);
                    let e = &att.edges[idx as usize];
                    let pose_key = if side == Side::Start { START } else { GOAL };
                    if outward {
                        push_trace(&mut dense, &mut e.trace.iter().copied());
                        (pose_key, e.passage, att.leaf_name.clone(), e.kind, e.weight)
                    } else {
                        push_trace(&mut dense, &mut e.trace.iter().rev().copied());
                        (e.passage, pose_key, att.leaf_name.clone(), e.kind, e.weight)
                    }
                }
                Step::Direct { forward } => {
                    let e = self.direct.expect("direct step needs a direct edge");
                    if forward {
                        push_trace(&mut dense, &mut e.trace.iter().copied());
                        (START, GOAL, self.s.leaf_name.clone(), e.kind, e.weight)
                    } else {
                        push_trace(&mut dense, &mut e.trace.iter().rev().copied());
                        (GOAL, START, self.s.leaf_name.clone(), e.kind, e.weight)
                    }
                }
            };
            if to != START && to != GOAL {
                passages.push(name(to));
            }

            route.push(RouteStep {
                from: name(from),
                to: name(to),
                through_area: area,
                kind,
                weight,
            });
        }
        if dense.is_empty() {
            dense.push(self.s.position());
            dense.push(self.g.position());
        }
        // the route starts and ends at the exact poses
        dense[0] = self.s.position();
        let n = dense.len();
        dense[n - 1] = self.g.position();

        let level_of = |area: &str| self.graph.area_by_name(area).and_then(|a| a.level.clone());
        let mut transitions = Vec::new();
        for w in route.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.through_area == b.through_area {
                continue;
            }
            if let (Some(la), Some(lb)) = (level_of(&a.through_area), level_of(&b.through_area)) {
                if la != lb {
                    transitions.push(FloorTransition {
                        passage: a.to.clone(),
                        from_area: a.through_area.clone(),
                        to_area: b.through_area.clone(),
                        from_level: la,
                        to_level: lb,
                    });
                }
            }
        }

        PlanResult {
            planner: planner.to_string(),
            start: self.s.pose.clone(),
            goal: self.g.pose.clone(),
            passages,
            compact_passages: Vec::new(),
            dense_path: dense,
            cost,
            steps: route,
            closed_states: 0,
            frontier_states: 0,
            stage_times_us: StageTimes::default(),
            used_fallback: false,
            floor_constraint: FloorConstraint::Unconstrained,
            floor_transitions: transitions,
            common_parent: None,
            lifted_through: Vec::new(),
        }
    }
}

pub(crate) fn micros(t: std::time::Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e6
}
