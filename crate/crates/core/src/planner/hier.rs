use super::flat::plan_flat_with;
use super::{micros, FloorConstraint, PlanError, PlanResult, QArc, Query, Side, Step, GOAL, START};
use crate::geometry::Pose2D;
use crate::graph::search::SearchGraph;
use crate::graph::{
    build_caches, inject_virtual_passage, GraphError, HierCache, PassageGraph, VirtualAttachment,
};
use crate::model::{AreaGraph, AreaId};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Use the prebuilt caches; when false they are rebuilt inside the query.
    pub use_cache: bool,
    /// Fall back to flat passage A* when a hierarchical stage fails.
    pub fallback: bool,
    /// Keep only the k cheapest frontier entries after attach/lift.
    pub frontier_top_k: Option<usize>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            use_cache: true,
            fallback: true,
            frontier_top_k: None,
        }
    }
}

#[derive(Clone, Debug)]
struct FrontierEntry {
    passage: u32,
    cost: f64,
    /// Arcs from the pose to `passage`.
    arcs: Vec<QArc>,
}

type Frontier = Vec<FrontierEntry>;

enum Failure {
    Fatal(PlanError),
    Invalid,
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Model(m) => Failure::Fatal(PlanError::Locate(m)),
            _ => Failure::Invalid,
        }
    }
}

fn key(side: Side) -> u32 {
    match side {
        Side::Start => START,
        Side::Goal => GOAL,
    }
}

/// Attach → lift → common-parent search → expand. Any invalid stage falls
/// back to flat passage A* (same-floor first, then unrestricted).
pub fn plan_hierarchical(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    start: &Pose2D,
    goal: &Pose2D,
    config: &PlannerConfig,
) -> Result<PlanResult, PlanError> {
    let t0 = Instant::now();
    let rebuilt;
    let cache = if config.use_cache {
        cache
    } else {
        rebuilt = build_caches(graph, pg, &cache.params);
        &rebuilt
    };
    let rebuild_us = micros(t0);

    let mut result = match hierarchical(graph, pg, cache, start, goal, config) {
        Ok(r) => r,
        Err(Failure::Fatal(e)) => return Err(e),
        Err(Failure::Invalid) if !config.fallback => return Err(PlanError::NoRoute),
        Err(Failure::Invalid) => {
            let phi = floor_constraint(graph, start, goal);
            let r = match plan_flat_with(graph, pg, cache, start, goal, &phi) {
                Err(PlanError::NoRoute) if phi != FloorConstraint::Unconstrained => plan_flat_with(
                    graph,
                    pg,
                    cache,
                    start,
                    goal,
                    &FloorConstraint::Unconstrained,
                ),
                other => other,
            };
            let mut r = r?;
            r.planner = "hier".into();
            r.used_fallback = true;
            r
        }
    };
    result.stage_times_us.rebuild_us = rebuild_us;
    result.stage_times_us.total_us = micros(t0);
    Ok(result)
}

/// Same-floor mode iff both endpoints sit in leaves with the same level.
fn floor_constraint(graph: &AreaGraph, start: &Pose2D, goal: &Pose2D) -> FloorConstraint {
    let leaf_level = |p: &Pose2D| {
        graph
            .locate_leaf_id(p.position(), &p.level)
            .ok()
            .and_then(|a| graph.area(a).level.clone())
    };
    match (leaf_level(start), leaf_level(goal)) {
        (Some(a), Some(b)) if a == b && !a.is_empty() => FloorConstraint::SameFloor(a),
        _ => FloorConstraint::Unconstrained,
    }
}

fn hierarchical(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    start: &Pose2D,
    goal: &Pose2D,
    config: &PlannerConfig,
) -> Result<PlanResult, Failure> {
    let t_attach = Instant::now();
    let s = inject_virtual_passage(graph, pg, cache, start, &start.level)?;
    let g = inject_virtual_passage(graph, pg, cache, goal, &goal.level)?;
    let (a_s, a_g) = (s.leaf, g.leaf);
    let a_c = graph.lca_id(a_s, a_g).ok_or(Failure::Invalid)?;
    let phi = match (&graph.area(a_s).level, &graph.area(a_g).level) {
        (Some(x), Some(y)) if x == y && !x.is_empty() => FloorConstraint::SameFloor(x.clone()),
        _ => FloorConstraint::Unconstrained,
    };
    let floor = phi.level();
    let variant = cache.variant_index(floor).ok_or(Failure::Invalid)?;

    if a_s == a_g {
        return same_leaf(graph, pg, cache, &s, &g, phi, t_attach);
    }

    let mut settled = 0usize;
    let mut fs = attach(pg, cache, &s, Side::Start, floor, &mut settled);
    let mut fg = attach(pg, cache, &g, Side::Goal, floor, &mut settled);
    prune(&mut fs, config.frontier_top_k);
    prune(&mut fg, config.frontier_top_k);
    if fs.is_empty() || fg.is_empty() {
        return Err(Failure::Invalid);
    }
    let attach_us = micros(t_attach);

    let t_lift = Instant::now();
    let mut lifted = Vec::new();
    for (leaf, frontier) in [(a_s, &mut fs), (a_g, &mut fg)] {
        let mut x = leaf;
        let mut iterations = 0;
        while x != a_c && graph.parent(x) != Some(a_c) {
            iterations += 1;
            if iterations > graph.max_depth() + 1 {
                return Err(Failure::Invalid);
            }
            let p = graph.parent(x).ok_or(Failure::Invalid)?;
            *frontier = lift(graph, pg, cache, frontier, p, variant, &mut settled)?;
            prune(frontier, config.frontier_top_k);
            if frontier.is_empty() {
                return Err(Failure::Invalid);
            }
            lifted.push(graph.area(p).name.clone());
            x = p;
        }
    }
    let lift_us = micros(t_lift);

    let t_assemble = Instant::now();
    if cache.structure(a_c).is_none() {
        return Err(Failure::Invalid);
    }
    let mut sg: SearchGraph<QArc> = SearchGraph::new();
    cache.add_children(graph, pg, a_c, variant, &mut sg);
    for (i, f) in fs.iter().enumerate() {
        sg.add_arc(
            START,
            f.passage,
            f.cost,
            QArc::Frontier {
                side: Side::Start,
                idx: i as u32,
            },
        );
    }
    for (i, f) in fg.iter().enumerate() {
        sg.add_arc(
            f.passage,
            GOAL,
            f.cost,
            QArc::Frontier {
                side: Side::Goal,
                idx: i as u32,
            },
        );
    }
    let assemble_us = micros(t_assemble);

    let q = Query {
        graph,
        pg,
        cache,
        s: &s,
        g: &g,
        direct: None,
    };
    let t_astar = Instant::now();
    let goal_pos = g.position();
    let found = sg
        .astar(START, GOAL, |k| q.position(k).distance(goal_pos))
        .ok_or(Failure::Invalid)?;
    let astar_us = micros(t_astar);

    let t_expand = Instant::now();
    let mut steps: Vec<Step> = Vec::new();
    for arc in &found.labels {
        match *arc {
            QArc::Frontier {
                side: Side::Start,
                idx,
            } => {
                for a in &fs[idx as usize].arcs {
                    q.expand(*a, &mut steps);
                }
            }
            QArc::Frontier {
                side: Side::Goal,
                idx,
            } => {
                for a in fg[idx as usize].arcs.iter().rev() {
                    q.expand(a.reversed(), &mut steps);
                }
            }
            other => q.expand(other, &mut steps),
        }
    }
    let mut r = q.materialize("hier", &steps, found.cost);
    r.compact_passages = found
        .nodes
        .iter()
        .filter(|&&k| k != START && k != GOAL)
        .map(|&k| pg.vertices[k as usize].name.clone())
        .collect();
    r.closed_states = found.closed;
    r.frontier_states = settled;
    r.floor_constraint = phi;
    r.common_parent = Some(graph.area(a_c).name.clone());
    r.lifted_through = lifted;
    r.stage_times_us.attach_us = attach_us;
    r.stage_times_us.lift_us = lift_us;
    r.stage_times_us.assemble_us = assemble_us;
    r.stage_times_us.astar_us = astar_us;
    r.stage_times_us.expand_us = micros(t_expand);
    Ok(r)
}

fn same_leaf(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    s: &VirtualAttachment,
    g: &VirtualAttachment,
    phi: FloorConstraint,
    t_attach: Instant,
) -> Result<PlanResult, Failure> {
    let floor = phi.level();
    let direct = s.direct_to(graph, cache, g);
    let attach_us = micros(t_attach);
    let t_assemble = Instant::now();
    let mut sg: SearchGraph<QArc> = SearchGraph::new();
    cache.leaf_overlay(pg, s.leaf, floor, &mut sg);
    add_virtual(&mut sg, pg, s, Side::Start, floor);
    for (i, e) in g.edges.iter().enumerate() {
        if pg.on_floor(e.passage, floor) {
            let arc = QArc::Virtual {
                side: Side::Goal,
                idx: i as u32,
                outward: false,
            };
            sg.add_arc(e.passage, GOAL, e.weight, arc);
        }
    }
    if let Some(d) = &direct {
        sg.add_arc(START, GOAL, d.weight, QArc::Direct { forward: true });
    }
    let assemble_us = micros(t_assemble);
    let q = Query {
        graph,
        pg,
        cache,
        s,
        g,
        direct: direct.as_ref(),
    };
    let t_astar = Instant::now();
    let goal_pos = g.position();
    let found = sg
        .astar(START, GOAL, |k| q.position(k).distance(goal_pos))
        .ok_or(Failure::Invalid)?;
    let astar_us = micros(t_astar);
    let t_expand = Instant::now();
    let mut steps = Vec::new();
    for arc in &found.labels {
        q.expand(*arc, &mut steps);
    }
    let mut r = q.materialize("hier", &steps, found.cost);
    r.compact_passages = r.passages.clone();
    r.closed_states = found.closed;
    r.floor_constraint = phi;
    r.common_parent = Some(graph.area(s.leaf).name.clone());
    r.stage_times_us.attach_us = attach_us;
    r.stage_times_us.assemble_us = assemble_us;
    r.stage_times_us.astar_us = astar_us;
    r.stage_times_us.expand_us = micros(t_expand);
    Ok(r)
}

fn add_virtual(
    sg: &mut SearchGraph<QArc>,
    pg: &PassageGraph,
    att: &VirtualAttachment,
    side: Side,
    floor: Option<&str>,
) {
    for (i, e) in att.edges.iter().enumerate() {
        if pg.on_floor(e.passage, floor) {
            let arc = QArc::Virtual {
                side,
                idx: i as u32,
                outward: true,
            };
            sg.add_arc(key(side), e.passage, e.weight, arc);
        }
    }
}

/// Dijkstra from the pose over its leaf's compact graph; labels every
/// resident passage on the allowed floor.
fn attach(
    pg: &PassageGraph,
    cache: &HierCache,
    att: &VirtualAttachment,
    side: Side,
    floor: Option<&str>,
    settled: &mut usize,
) -> Frontier {
    let mut sg: SearchGraph<QArc> = SearchGraph::new();
    cache.leaf_overlay(pg, att.leaf, floor, &mut sg);
    add_virtual(&mut sg, pg, att, side, floor);
    let sp = sg.dijkstra(&[(key(side), 0.0)]);
    *settled += sp.settled;
    let mut out = Vec::new();
    let Some(leaf) = cache.leaf(att.leaf) else {
        return out;
    };
    let mut seen = Vec::new();
    for &p in &leaf.passages {
        if seen.contains(&p) || !pg.on_floor(p, floor) {
            continue;
        }
        seen.push(p);
        if let (Some(cost), Some((_, arcs))) = (sg.distance(&sp, p), sg.path_to(&sp, p)) {
            out.push(FrontierEntry {
                passage: p,
                cost,
                arcs,
            });
        }
    }
    out
}

/// Multi-source Dijkstra seeded by `frontier` over the overlay of `parent`;
/// returns labels on the parent's boundary passages.
fn lift(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    frontier: &Frontier,
    parent: AreaId,
    variant: u16,
    settled: &mut usize,
) -> Result<Frontier, Failure> {
    let summary = cache.summary(parent, variant).ok_or(Failure::Invalid)?;
    let mut sg: SearchGraph<QArc> = cache.overlay(graph, pg, parent, variant);
    let mut by_passage: HashMap<u32, usize> = HashMap::new();
    let mut seeds = Vec::with_capacity(frontier.len());
    for (i, f) in frontier.iter().enumerate() {
        sg.node(f.passage);
        by_passage.insert(f.passage, i);
        seeds.push((f.passage, f.cost));
    }
    let sp = sg.dijkstra(&seeds);
    *settled += sp.settled;
    let mut out = Vec::new();
    for &b in &summary.boundary {
        let (Some(cost), Some((origin, labels))) = (sg.distance(&sp, b), sg.path_to(&sp, b)) else {
            continue;
        };
        let seed = &frontier[by_passage[&origin]];
        let mut arcs = seed.arcs.clone();
        arcs.extend(labels);
        out.push(FrontierEntry {
            passage: b,
            cost,
            arcs,
        });
    }
    Ok(out)
}

fn prune(frontier: &mut Frontier, k: Option<usize>) {
    if let Some(k) = k {
        frontier.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(a.passage.cmp(&b.passage)));
        frontier.truncate(k);
    }
}
