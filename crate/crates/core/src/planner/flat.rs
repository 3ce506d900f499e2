use super::{micros, FloorConstraint, PlanError, PlanResult, QArc, Query, Side, GOAL, START};
use crate::geometry::Pose2D;
use crate::graph::{inject_virtual_passage, HierCache, Hop, PassageGraph};
use crate::model::AreaGraph;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

/// Flat passage A* over the whole graph, no floor restriction.
pub fn plan_flat(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    start: &Pose2D,
    goal: &Pose2D,
) -> Result<PlanResult, PlanError> {
    plan_flat_with(
        graph,
        pg,
        cache,
        start,
        goal,
        &FloorConstraint::Unconstrained,
    )
}

/// Flat passage A*, optionally restricted to passages on one floor.
pub fn plan_flat_with(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    start: &Pose2D,
    goal: &Pose2D,
    floor: &FloorConstraint,
) -> Result<PlanResult, PlanError> {
    let t0 = Instant::now();
    let s = inject_virtual_passage(graph, pg, cache, start, &start.level)?;
    let g = inject_virtual_passage(graph, pg, cache, goal, &goal.level)?;
    let direct = s.direct_to(graph, cache, &g);
    let attach_us = micros(t0);
    let q = Query {
        graph,
        pg,
        cache,
        s: &s,
        g: &g,
        direct: direct.as_ref(),
    };
    let t1 = Instant::now();
    let found = flat_astar(&q, floor.level()).ok_or(PlanError::NoRoute)?;
    let astar_us = micros(t1);
    let t2 = Instant::now();
    let mut steps = Vec::new();
    for arc in &found.arcs {
        q.expand(*arc, &mut steps);
    }
    let mut r = q.materialize("flat", &steps, found.cost);
    r.compact_passages = r.passages.clone();
    r.closed_states = found.closed;
    r.floor_constraint = floor.clone();
    r.stage_times_us.attach_us = attach_us;
    r.stage_times_us.astar_us = astar_us;
    r.stage_times_us.expand_us = micros(t2);
    r.stage_times_us.total_us = micros(t0);
    Ok(r)
}

pub(crate) struct FlatFound {
    pub cost: f64,
    pub arcs: Vec<QArc>,
    pub closed: usize,
}

struct Entry {
    f: f64,
    g: f64,
    slot: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.total_cmp(&other.g))
            .then(other.slot.cmp(&self.slot))
    }
}

/// A* over passages plus the two injected poses, with the Euclidean
/// distance to the goal as heuristic. Slots `0..n` are passages, `n` is the
/// start pose and `n + 1` the goal pose.
pub(crate) fn flat_astar(q: &Query<'_>, floor: Option<&str>) -> Option<FlatFound> {
    let pg = q.pg;
    let n = pg.vertex_count();
    let (ss, gs) = (n, n + 1);
    let key = |slot: usize| -> u32 {
        if slot == ss {
            START
        } else if slot == gs {
            GOAL
        } else {
            slot as u32
        }
    };
    let goal_pos = q.g.position();
    let h = |slot: usize| q.position(key(slot)).distance(goal_pos);

    // passage -> virtual edge index toward the goal
    let mut to_goal: Vec<Option<u32>> = vec![None; n];
    for (i, e) in q.g.edges.iter().enumerate() {
        if pg.on_floor(e.passage, floor) {
            to_goal[e.passage as usize] = Some(i as u32);
        }
    }

    let mut dist = vec![f64::INFINITY; n + 2];
    let mut parent: Vec<Option<(usize, QArc)>> = vec![None; n + 2];
    let mut closed = vec![false; n + 2];
    let mut heap = BinaryHeap::new();
    dist[ss] = 0.0;
    heap.push(Entry {
        f: h(ss),
        g: 0.0,
        slot: ss,
    });
    let mut closed_count = 0;
    let mut nbrs: Vec<(usize, f64, QArc)> = Vec::new();

    while let Some(Entry { g, slot, .. }) = heap.pop() {
        if closed[slot] || g > dist[slot] {
            continue;
        }
        closed[slot] = true;
        closed_count += 1;
        if slot == gs {
            let mut arcs = Vec::new();
            let mut cur = gs;
            while let Some((p, a)) = parent[cur] {
                arcs.push(a);
                cur = p;
            }
            arcs.reverse();
            return Some(FlatFound {
                cost: g,
                arcs,
                closed: closed_count,
            });
        }
        nbrs.clear();
        if slot == ss {
            for (i, e) in q.s.edges.iter().enumerate() {
                if pg.on_floor(e.passage, floor) {
                    nbrs.push((
                        e.passage as usize,
                        e.weight,
                        QArc::Virtual {
                            side: Side::Start,
                            idx: i as u32,
                            outward: true,
                        },
                    ));
                }
            }
            if let Some(d) = q.direct {
                nbrs.push((gs, d.weight, QArc::Direct { forward: true }));
            }
        } else {
            let v = slot as u32;
            for &e in pg.incident(v) {
                let edge = &pg.edges[e as usize];
                let other = edge.other(v);
                if !pg.on_floor(other, floor) {
                    continue;
                }
                nbrs.push((
                    other as usize,
                    edge.weight,
                    QArc::Hop(Hop::Base {
                        edge: e,
                        forward: edge.a == v,
                    }),
                ));
            }
            if let Some(i) = to_goal[slot] {
                nbrs.push((
                    gs,
                    q.g.edges[i as usize].weight,
                    QArc::Virtual {
                        side: Side::Goal,
                        idx: i,
                        outward: false,
                    },
                ));
            }
        }
        for &(to, w, arc) in &nbrs {
            if closed[to] {
                continue;
            }
            let nd = g + w;
            if nd < dist[to] {
                dist[to] = nd;
                parent[to] = Some((slot, arc));
                heap.push(Entry {
                    f: nd + h(to),
                    g: nd,
                    slot: to,
                });
            }
        }
    }
    None
}
