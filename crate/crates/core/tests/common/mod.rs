#![allow(dead_code)]

use osmag_nav::bench::{generate_synthetic_campus, CampusSpec};
use osmag_nav::geometry::Point2D;
use osmag_nav::graph::{
    build_base_graph, build_caches, BaseGraphParams, HierCache, PassageEdge, PassageGraph,
};
use osmag_nav::model::AreaGraph;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

pub const CAMPUS_SEED: u64 = 7;

pub struct Built {
    pub graph: AreaGraph,
    pub pg: PassageGraph,
    pub cache: HierCache,
}

pub fn build(graph: AreaGraph) -> Built {
    let params = BaseGraphParams::default();
    let (pg, report) = build_base_graph(&graph, &params);
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    let cache = build_caches(&graph, &pg, &params);
    Built { graph, pg, cache }
}

/// Default three-floor campus, built once per test binary.
pub fn campus() -> &'static Built {
    static CAMPUS: OnceLock<Built> = OnceLock::new();
    CAMPUS.get_or_init(|| {
        let c = generate_synthetic_campus(CAMPUS_SEED, &CampusSpec::default()).expect("campus");
        build(c.graph)
    })
}

pub fn small_campus(rooms: usize) -> Built {
    let c = generate_synthetic_campus(CAMPUS_SEED, &CampusSpec::small(rooms)).expect("campus");
    build(c.graph)
}

pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point2D> {
    vec![
        Point2D::new(x0, y0),
        Point2D::new(x1, y0),
        Point2D::new(x1, y1),
        Point2D::new(x0, y1),
    ]
}

/// Plain Dijkstra over the base edges accepted by `allow`. Independent of
/// the crate's search code.
pub fn oracle_dijkstra(
    pg: &PassageGraph,
    source: u32,
    allow: impl Fn(&PassageEdge) -> bool,
) -> Vec<f64> {
    let n = pg.vertex_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in pg.edges.iter().filter(|e| allow(e)) {
        adj[e.a as usize].push((e.b as usize, e.weight));
        adj[e.b as usize].push((e.a as usize, e.weight));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(Reverse((Ordered(0.0), source as usize)));
    while let Some(Reverse((Ordered(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, c) in &adj[v] {
            if d + c < dist[w] {
                dist[w] = d + c;
                heap.push(Reverse((Ordered(d + c), w)));
            }
        }
    }
    dist
}

#[derive(Clone, Copy, PartialEq)]
struct Ordered(f64);
impl Eq for Ordered {}
impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
