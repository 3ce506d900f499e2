//! Passage-centric navigation graph and its hierarchical summaries.
//!
//! Vertices are passages (doors, openings, elevator doors); an edge connects
//! two passages of the same leaf area and is weighted by the raster traversal
//! cost through that area. [`HierCache`] condenses every structure area into
//! shortest-path summaries between the passages on its boundary.

mod base;
mod cache;
mod inject;
pub mod search;
mod store;

pub use base::{build_base_graph, raster_connect, AreaFailure, BaseGraphParams, BuildReport};
pub use cache::{build_caches, HierCache, LeafCache, StructureCache, SummaryEdge, SummaryGraph};
pub use inject::{inject_virtual_passage, VirtualAttachment, VirtualEdge};
pub use store::{content_hash, load_cache_file, save_cache_file, CacheFile, CACHE_FORMAT_VERSION};

use crate::geometry::Point2D;
use crate::model::{AreaGraph, ModelError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("could not attach to any passage of `{0}`")]
    AttachFailed(String),
    #[error("cache file: {0}")]
    CacheIo(String),
    #[error("cache file was built from a different map (expected {expected}, found {found})")]
    HashMismatch { expected: String, found: String },
    #[error("unsupported cache format version {0}")]
    UnsupportedVersion(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Raster,
    Vertical,
    EuclideanFallback,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageVertex {
    pub name: String,
    /// Arclength midpoint of the passage polyline.
    pub position: Point2D,
    pub level: Option<String>,
    pub areas: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageEdge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
    /// Leaf area the edge crosses.
    pub through_area: String,
    pub kind: EdgeKind,
    /// World polyline oriented from `a` to `b`.
    pub trace: Vec<Point2D>,
}

impl PassageEdge {
    pub fn other(&self, v: u32) -> u32 {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Undirected passage graph; vertex `i` is passage `PassageId(i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageGraph {
    pub vertices: Vec<PassageVertex>,
    pub edges: Vec<PassageEdge>,
    adjacency: Vec<Vec<u32>>,
}

impl PassageGraph {
    pub fn new(vertices: Vec<PassageVertex>, edges: Vec<PassageEdge>) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.a as usize].push(i as u32);
            if e.b != e.a {
                adjacency[e.b as usize].push(i as u32);
            }
        }
        Self {
            vertices,
            edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<u32> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .map(|i| i as u32)
    }

    /// Incident edge ids of `v`.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    pub fn position(&self, v: u32) -> Point2D {
        self.vertices[v as usize].position
    }

    /// Whether passage `v` may be used under a same-floor restriction.
    /// Passages without a level label are usable on every floor.
    pub fn on_floor(&self, v: u32, floor: Option<&str>) -> bool {
        match (floor, self.vertices[v as usize].level.as_deref()) {
            (None, _) | (_, None) => true,
            (Some(f), Some(l)) => f == l,
        }
    }

    /// Edge ids crossing `area`.
    pub fn edges_through<'a>(&'a self, area: &'a str) -> impl Iterator<Item = u32> + 'a {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.through_area == area)
            .map(|(i, _)| i as u32)
    }
}

/// One step of a summarized route, resolvable down to base edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hop {
    /// Base edge traversed from `a` to `b` when `forward`.
    Base { edge: u32, forward: bool },
    /// Summary edge of a structure area's variant, traversed from its `a`
    /// end when `forward`.
    Summary {
        area: u32,
        variant: u16,
        edge: u32,
        forward: bool,
    },
}

impl Hop {
    pub fn reversed(self) -> Hop {
        match self {
            Hop::Base { edge, forward } => Hop::Base {
                edge,
                forward: !forward,
            },
            Hop::Summary {
                area,
                variant,
                edge,
                forward,
            } => Hop::Summary {
                area,
                variant,
                edge,
                forward: !forward,
            },
        }
    }
}

/// A base edge as traversed along a route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Traversal {
    pub edge: u32,
    pub forward: bool,
}

impl HierCache {
    /// Resolves a hop into its base-edge traversals, in travel order.
    pub fn expand_hop(&self, hop: Hop, out: &mut Vec<Traversal>) {
        match hop {
            Hop::Base { edge, forward } => out.push(Traversal { edge, forward }),
            Hop::Summary {
                area,
                variant,
                edge,
                forward,
            } => {
                let s = self.structures[area as usize]
                    .as_ref()
                    .expect("summary hop references a structure area");
                let e = &s.variants[variant as usize].edges[edge as usize];
                if forward {
                    for h in &e.via {
                        self.expand_hop(*h, out);
                    }
                } else {
                    for h in e.via.iter().rev() {
                        self.expand_hop(h.reversed(), out);
                    }
                }
            }
        }
    }
}

/// Same-floor variant key: `None` is unrestricted.
pub fn variant_levels(graph: &AreaGraph) -> Vec<Option<String>> {
    std::iter::once(None)
        .chain(graph.levels().into_iter().map(Some))
        .collect()
}
