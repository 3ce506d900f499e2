use super::search::SearchGraph;
use super::{variant_levels, BaseGraphParams, Hop, PassageGraph};
use crate::model::{AreaGraph, AreaId};
use crate::raster::{rasterize_leaf, OccupancyRaster};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

/// Cached data for a leaf area: its resident passages, the base edges
/// crossing it (its compact graph) and its edge-costing raster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafCache {
    pub area: u32,
    pub passages: Vec<u32>,
    pub edges: Vec<u32>,
    /// Rebuilt on load; not serialized.
    #[serde(skip)]
    pub raster: Option<OccupancyRaster>,
}

/// Shortest route between two boundary passages inside a structure area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEdge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
    /// Hops one level down, from `a` to `b`.
    pub via: Vec<Hop>,
}

/// All-pairs summary of one structure area under one floor restriction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryGraph {
    pub floor: Option<String>,
    pub boundary: Vec<u32>,
    pub edges: Vec<SummaryEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureCache {
    pub area: u32,
    pub name: String,
    /// Passages with exactly one incident area inside this subtree.
    pub boundary: Vec<u32>,
    /// One summary per entry of [`HierCache::variant_levels`].
    pub variants: Vec<SummaryGraph>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierCache {
    /// Index 0 is the unrestricted variant, the rest are same-floor levels.
    pub variant_levels: Vec<Option<String>>,
    pub leaves: Vec<Option<LeafCache>>,
    pub structures: Vec<Option<StructureCache>>,
    pub params: BaseGraphParams,
    pub build_ms: f64,
}

impl HierCache {
    pub fn variant_index(&self, floor: Option<&str>) -> Option<u16> {
        self.variant_levels
            .iter()
            .position(|v| v.as_deref() == floor)
            .map(|i| i as u16)
    }

    pub fn leaf(&self, area: AreaId) -> Option<&LeafCache> {
        self.leaves.get(area.index()).and_then(Option::as_ref)
    }

    pub fn structure(&self, area: AreaId) -> Option<&StructureCache> {
        self.structures.get(area.index()).and_then(Option::as_ref)
    }

    pub fn summary(&self, area: AreaId, variant: u16) -> Option<&SummaryGraph> {
        self.structure(area).map(|s| &s.variants[variant as usize])
    }

    /// Edge-costing raster of a leaf, rebuilt when missing (e.g. after
    /// loading from disk).
    pub fn leaf_raster(
        &self,
        graph: &AreaGraph,
        area: AreaId,
    ) -> Option<std::borrow::Cow<'_, OccupancyRaster>> {
        match self.leaf(area).and_then(|l| l.raster.as_ref()) {
            Some(r) => Some(std::borrow::Cow::Borrowed(r)),
            None => rasterize_leaf(graph, area, self.params.leaf_resolution)
                .ok()
                .map(std::borrow::Cow::Owned),
        }
    }

    /// Rebuilds all leaf rasters in place.
    pub fn rebuild_rasters(&mut self, graph: &AreaGraph) {
        let res = self.params.leaf_resolution;
        self.leaves.par_iter_mut().flatten().for_each(|l| {
            l.raster = rasterize_leaf(graph, AreaId(l.area), res).ok();
        });
    }

    /// Compact graph of a leaf under a floor restriction: its base edges,
    /// in both directions.
    pub fn leaf_overlay<L: Clone + From<Hop>>(
        &self,
        pg: &PassageGraph,
        area: AreaId,
        floor: Option<&str>,
        out: &mut SearchGraph<L>,
    ) {
        let Some(l) = self.leaf(area) else { return };
        for &e in &l.edges {
            let edge = &pg.edges[e as usize];
            if !(pg.on_floor(edge.a, floor) && pg.on_floor(edge.b, floor)) {
                continue;
            }
            out.add_arc(
                edge.a,
                edge.b,
                edge.weight,
                Hop::Base {
                    edge: e,
                    forward: true,
                }
                .into(),
            );
            out.add_arc(
                edge.b,
                edge.a,
                edge.weight,
                Hop::Base {
                    edge: e,
                    forward: false,
                }
                .into(),
            );
        }
    }

    /// Union of the children's compact graphs and summaries of `area`.
    pub fn overlay<L: Clone + From<Hop>>(
        &self,
        graph: &AreaGraph,
        pg: &PassageGraph,
        area: AreaId,
        variant: u16,
    ) -> SearchGraph<L> {
        let mut g = SearchGraph::new();
        self.add_children(graph, pg, area, variant, &mut g);
        g
    }

    pub fn add_children<L: Clone + From<Hop>>(
        &self,
        graph: &AreaGraph,
        pg: &PassageGraph,
        area: AreaId,
        variant: u16,
        out: &mut SearchGraph<L>,
    ) {
        let floor = self.variant_levels[variant as usize].as_deref();
        for &c in graph.children(area) {
            if graph.is_leaf(c) {
                self.leaf_overlay(pg, c, floor, out);
            } else if let Some(s) = self.structure(c) {
                for (i, e) in s.variants[variant as usize].edges.iter().enumerate() {
                    let hop = Hop::Summary {
                        area: c.0,
                        variant,
                        edge: i as u32,
                        forward: true,
                    };
                    out.add_arc(e.a, e.b, e.weight, hop.into());
                    out.add_arc(e.b, e.a, e.weight, hop.reversed().into());
                }
            }
        }
    }
}

/// Builds leaf compact graphs (with rasters) and, bottom-up, the summaries
/// of every non-leaf area for every floor variant.
pub fn build_caches(graph: &AreaGraph, pg: &PassageGraph, params: &BaseGraphParams) -> HierCache {
    let t0 = Instant::now();
    let n = graph.areas.len();
    let mut by_area: HashMap<&str, Vec<u32>> = HashMap::new();
    for (i, e) in pg.edges.iter().enumerate() {
        by_area
            .entry(e.through_area.as_str())
            .or_default()
            .push(i as u32);
    }
    let leaves: Vec<Option<LeafCache>> = graph
        .area_ids()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&a| {
            graph.is_leaf(a).then(|| LeafCache {
                area: a.0,
                passages: graph.resident_passages(a).iter().map(|p| p.0).collect(),
                edges: by_area
                    .get(graph.area(a).name.as_str())
                    .cloned()
                    .unwrap_or_default(),
                raster: rasterize_leaf(graph, a, params.leaf_resolution).ok(),
            })
        })
        .collect();

    let mut cache = HierCache {
        variant_levels: variant_levels(graph),
        leaves,
        structures: vec![None; n],
        params: params.clone(),
        build_ms: 0.0,
    };

    // children before parents
    let mut composites: Vec<AreaId> = graph.area_ids().filter(|&a| !graph.is_leaf(a)).collect();
    let depth: Vec<usize> = graph.area_ids().map(|a| graph.depth(a)).collect();
    let max_depth = composites
        .iter()
        .map(|a| depth[a.index()])
        .max()
        .unwrap_or(0);
    composites.sort_by_key(|a| a.0);
    for d in (0..=max_depth).rev() {
        let layer: Vec<AreaId> = composites
            .iter()
            .copied()
            .filter(|a| depth[a.index()] == d)
            .collect();
        let built: Vec<StructureCache> = layer
            .par_iter()
            .map(|&a| build_structure(graph, pg, &cache, a))
            .collect();
        for s in built {
            let idx = s.area as usize;
            cache.structures[idx] = Some(s);
        }
    }
    cache.build_ms = t0.elapsed().as_secs_f64() * 1e3;
    cache
}

fn subtree_mask(graph: &AreaGraph, root: AreaId) -> Vec<bool> {
    let mut mask = vec![false; graph.areas.len()];
    let mut stack = vec![root];
    while let Some(a) = stack.pop() {
        if mask[a.index()] {
            continue;
        }
        mask[a.index()] = true;
        stack.extend_from_slice(graph.children(a));
    }
    mask
}

fn build_structure(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    area: AreaId,
) -> StructureCache {
    let mask = subtree_mask(graph, area);
    let boundary: Vec<u32> = graph
        .passage_ids()
        .filter(|&p| match graph.passage_areas(p) {
            [Some(f), Some(t)] => mask[f.index()] != mask[t.index()],
            _ => false,
        })
        .map(|p| p.0)
        .collect();

    let variants = (0..cache.variant_levels.len())
        .map(|v| {
            let floor = cache.variant_levels[v].clone();
            let bnd: Vec<u32> = boundary
                .iter()
                .copied()
                .filter(|&p| pg.on_floor(p, floor.as_deref()))
                .collect();
            let overlay: SearchGraph<Hop> = cache.overlay(graph, pg, area, v as u16);
            let mut edges = Vec::new();
            for (i, &a) in bnd.iter().enumerate() {
                if overlay.slot(a).is_none() {
                    continue;
                }
                let sp = overlay.dijkstra(&[(a, 0.0)]);
                for &b in &bnd[i + 1..] {
                    if let (Some(w), Some((_, via))) =
                        (overlay.distance(&sp, b), overlay.path_to(&sp, b))
                    {
                        edges.push(SummaryEdge {
                            a,
                            b,
                            weight: w,
                            via,
                        });
                    }
                }
            }
            SummaryGraph {
                floor,
                boundary: bnd,
                edges,
            }
        })
        .collect();

    StructureCache {
        area: area.0,
        name: graph.area(area).name.clone(),
        boundary,
        variants,
    }
}
