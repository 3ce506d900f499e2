use super::{EdgeKind, PassageEdge, PassageGraph, PassageVertex};
use crate::geometry::Point2D;
use crate::model::{AreaGraph, AreaId};
use crate::raster::{grid_astar, rasterize_leaf, OccupancyRaster, LEAF_RESOLUTION_M};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseGraphParams {
    pub leaf_resolution: f64,
    /// Fixed cost of a vertical transition (elevator/stairs).
    pub c_vert: f64,
    /// Passage centers snap to a free cell within this many cells.
    pub snap_radius_cells: i64,
    /// Connect with a straight segment when the raster search fails.
    pub euclidean_fallback: bool,
}

impl Default for BaseGraphParams {
    fn default() -> Self {
        Self {
            leaf_resolution: LEAF_RESOLUTION_M,
            c_vert: 15.0,
            snap_radius_cells: 3,
            euclidean_fallback: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaFailure {
    pub area: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BuildReport {
    pub vertices: usize,
    pub leaf_areas: usize,
    pub raster_edges: usize,
    pub vertical_edges: usize,
    pub fallback_edges: usize,
    pub skipped_same_interface: usize,
    pub failures: Vec<AreaFailure>,
    pub build_ms: f64,
}

/// Raster route between two world points: each point snaps to the nearest
/// free cell, the cells are joined by grid A*, and the snap legs are added.
/// The returned trace starts at `a` and ends at `b` exactly.
pub fn raster_connect(
    raster: &OccupancyRaster,
    a: Point2D,
    b: Point2D,
    snap_radius: i64,
) -> Option<(f64, Vec<Point2D>)> {
    let ca = raster.nearest_free(a, snap_radius)?;
    let cb = raster.nearest_free(b, snap_radius)?;
    let path = grid_astar(raster, ca, cb).ok()?;
    let pa = raster.cell_center(ca);
    let pb = raster.cell_center(cb);
    let weight = a.distance(pa) + path.cost + pb.distance(b);
    let mut trace = Vec::with_capacity(path.cells.len() + 2);
    trace.push(a);
    trace.extend(path.cells.iter().map(|c| raster.cell_center(*c)));
    trace.push(b);
    Some((weight, trace))
}

struct LeafEdges {
    edges: Vec<PassageEdge>,
    skipped: usize,
    failures: Vec<AreaFailure>,
}

/// Builds the base passage graph: one vertex per passage, and within every
/// leaf area one edge per pair of resident passages.
pub fn build_base_graph(
    graph: &AreaGraph,
    params: &BaseGraphParams,
) -> (PassageGraph, BuildReport) {
    let t0 = Instant::now();
    let vertices: Vec<PassageVertex> = graph
        .passages
        .iter()
        .map(|p| PassageVertex {
            name: p.name.clone(),
            position: p.center(),
            level: p.level.clone(),
            areas: [p.from_area.clone(), p.to_area.clone()],
        })
        .collect();

    let leaves: Vec<AreaId> = graph.leaf_ids().collect();
    let per_leaf: Vec<LeafEdges> = leaves
        .par_iter()
        .map(|&leaf| leaf_edges(graph, leaf, &vertices, params))
        .collect();

    let mut report = BuildReport {
        vertices: vertices.len(),
        leaf_areas: leaves.len(),
        ..Default::default()
    };
    let mut edges = Vec::new();
    for le in per_leaf {
        report.skipped_same_interface += le.skipped;
        report.failures.extend(le.failures);
        for e in le.edges {
            match e.kind {
                EdgeKind::Raster => report.raster_edges += 1,
                EdgeKind::Vertical => report.vertical_edges += 1,
                EdgeKind::EuclideanFallback => report.fallback_edges += 1,
            }
            edges.push(e);
        }
    }
    report.build_ms = t0.elapsed().as_secs_f64() * 1e3;
    (PassageGraph::new(vertices, edges), report)
}

fn incident_set(v: &PassageVertex) -> BTreeSet<&str> {
    v.areas.iter().map(String::as_str).collect()
}

fn leaf_edges(
    graph: &AreaGraph,
    leaf: AreaId,
    vertices: &[PassageVertex],
    params: &BaseGraphParams,
) -> LeafEdges {
    let area = graph.area(leaf);
    let mut resident: Vec<u32> = graph.resident_passages(leaf).iter().map(|p| p.0).collect();
    resident.dedup();
    let mut out = LeafEdges {
        edges: Vec::new(),
        skipped: 0,
        failures: Vec::new(),
    };
    if resident.len() < 2 {
        return out;
    }
    let vertical_area = area.area_type.is_vertical();
    let mut raster: Option<OccupancyRaster> = None;
    let mut raster_failed = false;

    for (i, &pa) in resident.iter().enumerate() {
        for &pb in &resident[i + 1..] {
            let (va, vb) = (&vertices[pa as usize], &vertices[pb as usize]);
            if incident_set(va) == incident_set(vb) {
                out.skipped += 1;
                continue;
            }
            let (a, b) = (va.position, vb.position);
            if vertical_area && va.level != vb.level {
                out.edges.push(PassageEdge {
                    a: pa,
                    b: pb,
                    weight: params.c_vert,
                    through_area: area.name.clone(),
                    kind: EdgeKind::Vertical,
                    trace: vec![a, b],
                });
                continue;
            }
            if raster.is_none() && !raster_failed {
                match rasterize_leaf(graph, leaf, params.leaf_resolution) {
                    Ok(r) => raster = Some(r),
                    Err(e) => {
                        raster_failed = true;
                        out.failures.push(AreaFailure {
                            area: area.name.clone(),
                            message: e.to_string(),
                        });
                    }
                }
            }
            let routed = raster
                .as_ref()
                .and_then(|r| raster_connect(r, a, b, params.snap_radius_cells));
            match routed {
                Some((weight, trace)) => out.edges.push(PassageEdge {
                    a: pa,
                    b: pb,
                    weight,
                    through_area: area.name.clone(),
                    kind: EdgeKind::Raster,
                    trace,
                }),
                None => {
                    if raster.is_some() {
                        out.failures.push(AreaFailure {
                            area: area.name.clone(),
                            message: format!(
                                "no raster route between `{}` and `{}`",
                                va.name, vb.name
                            ),
                        });
                    }
                    if params.euclidean_fallback {
                        out.edges.push(PassageEdge {
                            a: pa,
                            b: pb,
                            weight: a.distance(b),
                            through_area: area.name.clone(),
                            kind: EdgeKind::EuclideanFallback,
                            trace: vec![a, b],
                        });
                    }
                }
            }
        }
    }
    out
}
