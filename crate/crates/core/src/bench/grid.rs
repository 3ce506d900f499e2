use super::BenchError;
use crate::geometry::{polyline_length, Point2D, Pose2D};
use crate::model::AreaGraph;
use crate::planner::{FloorConstraint, PlanResult, StageTimes};
use crate::raster::{grid_astar, rasterize_floor, OccupancyRaster};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::time::Instant;

/// Start/goal cells may snap this many cells to the nearest free cell.
const SNAP_CELLS: i64 = 3;

/// Monolithic per-floor occupancy grids for the grid A* baseline.
pub struct GridBaseline {
    pub resolution: f64,
    pub floors: BTreeMap<String, OccupancyRaster>,
    pub build_ms: f64,
}

impl GridBaseline {
    /// Rasterizes every floor of the map at `resolution`.
    pub fn new(graph: &AreaGraph, resolution: f64) -> Result<Self, BenchError> {
        let t0 = Instant::now();
        let floors = graph
            .levels()
            .into_par_iter()
            .map(|l| rasterize_floor(graph, &l, resolution).map(|r| (l, r)))
            .collect::<Result<BTreeMap<_, _>, _>>()
            .map_err(|e| BenchError::Raster(e.to_string()))?;
        Ok(Self {
            resolution,
            floors,
            build_ms: t0.elapsed().as_secs_f64() * 1e3,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.floors.values().map(OccupancyRaster::len).sum()
    }

    /// Grid A* between two poses on the same floor.
    pub fn plan(&self, start: &Pose2D, goal: &Pose2D) -> Result<PlanResult, BenchError> {
        if start.level != goal.level {
            return Err(BenchError::CrossFloorUnsupported);
        }
        let t0 = Instant::now();
        let raster = self
            .floors
            .get(&start.level)
            .ok_or_else(|| BenchError::Raster(format!("no floor `{}`", start.level)))?;
        grid_plan(raster, start, goal, t0)
    }
}

fn grid_plan(
    raster: &OccupancyRaster,
    start: &Pose2D,
    goal: &Pose2D,
    t0: Instant,
) -> Result<PlanResult, BenchError> {
    let (a, b) = (start.position(), goal.position());
    let ca = raster
        .nearest_free(a, SNAP_CELLS)
        .ok_or(BenchError::NoPath)?;
    let cb = raster
        .nearest_free(b, SNAP_CELLS)
        .ok_or(BenchError::NoPath)?;
    let t1 = Instant::now();
    let path = grid_astar(raster, ca, cb).map_err(|_| BenchError::NoPath)?;
    let astar_us = t1.elapsed().as_secs_f64() * 1e6;
    let (pa, pb) = (raster.cell_center(ca), raster.cell_center(cb));
    let mut dense: Vec<Point2D> = Vec::with_capacity(path.cells.len() + 2);
    dense.push(a);
    dense.extend(path.cells.iter().map(|c| raster.cell_center(*c)));
    dense.push(b);
    Ok(PlanResult {
        planner: "grid".into(),
        start: start.clone(),
        goal: goal.clone(),
        passages: Vec::new(),
        compact_passages: Vec::new(),
        dense_path: dense,
        cost: a.distance(pa) + path.cost + pb.distance(b),
        steps: Vec::new(),
        closed_states: path.closed_states,
        frontier_states: 0,
        stage_times_us: StageTimes {
            astar_us,
            total_us: t0.elapsed().as_secs_f64() * 1e6,
            ..Default::default()
        },
        used_fallback: false,
        floor_constraint: FloorConstraint::SameFloor(start.level.clone()),
        floor_transitions: Vec::new(),
        common_parent: None,
        lifted_through: Vec::new(),
    })
}

/// One-shot grid A*: rasterizes the whole floor at `resolution`, then
/// searches it. The rasterization is part of the reported total time.
pub fn grid_astar_baseline(
    graph: &AreaGraph,
    start: &Pose2D,
    goal: &Pose2D,
    resolution: f64,
) -> Result<PlanResult, BenchError> {
    if start.level != goal.level {
        return Err(BenchError::CrossFloorUnsupported);
    }
    let t0 = Instant::now();
    let raster = rasterize_floor(graph, &start.level, resolution)
        .map_err(|e| BenchError::Raster(e.to_string()))?;
    grid_plan(&raster, start, goal, t0)
}

/// Arclength of a result's dense path.
pub fn path_length(r: &PlanResult) -> f64 {
    polyline_length(&r.dense_path)
}
