//! Synthetic campus generation, the grid A* baseline, planner benchmarks,
//! the cache ablation and the storage report.

mod ablation;
mod campus;
mod grid;
mod queries;
mod run;
mod storage;

pub use ablation::{run_cache_ablation, AblationPair, AblationReport};
pub use campus::{generate_synthetic_campus, Campus, CampusManifest, CampusSpec};
pub use grid::{grid_astar_baseline, path_length, GridBaseline};
pub use queries::{
    generate_query_set, sample_pose, BenchQuery, QueryBucket, QuerySet, LONG_ROUTE_M, SHORT_ROUTE_M,
};
pub use run::{run_benchmark, BenchContext, BenchRecord, BenchReport, BucketSummary, Planner};
pub use storage::{
    storage_report, storage_report_at, FloorGrid, StorageReport, POINTCLOUD_BYTES_PER_POINT,
    POINTCLOUD_SPACING_M, STORAGE_GRID_RESOLUTION_M,
};

use crate::model::ModelError;
use crate::planner::PlanError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("infeasible campus spec: {0}")]
    SpecInfeasible(String),
    #[error("grid baseline does not route across floors")]
    CrossFloorUnsupported,
    #[error("no grid path between start and goal")]
    NoPath,
    #[error("raster: {0}")]
    Raster(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}
