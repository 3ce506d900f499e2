use super::BenchError;
use crate::model::{write_osmag, AreaGraph};
use crate::raster::{export_pgm, rasterize_floor, OccupancyRaster};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const STORAGE_GRID_RESOLUTION_M: f64 = 0.05;
/// Point spacing of the point-cloud estimate.
pub const POINTCLOUD_SPACING_M: f64 = 0.1;
/// x, y, z, intensity as f32.
pub const POINTCLOUD_BYTES_PER_POINT: f64 = 16.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorGrid {
    pub level: String,
    pub width: usize,
    pub height: usize,
    pub pgm_bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StorageReport {
    pub vector_bytes: usize,
    pub grid_resolution_m: f64,
    pub grid_bytes: usize,
    pub grids: Vec<FloorGrid>,
    /// Leaf-area free space summed over floors.
    pub free_area_m2: f64,
    pub pointcloud_estimate_bytes: f64,
    pub pointcloud_note: String,
    pub grid_ratio: f64,
    pub pointcloud_ratio: f64,
}

impl StorageReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        format!(
            "format                     bytes      ratio\n\
             osmAG vector        {:>12} {:>9.2}x\n\
             grid PGM @{:.2} m    {:>12} {:>9.2}x\n\
             point cloud (est.)  {:>12.0} {:>9.2}x\n",
            self.vector_bytes,
            1.0,
            self.grid_resolution_m,
            self.grid_bytes,
            self.grid_ratio,
            self.pointcloud_estimate_bytes,
            self.pointcloud_ratio
        )
    }
}

/// Serialized map size against one full-floor PGM per level at 0.05 m and
/// an analytic point-cloud estimate.
pub fn storage_report(graph: &AreaGraph) -> Result<StorageReport, BenchError> {
    storage_report_at(graph, STORAGE_GRID_RESOLUTION_M)
}

pub fn storage_report_at(graph: &AreaGraph, resolution: f64) -> Result<StorageReport, BenchError> {
    let vector_bytes = write_osmag(graph).len();
    let mut levels = graph.levels();
    if levels.is_empty() {
        levels.push(String::new());
    }
    let grids: Vec<FloorGrid> = levels
        .par_iter()
        .map(|l| {
            let r: OccupancyRaster = rasterize_floor(graph, l, resolution)
                .map_err(|e| BenchError::Raster(e.to_string()))?;
            Ok(FloorGrid {
                level: l.clone(),
                width: r.width,
                height: r.height,
                pgm_bytes: export_pgm(&r).len(),
            })
        })
        .collect::<Result<_, BenchError>>()?;
    let grid_bytes = grids.iter().map(|g| g.pgm_bytes).sum();
    let free_area_m2: f64 = graph.leaf_ids().map(|a| graph.area(a).polygon.area()).sum();
    let points = free_area_m2 / (POINTCLOUD_SPACING_M * POINTCLOUD_SPACING_M);
    let pointcloud_estimate_bytes = points * POINTCLOUD_BYTES_PER_POINT;
    Ok(StorageReport {
        vector_bytes,
        grid_resolution_m: resolution,
        grid_bytes,
        grids,
        free_area_m2,
        pointcloud_estimate_bytes,
        pointcloud_note: format!(
            "estimate: free area / {POINTCLOUD_SPACING_M}^2 points x {POINTCLOUD_BYTES_PER_POINT} bytes"
        ),
        grid_ratio: grid_bytes as f64 / vector_bytes as f64,
        pointcloud_ratio: pointcloud_estimate_bytes / vector_bytes as f64,
    })
}
