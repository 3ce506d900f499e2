//! Occupancy rasters derived from vector areas.
//!
//! All rasters live on a global lattice: cell `(i, j)` of the world covers
//! `[i*res, (i+1)*res) x [j*res, (j+1)*res)`. A raster is a rectangular window
//! onto that lattice, so two rasters at the same resolution agree cell-for-cell
//! wherever they overlap.

mod astar;
mod paint;
mod pgm;

pub use astar::{grid_astar, GridPath};
pub use paint::{
    rasterize_areas, rasterize_floor, rasterize_leaf, rolling_window, RollingWindow, WindowFrame,
};
pub use pgm::{export_pgm, export_yaml, PGM_FREE, PGM_OCCUPIED, PGM_UNKNOWN};

use crate::geometry::{Bounds, Point2D};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Leaf-area resolution used for passage edge costing.
pub const LEAF_RESOLUTION_M: f64 = 0.1;
/// Default rolling-window resolution.
pub const WINDOW_RESOLUTION_M: f64 = 0.05;
/// Default rolling-window side length.
pub const WINDOW_SIZE_M: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("area `{0}` cannot be rasterized")]
    DegenerateArea(String),
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("cell ({0}, {1}) is outside the raster")]
    OutOfBounds(i64, i64),
    #[error("no path between cells")]
    NoPath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Cell {
    Free,
    Occupied,
    Unknown,
}

/// Column/row address inside one raster; row 0 is the bottom row.
pub type CellIndex = (usize, usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyRaster {
    /// World position of the lower-left corner of cell (0, 0).
    pub origin: Point2D,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Cell>,
    pub level: String,
    /// Lattice index of cell (0, 0).
    pub origin_index: (i64, i64),
}

impl OccupancyRaster {
    pub fn new(
        origin_index: (i64, i64),
        width: usize,
        height: usize,
        resolution: f64,
        level: impl Into<String>,
        fill: Cell,
    ) -> Self {
        Self {
            origin: Point2D::new(
                origin_index.0 as f64 * resolution,
                origin_index.1 as f64 * resolution,
            ),
            resolution,
            width,
            height,
            cells: vec![fill; width * height],
            level: level.into(),
            origin_index,
        }
    }

    /// Smallest lattice-aligned raster covering `b`, plus `margin` cells.
    pub fn covering(b: &Bounds, resolution: f64, margin: i64, level: &str, fill: Cell) -> Self {
        let ix0 = (b.min.x / resolution).floor() as i64 - margin;
        let iy0 = (b.min.y / resolution).floor() as i64 - margin;
        let ix1 = (b.max.x / resolution).ceil() as i64 + margin;
        let iy1 = (b.max.y / resolution).ceil() as i64 + margin;
        let w = (ix1 - ix0).max(1) as usize;
        let h = (iy1 - iy0).max(1) as usize;
        Self::new((ix0, iy0), w, h, resolution, level, fill)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, c: CellIndex) -> usize {
        c.1 * self.width + c.0
    }

    pub fn get(&self, c: CellIndex) -> Cell {
        self.cells[self.index(c)]
    }

    pub fn set(&mut self, c: CellIndex, v: Cell) {
        let i = self.index(c);
        self.cells[i] = v;
    }

    pub fn is_free(&self, c: CellIndex) -> bool {
        self.get(c) == Cell::Free
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// Global lattice index of the cell containing `p`.
    pub fn lattice_of(&self, p: Point2D) -> (i64, i64) {
        (
            (p.x / self.resolution).floor() as i64,
            (p.y / self.resolution).floor() as i64,
        )
    }

    /// Local cell from a global lattice index, if inside.
    pub fn local_of_lattice(&self, g: (i64, i64)) -> Option<CellIndex> {
        let x = g.0 - self.origin_index.0;
        let y = g.1 - self.origin_index.1;
        self.in_bounds(x, y).then_some((x as usize, y as usize))
    }

    pub fn cell_of(&self, p: Point2D) -> Option<CellIndex> {
        self.local_of_lattice(self.lattice_of(p))
    }

    pub fn cell_center(&self, c: CellIndex) -> Point2D {
        Point2D::new(
            (self.origin_index.0 + c.0 as i64) as f64 * self.resolution + 0.5 * self.resolution,
            (self.origin_index.1 + c.1 as i64) as f64 * self.resolution + 0.5 * self.resolution,
        )
    }

    pub fn world_bounds(&self) -> Bounds {
        Bounds {
            min: self.origin,
            max: Point2D::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        }
    }

    pub fn count(&self, v: Cell) -> usize {
        self.cells.iter().filter(|c| **c == v).count()
    }

    /// Nearest free cell to `p` (by cell-center distance) within `radius`
    /// cells of the cell containing `p`. Ties resolve to the lowest row, then
    /// column.
    pub fn nearest_free(&self, p: Point2D, radius: i64) -> Option<CellIndex> {
        let (gx, gy) = self.lattice_of(p);
        let cx = gx - self.origin_index.0;
        let cy = gy - self.origin_index.1;
        let mut best: Option<(f64, CellIndex)> = None;
        for y in (cy - radius)..=(cy + radius) {
            for x in (cx - radius)..=(cx + radius) {
                if !self.in_bounds(x, y) {
                    continue;
                }
                let c = (x as usize, y as usize);
                if !self.is_free(c) {
                    continue;
                }
                let d = self.cell_center(c).distance(p);
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, c));
                }
            }
        }
        best.map(|(_, c)| c)
    }
}
