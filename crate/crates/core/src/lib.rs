//! Hierarchical semantic-topometric navigation over osmAG vector maps.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: parse, validate and serialize osmAG maps (OSM XML).
//! - [`raster`]: vector-to-occupancy rasterization, rolling windows, grid A*.
//! - [`graph`]: the passage-centric base graph and the hierarchical caches.
//! - [`planner`]: flat passage A* and attach/lift/common-parent planning.
//! - [`exec`]: segmented mission execution with window-bounded goals.
//! - [`loc`]: structure-based 2D LiDAR tracking and relocalization.
//! - [`bench`]: synthetic campus generation and planner benchmarks.
//! - [`cli`]: the `navbench` command line.

pub mod bench;
pub mod cli;
pub mod exec;
pub mod geometry;
pub mod graph;
pub mod loc;
pub mod model;
pub mod planner;
pub mod raster;

pub use geometry::{Point2D, Pose2D};
pub use model::{parse_osmag, validate, write_osmag, AreaGraph};
