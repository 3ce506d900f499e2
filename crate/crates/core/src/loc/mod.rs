//! Structure-based 2D LiDAR localization against the vector map.
//!
//! Scans are matched to the permanent walls of the map (leaf-area
//! boundaries minus passage openings). Returns that disagree with the
//! walls are gated out as clutter, the rest drive a damped point-to-line
//! ICP whose increments are step-limited. The ICP pose is fused with the
//! odometry prediction by a confidence weight.

pub mod fixtures;
mod icp;
mod odom;
mod reloc;
mod scan;
mod segments;
mod tracker;

pub use icp::{
    clutter_filter, corridorness, icp_track, point_to_line_objective, Correspondence,
    CorridorStats, IcpResult, IterationReport, Side,
};
pub use odom::{
    apply_motion, fuse_with_odometry, predict_from_odometry, relative_motion, FusionInput,
    OdomSample,
};
pub use reloc::{global_relocalize, Hypothesis, RelocConfig};
pub use scan::{
    beam_angles, simulate_scan, simulate_scan_on, Beam, BeamLabel, ClutterDisc, ScanFrame, ScanSpec,
};
pub use segments::{LocalMap, MapSegment, MapSegments};
pub use tracker::{ate, AteSummary, TrackStatus, TrackStep, Tracker};

use crate::geometry::Point2D;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LocError {
    #[error("pose ({0:.2}, {1:.2}) is not inside any area")]
    PoseOutsideMap(f64, f64),
    #[error(
        "ICP diverged: final pose jumped {translation:.2} m / {rotation:.2} rad from the prior"
    )]
    Diverged { translation: f64, rotation: f64 },
    #[error("only {0} usable correspondences")]
    TooFewCorrespondences(usize),
    #[error("no odometry within {0:.3} s of the scan")]
    StaleOdometry(f64),
    #[error("no pose hypothesis")]
    NoHypothesis,
}

/// Which weights enter the ICP normal equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Unit weight for every retained point.
    Off,
    RobustOnly,
    RobustTimesCorridor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Gate for returns in front of the expected wall.
    pub tau_in: f64,
    /// Gate for returns behind the expected wall.
    pub tau_out: f64,
    pub max_step_translation: f64,
    pub max_step_rotation: f64,
    pub corridor_bins: usize,
    /// Top-bin share above which a scan counts as corridor-like.
    pub corridor_dominance: f64,
    /// Dominant-direction points kept after downsampling.
    pub axial_cap: usize,
    pub corridor_downsample: bool,
    pub weighting: WeightMode,
    pub max_iterations: usize,
    /// Stop once both increment norms fall below this.
    pub convergence_eps: f64,
    /// Levenberg damping relative to the mean translational curvature
    /// (and the rotational curvature for the heading).
    pub damping: f64,
    pub jump_translation: f64,
    pub jump_rotation: f64,
    pub min_correspondences: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            tau_in: 0.3,
            tau_out: 1.0,
            max_step_translation: 0.3,
            max_step_rotation: 0.15,
            corridor_bins: 18,
            corridor_dominance: 0.8,
            axial_cap: 60,
            corridor_downsample: true,
            weighting: WeightMode::RobustTimesCorridor,
            max_iterations: 10,
            convergence_eps: 1e-6,
            damping: 0.5,
            jump_translation: 1.0,
            jump_rotation: 30f64.to_radians(),
            min_correspondences: 6,
        }
    }
}

impl TrackerConfig {
    /// Data-association search radius.
    pub fn match_radius(&self) -> f64 {
        2.0 * self.tau_out
    }
}

/// Retention test of the clutter gate.
pub fn gate(e: f64, d_perp: f64, cfg: &TrackerConfig) -> bool {
    (e <= 0.0 && d_perp < cfg.tau_in) || (e > 0.0 && d_perp < cfg.tau_out)
}

/// Asymmetric robust weight: points behind the wall lose weight faster.
pub fn robust_weight(r: f64, side: Side, cfg: &TrackerConfig) -> f64 {
    match side {
        // τ/(k·r + τ), written so that r = τ gives exactly 1/(k + 1)
        Side::Outside => 1.0 / (9.0 * (r / cfg.tau_out) + 1.0),
        Side::Inside => 1.0 / (1.5 * (r / cfg.tau_in) + 1.0),
    }
}

/// `clamp(|n·v|, 0.3, 1)`: full weight for walls seen head-on.
pub fn corridor_direction_factor(n: Point2D, v: Point2D) -> f64 {
    n.dot(v).abs().clamp(0.3, 1.0)
}

/// ICP weight in the fusion: 0.5 at zero confidence, 0.95 at full.
pub fn icp_fusion_weight(s_icp: f64) -> f64 {
    0.5 + 0.45 * s_icp.clamp(0.0, 1.0)
}
