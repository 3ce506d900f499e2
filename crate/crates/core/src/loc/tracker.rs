use super::odom::{apply_motion, relative_motion};
use super::{
    fuse_with_odometry, icp_fusion_weight, icp_track, FusionInput, LocError, MapSegments,
    ScanFrame, TrackerConfig,
};
use crate::geometry::Pose2D;
use crate::model::AreaGraph;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackStatus {
    Tracked,
    /// ICP jumped too far; the prediction was kept.
    Diverged,
    /// Too little structure in view; the prediction was kept.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackStep {
    pub pose: Pose2D,
    pub predicted: Pose2D,
    pub icp: Option<Pose2D>,
    pub score: f64,
    pub fusion_weight: f64,
    pub iterations: usize,
    pub status: TrackStatus,
}

/// Frame-to-map tracker: predict from odometry, refine by ICP against the
/// walls, fuse the two.
#[derive(Clone, Debug)]
pub struct Tracker {
    pub config: TrackerConfig,
    walls: MapSegments,
    pose: Pose2D,
    last_odom: Option<Pose2D>,
}

impl Tracker {
    pub fn new(walls: MapSegments, config: TrackerConfig, initial: Pose2D) -> Self {
        Self {
            config,
            walls,
            pose: initial,
            last_odom: None,
        }
    }

    pub fn from_graph(graph: &AreaGraph, config: TrackerConfig, initial: Pose2D) -> Self {
        let level = graph
            .levels()
            .contains(&initial.level)
            .then_some(initial.level.as_str());
        Self::new(MapSegments::from_graph(graph, level), config, initial)
    }

    pub fn pose(&self) -> &Pose2D {
        &self.pose
    }

    pub fn walls(&self) -> &MapSegments {
        &self.walls
    }

    /// Tracks one scan given the raw odometry pose at scan time. The
    /// prediction is the last estimate moved by the odometry increment.
    pub fn step(&mut self, scan: &ScanFrame, odom: &Pose2D) -> TrackStep {
        let predicted = match &self.last_odom {
            Some(prev) => apply_motion(&self.pose, relative_motion(prev, odom)),
            None => self.pose.clone(),
        };
        self.last_odom = Some(odom.clone());
        self.step_with_prior(scan, predicted)
    }

    /// Tracks one scan from an explicit prediction.
    pub fn step_with_prior(&mut self, scan: &ScanFrame, predicted: Pose2D) -> TrackStep {
        let out = match icp_track(scan, &self.walls, &predicted, &self.config) {
            Ok(r) => {
                let pose = fuse_with_odometry(&FusionInput {
                    icp: r.pose.clone(),
                    score: r.score,
                    odometry: predicted.clone(),
                });
                TrackStep {
                    pose,
                    predicted,
                    fusion_weight: icp_fusion_weight(r.score),
                    score: r.score,
                    iterations: r.iterations.len(),
                    icp: Some(r.pose),
                    status: TrackStatus::Tracked,
                }
            }
            Err(e) => TrackStep {
                pose: predicted.clone(),
                predicted,
                icp: None,
                score: 0.0,
                fusion_weight: 0.0,
                iterations: 0,
                status: if matches!(e, LocError::Diverged { .. }) {
                    TrackStatus::Diverged
                } else {
                    TrackStatus::Degenerate
                },
            },
        };
        self.pose = out.pose.clone();
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AteSummary {
    pub frames: usize,
    pub rmse: f64,
    pub mean: f64,
    pub max: f64,
}

/// Absolute trajectory error over paired poses (positions only).
pub fn ate(estimate: &[Pose2D], truth: &[Pose2D]) -> AteSummary {
    let errs: Vec<f64> = estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| e.position().distance(t.position()))
        .collect();
    if errs.is_empty() {
        return AteSummary::default();
    }
    let n = errs.len() as f64;
    AteSummary {
        frames: errs.len(),
        rmse: (errs.iter().map(|e| e * e).sum::<f64>() / n).sqrt(),
        mean: errs.iter().sum::<f64>() / n,
        max: errs.iter().cloned().fold(0.0, f64::max),
    }
}
