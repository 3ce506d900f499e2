use super::{raster_connect, EdgeKind, GraphError, HierCache, PassageGraph};
use crate::geometry::{Point2D, Pose2D};
use crate::model::{AreaGraph, AreaId};

/// Temporary connection from a pose to the passages of its leaf area.
#[derive(Clone, Debug, PartialEq)]
pub struct VirtualEdge {
    pub passage: u32,
    pub weight: f64,
    pub kind: EdgeKind,
    /// Polyline from the pose to the passage center.
    pub trace: Vec<Point2D>,
}

/// A pose injected as a query-local vertex. Owns all temporary state; the
/// passage graph and caches are only read.
#[derive(Clone, Debug, PartialEq)]
pub struct VirtualAttachment {
    pub pose: Pose2D,
    pub leaf: AreaId,
    pub leaf_name: String,
    pub edges: Vec<VirtualEdge>,
}

impl VirtualAttachment {
    pub fn position(&self) -> Point2D {
        self.pose.position()
    }

    /// Raster route to another pose in the same leaf.
    pub fn direct_to(
        &self,
        graph: &AreaGraph,
        cache: &HierCache,
        other: &VirtualAttachment,
    ) -> Option<VirtualEdge> {
        if self.leaf != other.leaf {
            return None;
        }
        let raster = cache.leaf_raster(graph, self.leaf)?;
        let (a, b) = (self.position(), other.position());
        match raster_connect(&raster, a, b, cache.params.snap_radius_cells) {
            Some((weight, trace)) => Some(VirtualEdge {
                passage: u32::MAX,
                weight,
                kind: EdgeKind::Raster,
                trace,
            }),
            None => cache.params.euclidean_fallback.then(|| VirtualEdge {
                passage: u32::MAX,
                weight: a.distance(b),
                kind: EdgeKind::EuclideanFallback,
                trace: vec![a, b],
            }),
        }
    }
}

/// Locates `pose` on `level` and connects it to every resident passage of
/// its leaf area through the leaf raster.
pub fn inject_virtual_passage(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    pose: &Pose2D,
    level: &str,
) -> Result<VirtualAttachment, GraphError> {
    let p = pose.position();
    let leaf = graph.locate_leaf_id(p, level)?;
    let name = graph.area(leaf).name.clone();
    let raster = cache.leaf_raster(graph, leaf);
    let mut edges = Vec::new();
    for &pid in graph.resident_passages(leaf) {
        let c = pg.position(pid.0);
        let routed = raster
            .as_ref()
            .and_then(|r| raster_connect(r, p, c, cache.params.snap_radius_cells));
        match routed {
            Some((weight, trace)) => edges.push(VirtualEdge {
                passage: pid.0,
                weight,
                kind: EdgeKind::Raster,
                trace,
            }),
            None if cache.params.euclidean_fallback => edges.push(VirtualEdge {
                passage: pid.0,
                weight: p.distance(c),
                kind: EdgeKind::EuclideanFallback,
                trace: vec![p, c],
            }),
            None => {}
        }
    }
    if edges.is_empty() && !graph.resident_passages(leaf).is_empty() {
        return Err(GraphError::AttachFailed(name));
    }
    let mut pose = pose.clone();
    pose.level = level.to_string();
    Ok(VirtualAttachment {
        pose,
        leaf,
        leaf_name: name,
        edges,
    })
}
