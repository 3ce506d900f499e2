use super::BenchError;
use crate::geometry::{Point2D, Pose2D};
use crate::graph::{HierCache, PassageGraph};
use crate::model::{AreaGraph, AreaId};
use crate::planner::plan_flat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SHORT_ROUTE_M: f64 = 50.0;
pub const LONG_ROUTE_M: f64 = 150.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryBucket {
    Short,
    Medium,
    Long,
    CrossFloor,
}

impl QueryBucket {
    pub const ALL: [QueryBucket; 4] = [
        QueryBucket::Short,
        QueryBucket::Medium,
        QueryBucket::Long,
        QueryBucket::CrossFloor,
    ];

    /// Same-floor buckets by route length: < 50 m, 50–150 m, > 150 m.
    pub fn classify(same_floor: bool, route_length: f64) -> Self {
        if !same_floor {
            QueryBucket::CrossFloor
        } else if route_length < SHORT_ROUTE_M {
            QueryBucket::Short
        } else if route_length <= LONG_ROUTE_M {
            QueryBucket::Medium
        } else {
            QueryBucket::Long
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QueryBucket::Short => "short",
            QueryBucket::Medium => "medium",
            QueryBucket::Long => "long",
            QueryBucket::CrossFloor => "cross_floor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchQuery {
    pub id: usize,
    pub start: Pose2D,
    pub goal: Pose2D,
    pub bucket: QueryBucket,
    /// Flat-planner route cost and hop count used for bucketing.
    pub route_cost: f64,
    pub hops: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuerySet {
    pub seed: u64,
    pub queries: Vec<BenchQuery>,
}

impl QuerySet {
    pub fn count(&self, bucket: QueryBucket) -> usize {
        self.queries.iter().filter(|q| q.bucket == bucket).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("query set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, BenchError> {
        serde_json::from_str(s).map_err(|e| BenchError::Io(format!("query set: {e}")))
    }
}

/// Random pose inside a room or corridor, at least `clearance` meters from
/// its walls.
pub fn sample_pose(
    graph: &AreaGraph,
    leaves: &[AreaId],
    clearance: f64,
    rng: &mut impl Rng,
) -> Pose2D {
    loop {
        let a = graph.area(leaves[rng.random_range(0..leaves.len())]);
        let b = a.polygon.bounds();
        let p = Point2D::new(
            rng.random_range(b.min.x..b.max.x),
            rng.random_range(b.min.y..b.max.y),
        );
        if a.polygon.contains(p) && a.polygon.boundary_distance(p) > clearance {
            let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            return Pose2D::new(p.x, p.y, theta, a.level.clone().unwrap_or_default());
        }
    }
}

/// Draws `n` start/goal pairs over rooms and corridors and buckets them by
/// the flat planner's route. Pairs the flat planner cannot route are
/// redrawn.
pub fn generate_query_set(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    n: usize,
    seed: u64,
) -> QuerySet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves: Vec<AreaId> = graph
        .leaf_ids()
        .filter(|&a| !graph.area(a).area_type.is_vertical())
        .collect();
    let mut queries = Vec::with_capacity(n);
    let mut attempts = 0;
    while queries.len() < n && attempts < 20 * n.max(1) {
        attempts += 1;
        let start = sample_pose(graph, &leaves, 0.3, &mut rng);
        let goal = sample_pose(graph, &leaves, 0.3, &mut rng);
        let Ok(r) = plan_flat(graph, pg, cache, &start, &goal) else {
            continue;
        };
        let bucket = QueryBucket::classify(start.level == goal.level, r.cost);
        queries.push(BenchQuery {
            id: queries.len(),
            start,
            goal,
            bucket,
            route_cost: r.cost,
            hops: r.hops(),
        });
    }
    QuerySet { seed, queries }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bucket_thresholds() {
        assert_eq!(QueryBucket::classify(true, 49.9), QueryBucket::Short);
        assert_eq!(QueryBucket::classify(true, 50.0), QueryBucket::Medium);
        assert_eq!(QueryBucket::classify(true, 150.0), QueryBucket::Medium);
        assert_eq!(QueryBucket::classify(true, 150.1), QueryBucket::Long);
        assert_eq!(QueryBucket::classify(false, 10.0), QueryBucket::CrossFloor);
    }
}
