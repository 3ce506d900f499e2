use super::queries::QuerySet;
use crate::graph::{HierCache, PassageGraph};
use crate::model::AreaGraph;
use crate::planner::{plan_hierarchical, PlanResult, PlannerConfig};
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationPair {
    pub query: usize,
    pub trial: usize,
    pub cached_wall_ms: f64,
    pub uncached_wall_ms: f64,
    pub cached_astar_ms: f64,
    pub uncached_astar_ms: f64,
    pub rebuild_ms: f64,
    /// Same passage sequence and bit-identical cost.
    pub equal_path: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub queries: usize,
    pub trials: usize,
    pub pairs: Vec<AblationPair>,
    pub equal_paths: usize,
    pub failures: usize,
    pub mean_cached_wall_ms: f64,
    pub mean_uncached_wall_ms: f64,
    pub mean_cached_astar_ms: f64,
    pub mean_uncached_astar_ms: f64,
    pub mean_rebuild_ms: f64,
    /// Uncached over cached mean wall time.
    pub slowdown: f64,
    /// (uncached − cached wall) / rebuild time.
    pub rebuild_share: f64,
}

impl AblationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        format!(
            "variant    wall ms   A* ms   rebuild ms\n\
             cached   {:>8.3} {:>7.3} {:>12}\n\
             uncached {:>8.3} {:>7.3} {:>12.3}\n\
             slowdown {:.2}x  rebuild share {:.3}  equal paths {}/{}\n",
            self.mean_cached_wall_ms,
            self.mean_cached_astar_ms,
            "-",
            self.mean_uncached_wall_ms,
            self.mean_uncached_astar_ms,
            self.mean_rebuild_ms,
            self.slowdown,
            self.rebuild_share,
            self.equal_paths,
            self.pairs.len()
        )
    }
}

fn timed(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    q: &super::queries::BenchQuery,
    config: &PlannerConfig,
) -> (f64, Option<PlanResult>) {
    let t0 = Instant::now();
    let r = plan_hierarchical(graph, pg, cache, &q.start, &q.goal, config).ok();
    (t0.elapsed().as_secs_f64() * 1e3, r)
}

/// Paired cached/uncached hierarchical runs. The uncached run rebuilds all
/// caches (leaf rasters included) inside its timed region.
pub fn run_cache_ablation(
    graph: &AreaGraph,
    pg: &PassageGraph,
    cache: &HierCache,
    queries: &QuerySet,
    trials: usize,
) -> AblationReport {
    let cached_cfg = PlannerConfig::default();
    let uncached_cfg = PlannerConfig {
        use_cache: false,
        ..PlannerConfig::default()
    };
    let mut pairs = Vec::new();
    let mut failures = 0;
    for q in &queries.queries {
        for trial in 0..trials {
            let (cw, c) = timed(graph, pg, cache, q, &cached_cfg);
            let (uw, u) = timed(graph, pg, cache, q, &uncached_cfg);
            let (Some(c), Some(u)) = (c, u) else {
                failures += 1;
                continue;
            };
            pairs.push(AblationPair {
                query: q.id,
                trial,
                cached_wall_ms: cw,
                uncached_wall_ms: uw,
                cached_astar_ms: c.stage_times_us.astar_us / 1e3,
                uncached_astar_ms: u.stage_times_us.astar_us / 1e3,
                rebuild_ms: u.stage_times_us.rebuild_us / 1e3,
                equal_path: c.passages == u.passages && c.cost.to_bits() == u.cost.to_bits(),
            });
        }
    }
    let m = |f: fn(&AblationPair) -> f64| {
        if pairs.is_empty() {
            f64::NAN
        } else {
            pairs.iter().map(f).sum::<f64>() / pairs.len() as f64
        }
    };
    let cached = m(|p| p.cached_wall_ms);
    let uncached = m(|p| p.uncached_wall_ms);
    let rebuild = m(|p| p.rebuild_ms);
    AblationReport {
        queries: queries.queries.len(),
        trials,
        equal_paths: pairs.iter().filter(|p| p.equal_path).count(),
        failures,
        mean_cached_wall_ms: cached,
        mean_uncached_wall_ms: uncached,
        mean_cached_astar_ms: m(|p| p.cached_astar_ms),
        mean_uncached_astar_ms: m(|p| p.uncached_astar_ms),
        mean_rebuild_ms: rebuild,
        slowdown: uncached / cached,
        rebuild_share: (uncached - cached) / rebuild,
        pairs,
    }
}
