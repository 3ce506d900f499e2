use super::grid::{path_length, GridBaseline};
use super::queries::{BenchQuery, QueryBucket, QuerySet};
use super::BenchError;
use crate::graph::{HierCache, PassageGraph};
use crate::model::AreaGraph;
use crate::planner::{plan_flat, plan_hierarchical, PlanResult, PlannerConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Planner {
    Grid,
    Flat,
    Hier,
}

impl Planner {
    pub const ALL: [Planner; 3] = [Planner::Grid, Planner::Flat, Planner::Hier];

    pub fn as_str(self) -> &'static str {
        match self {
            Planner::Grid => "grid",
            Planner::Flat => "flat",
            Planner::Hier => "hier",
        }
    }
}

impl FromStr for Planner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(Planner::Grid),
            "flat" => Ok(Planner::Flat),
            "hier" | "hierarchical" => Ok(Planner::Hier),
            other => Err(format!(
                "unknown planner `{other}` (expected flat, hier or grid)"
            )),
        }
    }
}

/// Everything a planner needs, built once before timing starts.
pub struct BenchContext<'a> {
    pub graph: &'a AreaGraph,
    pub pg: &'a PassageGraph,
    pub cache: &'a HierCache,
    pub grid: Option<&'a GridBaseline>,
    pub config: PlannerConfig,
}

impl BenchContext<'_> {
    pub fn plan(&self, planner: Planner, q: &BenchQuery) -> Result<PlanResult, BenchError> {
        match planner {
            Planner::Flat => Ok(plan_flat(
                self.graph, self.pg, self.cache, &q.start, &q.goal,
            )?),
            Planner::Hier => Ok(plan_hierarchical(
                self.graph,
                self.pg,
                self.cache,
                &q.start,
                &q.goal,
                &self.config,
            )?),
            Planner::Grid => match self.grid {
                Some(g) => g.plan(&q.start, &q.goal),
                None => Err(BenchError::Raster("grid baseline not built".into())),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub query: usize,
    pub bucket: QueryBucket,
    pub planner: Planner,
    pub ok: bool,
    pub error: Option<String>,
    /// Median end-to-end latency over all orders.
    pub median_ms: f64,
    pub times_ms: Vec<f64>,
    pub closed_states: usize,
    pub cost: f64,
    pub hops: usize,
    pub path_length: f64,
    /// Dense-path length increase over grid A* in percent.
    pub overhead_pct: Option<f64>,
    pub used_fallback: bool,
    /// Closed states and cost were identical in every order.
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketSummary {
    pub bucket: QueryBucket,
    pub planner: Planner,
    pub queries: usize,
    pub failures: usize,
    pub mean_ms: f64,
    pub mean_closed_states: f64,
    pub mean_cost: f64,
    pub mean_hops: f64,
    pub mean_overhead_pct: Option<f64>,
    pub fallback_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub orders: usize,
    pub planners: Vec<Planner>,
    pub records: Vec<BenchRecord>,
    pub buckets: Vec<BucketSummary>,
    /// Queries where flat and hierarchical costs differ by more than 1e-6.
    pub flat_hier_cost_mismatches: usize,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn bucket(&self, bucket: QueryBucket, planner: Planner) -> Option<&BucketSummary> {
        self.buckets
            .iter()
            .find(|b| b.bucket == bucket && b.planner == planner)
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:<5} {:>5} {:>10} {:>12} {:>9} {:>6} {:>10}",
            "bucket", "plan", "n", "mean ms", "closed", "cost m", "hops", "overhead"
        );
        for b in &self.buckets {
            let ovh = b
                .mean_overhead_pct
                .map_or("-".to_string(), |o| format!("{o:+.2}%"));
            let _ = writeln!(
                s,
                "{:<12} {:<5} {:>5} {:>10.3} {:>12.1} {:>9.1} {:>6.1} {:>10}",
                b.bucket.as_str(),
                b.planner.as_str(),
                b.queries,
                b.mean_ms,
                b.mean_closed_states,
                b.mean_cost,
                b.mean_hops,
                ovh
            );
        }
        let _ = writeln!(
            s,
            "orders: {}  flat/hier cost mismatches: {}",
            self.orders, self.flat_hier_cost_mismatches
        );
        s
    }
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

struct Run {
    result: Result<PlanResult, String>,
    ms: f64,
}

/// Times every query × planner pair under `orders` shuffled execution
/// orders (serially) and reports case-level medians and bucket means.
/// Grid A* is skipped for cross-floor queries.
pub fn run_benchmark(
    ctx: &BenchContext<'_>,
    queries: &QuerySet,
    planners: &[Planner],
    orders: usize,
    seed: u64,
) -> BenchReport {
    let orders = orders.max(1);
    let mut jobs: Vec<(usize, Planner)> = Vec::new();
    for (qi, q) in queries.queries.iter().enumerate() {
        for &p in planners {
            if p == Planner::Grid && q.bucket == QueryBucket::CrossFloor {
                continue;
            }
            jobs.push((qi, p));
        }
    }
    let mut runs: BTreeMap<(usize, Planner), Vec<Run>> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..orders {
        let mut order = jobs.clone();
        order.shuffle(&mut rng);
        for (qi, p) in order {
            let t0 = Instant::now();
            let result = ctx.plan(p, &queries.queries[qi]).map_err(|e| e.to_string());
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            runs.entry((qi, p)).or_default().push(Run { result, ms });
        }
    }

    let mut grid_len: BTreeMap<usize, f64> = BTreeMap::new();
    for ((qi, p), rs) in &runs {
        if *p == Planner::Grid {
            if let Ok(r) = &rs[0].result {
                grid_len.insert(*qi, path_length(r));
            }
        }
    }

    let mut records = Vec::new();
    for ((qi, p), rs) in &runs {
        let q = &queries.queries[*qi];
        let mut times: Vec<f64> = rs.iter().map(|r| r.ms).collect();
        let times_ms = times.clone();
        let median_ms = median(&mut times);
        let rec = match &rs[0].result {
            Ok(r) => {
                let len = path_length(r);
                let stable = rs.iter().all(|x| {
                    x.result
                        .as_ref()
                        .is_ok_and(|o| o.cost == r.cost && o.closed_states == r.closed_states)
                });
                BenchRecord {
                    query: q.id,
                    bucket: q.bucket,
                    planner: *p,
                    ok: true,
                    error: None,
                    median_ms,
                    times_ms,
                    closed_states: r.closed_states,
                    cost: r.cost,
                    hops: r.hops(),
                    path_length: len,
                    overhead_pct: grid_len.get(qi).map(|g| 100.0 * (len - g) / g),
                    used_fallback: r.used_fallback,
                    stable,
                }
            }
            Err(e) => BenchRecord {
                query: q.id,
                bucket: q.bucket,
                planner: *p,
                ok: false,
                error: Some(e.clone()),
                median_ms,
                times_ms,
                closed_states: 0,
                cost: f64::NAN,
                hops: 0,
                path_length: f64::NAN,
                overhead_pct: None,
                used_fallback: false,
                stable: rs.iter().all(|x| x.result.is_err()),
            },
        };
        records.push(rec);
    }
    records.sort_by_key(|r| (r.query, r.planner));

    let mut buckets = Vec::new();
    for bucket in QueryBucket::ALL {
        for &planner in planners {
            let all: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.bucket == bucket && r.planner == planner)
                .collect();
            if all.is_empty() {
                continue;
            }
            let ok: Vec<&&BenchRecord> = all.iter().filter(|r| r.ok).collect();
            let overheads: Vec<f64> = ok.iter().filter_map(|r| r.overhead_pct).collect();
            buckets.push(BucketSummary {
                bucket,
                planner,
                queries: all.len(),
                failures: all.len() - ok.len(),
                mean_ms: mean(ok.iter().map(|r| r.median_ms)),
                mean_closed_states: mean(ok.iter().map(|r| r.closed_states as f64)),
                mean_cost: mean(ok.iter().map(|r| r.cost)),
                mean_hops: mean(ok.iter().map(|r| r.hops as f64)),
                mean_overhead_pct: (!overheads.is_empty()).then(|| mean(overheads.iter().copied())),
                fallback_rate: ok.iter().filter(|r| r.used_fallback).count() as f64
                    / ok.len().max(1) as f64,
            });
        }
    }

    let cost_of = |qi: usize, p: Planner| {
        records
            .iter()
            .find(|r| r.query == qi && r.planner == p && r.ok)
            .map(|r| r.cost)
    };
    let flat_hier_cost_mismatches = queries
        .queries
        .iter()
        .filter(
            |q| match (cost_of(q.id, Planner::Flat), cost_of(q.id, Planner::Hier)) {
                (Some(a), Some(b)) => (a - b).abs() > 1e-6,
                _ => false,
            },
        )
        .count();

    BenchReport {
        orders,
        planners: planners.to_vec(),
        records,
        buckets,
        flat_hier_cost_mismatches,
    }
}
