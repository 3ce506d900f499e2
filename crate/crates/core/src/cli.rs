//! `navbench` command-line surface. Exit codes: 0 success, 1 invalid input
//! or validation failure, 2 planning/simulation failure, 3 I/O error.

use crate::bench::{
    generate_query_set, generate_synthetic_campus, run_benchmark, run_cache_ablation,
    storage_report_at, BenchContext, BenchError, CampusSpec, GridBaseline, Planner, QuerySet,
};
use crate::exec::{simulate_mission, MissionConfig, RobotModel};
use crate::geometry::Pose2D;
use crate::graph::{
    build_base_graph, build_caches, load_cache_file, save_cache_file, BaseGraphParams, HierCache,
    PassageGraph,
};
use crate::loc::{ate, simulate_scan, ScanSpec, TrackStatus, Tracker, TrackerConfig, WeightMode};
use crate::model::{parse_osmag_with, validate, AreaGraph, ParseOptions};
use crate::planner::{plan_flat, plan_hierarchical, PlanResult, PlannerConfig};
use crate::raster::{
    export_pgm, export_yaml, rasterize_floor, rolling_window, Cell, OccupancyRaster,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "navbench",
    version,
    about = "Plan, simulate and benchmark on osmAG maps"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Human-readable tables instead of JSON where available.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the primary output here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Accept legacy tag spellings when parsing maps.
    #[arg(long, global = true)]
    lenient: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural invariants of a map.
    Validate { map: PathBuf },
    /// Build the passage graph and caches and save them (`-o` required).
    BuildGraph { map: PathBuf },
    /// Plan one route.
    Plan {
        map: PathBuf,
        #[arg(long, value_parser = parse_pose)]
        start: Pose2D,
        #[arg(long, value_parser = parse_pose)]
        goal: Pose2D,
        #[arg(long, default_value = "hier")]
        planner: Planner,
        /// Prebuilt cache file from `build-graph`.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Grid resolution for `--planner grid`.
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
    },
    /// Sample a benchmark query set.
    GenQueries {
        map: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Time Grid A*, flat and hierarchical planning over a query set.
    Bench {
        map: PathBuf,
        queries: PathBuf,
        #[arg(long, default_value_t = 6)]
        orders: usize,
        #[arg(long, value_delimiter = ',', default_value = "grid,flat,hier")]
        planners: Vec<Planner>,
        #[arg(long, default_value_t = 0.05)]
        grid_resolution: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Paired cached/uncached hierarchical planning.
    Ablate {
        map: PathBuf,
        queries: PathBuf,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Use only the first N queries.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Rasterize a floor, or a rolling window on it, to PGM (`-o`).
    Raster {
        map: PathBuf,
        #[arg(long)]
        level: String,
        /// Window center and size: x,y,w (meters).
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64, f64)>,
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
    },
    /// Plan hierarchically and drive the segmented mission simulation.
    Simulate {
        map: PathBuf,
        #[arg(long, value_parser = parse_pose)]
        start: Pose2D,
        #[arg(long, value_parser = parse_pose)]
        goal: Pose2D,
        /// Per-tick trajectory CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        max_ticks: Option<usize>,
    },
    /// Track a ground-truth trajectory with synthetic scans and odometry.
    LocalizeSim {
        map: PathBuf,
        /// CSV with columns t,x,y,theta[,level].
        #[arg(long)]
        trajectory: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        sigma: f64,
        #[arg(long, default_value_t = 360)]
        beams: usize,
        /// Relative odometry noise per step (standard deviation).
        #[arg(long, default_value_t = 0.05)]
        odom_noise: f64,
        #[arg(long, value_enum, default_value = "robust-times-corridor")]
        weighting: Weighting,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Per-frame estimates CSV.
        #[arg(long)]
        estimates: Option<PathBuf>,
    },
    /// Generate a synthetic campus map.
    GenMap {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        floors: usize,
        #[arg(long, default_value_t = 5)]
        sectors: usize,
        #[arg(long, default_value_t = 8)]
        rooms_per_side: usize,
        #[arg(long, default_value_t = 2)]
        elevators: usize,
        /// Also write the manifest JSON here.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Vector vs grid vs point-cloud storage.
    Storage {
        map: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        resolution: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Weighting {
    Off,
    RobustOnly,
    RobustTimesCorridor,
}

impl From<Weighting> for WeightMode {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Off => WeightMode::Off,
            Weighting::RobustOnly => WeightMode::RobustOnly,
            Weighting::RobustTimesCorridor => WeightMode::RobustTimesCorridor,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Planning(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Planning(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Planning(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io(m) => CliError::Io(m),
            BenchError::SpecInfeasible(_) | BenchError::Model(_) => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Planning(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn parse_pose(s: &str) -> Result<Pose2D, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |i: usize| {
        parts[i]
            .parse::<f64>()
            .map_err(|e| format!("`{}`: {e}", parts[i]))
    };
    match parts.len() {
        3 => Ok(Pose2D::new(num(0)?, num(1)?, 0.0, parts[2])),
        4 => Ok(Pose2D::new(num(0)?, num(1)?, num(3)?, parts[2])),
        _ => Err("expected x,y,level or x,y,level,theta".into()),
    }
}

fn parse_window(s: &str) -> Result<(f64, f64, f64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, w] if w > 0.0 => Ok((x, y, w)),
        _ => Err("expected x,y,w with w > 0".into()),
    }
}

struct Loaded {
    bytes: Vec<u8>,
    graph: AreaGraph,
}

fn load_map(path: &Path, lenient: bool) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let graph = parse_osmag_with(text, ParseOptions { lenient })
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    Ok(Loaded { bytes, graph })
}

fn graph_and_cache(
    map: &Loaded,
    cache: Option<&Path>,
) -> Result<(PassageGraph, HierCache), CliError> {
    match cache {
        Some(p) => {
            let f = load_cache_file(p, &map.bytes, &map.graph).map_err(|e| match e {
                crate::graph::GraphError::CacheIo(m) => CliError::Io(m),
                other => CliError::Invalid(other.to_string()),
            })?;
            let mut c = f.cache;
            c.rebuild_rasters(&map.graph);
            Ok((f.graph, c))
        }
        None => {
            let params = BaseGraphParams::default();
            let (pg, _) = build_base_graph(&map.graph, &params);
            let cache = build_caches(&map.graph, &pg, &params);
            Ok((pg, cache))
        }
    }
}

fn load_queries(path: &Path) -> Result<QuerySet, CliError> {
    let s = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    QuerySet::from_json(&s).map_err(|e| CliError::Invalid(e.to_string()))
}

struct Out<'a> {
    path: Option<&'a Path>,
}

impl Out<'_> {
    fn text(&self, s: &str) -> Result<(), CliError> {
        match self.path {
            Some(p) => std::fs::write(p, s).map_err(|e| io_err(p, e)),
            None => print_stdout(s),
        }
    }

    fn json<T: Serialize>(&self, v: &T) -> Result<(), CliError> {
        self.text(&serde_json::to_string_pretty(v).expect("output serializes"))
    }
}

fn print_stdout(s: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{}", s.trim_end()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Io(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn write_raster(raster: &OccupancyRaster, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, export_pgm(raster)).map_err(|e| io_err(path, e))?;
    let image = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let yaml = path.with_extension("yaml");
    std::fs::write(&yaml, export_yaml(raster, &image)).map_err(|e| io_err(&yaml, e))
}

#[derive(Deserialize)]
struct TrajectoryRow {
    t: f64,
    x: f64,
    y: f64,
    theta: f64,
    #[serde(default)]
    level: Option<String>,
}

/// Runs the CLI on `args` and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("navbench: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let out = Out {
        path: cli.output.as_deref(),
    };
    match &cli.command {
        Command::Validate { map } => {
            let m = load_map(map, cli.lenient)?;
            let report = validate(&m.graph);
            if cli.pretty {
                let mut s = format!(
                    "{}: {}\n",
                    map.display(),
                    if report.ok { "ok" } else { "INVALID" }
                );
                for v in &report.violations {
                    s.push_str(&format!("  {:?}: {}\n", v.invariant, v.message));
                }
                out.text(&s)?;
            } else {
                out.json(&report)?;
            }
            if report.ok {
                Ok(())
            } else {
                Err(CliError::Invalid(format!(
                    "{} violation(s)",
                    report.violations.len()
                )))
            }
        }
        Command::BuildGraph { map } => {
            let Some(path) = cli.output.as_deref() else {
                return Err(CliError::Invalid(
                    "build-graph needs -o <cache file>".into(),
                ));
            };
            let m = load_map(map, cli.lenient)?;
            let params = BaseGraphParams::default();
            let (pg, report) = build_base_graph(&m.graph, &params);
            let cache = build_caches(&m.graph, &pg, &params);
            save_cache_file(path, &m.bytes, &report, &pg, &cache)
                .map_err(|e| CliError::Io(e.to_string()))?;
            let summary = json!({
                "cache": path,
                "report": report,
                "cache_build_ms": cache.build_ms,
                "structures": cache.structures.iter().flatten().count(),
            });
            print_stdout(&serde_json::to_string_pretty(&summary).expect("summary serializes"))
        }
        Command::Plan {
            map,
            start,
            goal,
            planner,
            cache,
            resolution,
        } => {
            let m = load_map(map, cli.lenient)?;
            let r: PlanResult = match planner {
                Planner::Grid => {
                    crate::bench::grid_astar_baseline(&m.graph, start, goal, *resolution)?
                }
                Planner::Flat | Planner::Hier => {
                    let (pg, c) = graph_and_cache(&m, cache.as_deref())?;
                    let res = if *planner == Planner::Flat {
                        plan_flat(&m.graph, &pg, &c, start, goal)
                    } else {
                        plan_hierarchical(&m.graph, &pg, &c, start, goal, &PlannerConfig::default())
                    };
                    res.map_err(|e| CliError::Planning(e.to_string()))?
                }
            };
            if cli.pretty {
                out.text(&format!(
                    "planner {}  cost {:.3}  hops {}  closed {}  fallback {}\n{}\n",
                    r.planner,
                    r.cost,
                    r.hops(),
                    r.closed_states,
                    r.used_fallback,
                    r.passages.join(" -> ")
                ))
            } else {
                out.text(&r.to_json())
            }
        }
        Command::GenQueries {
            map,
            count,
            seed,
            cache,
        } => {
            let m = load_map(map, cli.lenient)?;
            let (pg, c) = graph_and_cache(&m, cache.as_deref())?;
            let qs = generate_query_set(&m.graph, &pg, &c, *count, *seed);
            out.text(&qs.to_json())
        }
        Command::Bench {
            map,
            queries,
            orders,
            planners,
            grid_resolution,
            seed,
            cache,
        } => {
            let m = load_map(map, cli.lenient)?;
            let qs = load_queries(queries)?;
            let (pg, c) = graph_and_cache(&m, cache.as_deref())?;
            let grid = if planners.contains(&Planner::Grid) {
                Some(GridBaseline::new(&m.graph, *grid_resolution)?)
            } else {
                None
            };
            let ctx = BenchContext {
                graph: &m.graph,
                pg: &pg,
                cache: &c,
                grid: grid.as_ref(),
                config: PlannerConfig::default(),
            };
            let report = run_benchmark(&ctx, &qs, planners, *orders, *seed);
            out.text(&if cli.pretty {
                report.to_table()
            } else {
                report.to_json()
            })
        }
        Command::Ablate {
            map,
            queries,
            trials,
            limit,
            cache,
        } => {
            let m = load_map(map, cli.lenient)?;
            let mut qs = load_queries(queries)?;
            if let Some(n) = limit {
                qs.queries.truncate(*n);
            }
            let (pg, c) = graph_and_cache(&m, cache.as_deref())?;
            let report = run_cache_ablation(&m.graph, &pg, &c, &qs, *trials);
            out.text(&if cli.pretty {
                report.to_table()
            } else {
                report.to_json()
            })
        }
        Command::Raster {
            map,
            level,
            window,
            resolution,
        } => {
            let m = load_map(map, cli.lenient)?;
            let raster = match window {
                Some((x, y, w)) => rolling_window(
                    &m.graph,
                    &Pose2D::new(*x, *y, 0.0, level.as_str()),
                    level,
                    *w,
                    *resolution,
                ),
                None => rasterize_floor(&m.graph, level, *resolution)
                    .map_err(|e| CliError::Invalid(e.to_string()))?,
            };
            let summary = json!({
                "level": level,
                "resolution": raster.resolution,
                "origin": raster.origin,
                "width": raster.width,
                "height": raster.height,
                "cells": raster.len(),
                "free": raster.count(Cell::Free),
                "occupied": raster.count(Cell::Occupied),
                "unknown": raster.count(Cell::Unknown),
                "pgm": cli.output,
            });
            if let Some(p) = cli.output.as_deref() {
                write_raster(&raster, p)?;
            }
            print_stdout(&serde_json::to_string_pretty(&summary).expect("summary serializes"))
        }
        Command::Simulate {
            map,
            start,
            goal,
            csv,
            max_ticks,
        } => {
            let m = load_map(map, cli.lenient)?;
            let (pg, c) = graph_and_cache(&m, None)?;
            let plan = plan_hierarchical(&m.graph, &pg, &c, start, goal, &PlannerConfig::default())
                .map_err(|e| CliError::Planning(e.to_string()))?;
            let config = MissionConfig {
                max_ticks: *max_ticks,
                ..MissionConfig::default()
            };
            let log = simulate_mission(&m.graph, &plan, &RobotModel::default(), &config)
                .map_err(|e| CliError::Planning(e.to_string()))?;
            if let Some(p) = csv {
                let f = std::fs::File::create(p).map_err(|e| io_err(p, e))?;
                log.write_csv(f).map_err(|e| io_err(p, e))?;
            }
            out.text(&log.summary_json())?;
            if log.succeeded() {
                Ok(())
            } else {
                Err(CliError::Planning(format!(
                    "mission did not succeed: {:?}",
                    log.status
                )))
            }
        }
        Command::LocalizeSim {
            map,
            trajectory,
            sigma,
            beams,
            odom_noise,
            weighting,
            seed,
            estimates,
        } => {
            let m = load_map(map, cli.lenient)?;
            let mut rdr = csv::Reader::from_path(trajectory).map_err(|e| io_err(trajectory, e))?;
            let default_level = m.graph.levels().into_iter().next().unwrap_or_default();
            let samples: Vec<(f64, Pose2D)> = rdr
                .deserialize::<TrajectoryRow>()
                .map(|r| {
                    r.map(|r| {
                        (
                            r.t,
                            Pose2D::new(
                                r.x,
                                r.y,
                                r.theta,
                                r.level.unwrap_or_else(|| default_level.clone()),
                            ),
                        )
                    })
                    .map_err(|e| CliError::Invalid(format!("{}: {e}", trajectory.display())))
                })
                .collect::<Result<_, _>>()?;
            let (times, rows): (Vec<f64>, Vec<Pose2D>) = samples.into_iter().unzip();
            let Some(first) = rows.first() else {
                return Err(CliError::Invalid("empty trajectory".into()));
            };
            let cfg = TrackerConfig {
                weighting: (*weighting).into(),
                ..TrackerConfig::default()
            };
            let mut tracker = Tracker::from_graph(&m.graph, cfg, first.clone());
            let spec = ScanSpec {
                beams: *beams,
                sigma: *sigma,
                ..ScanSpec::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let noise = Normal::new(0.0, odom_noise.max(0.0))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let mut odom = first.clone();
            let mut est = Vec::with_capacity(rows.len());
            let mut lines = Vec::with_capacity(rows.len());
            let (mut tracked, mut diverged, mut degenerate, mut score_sum) = (0, 0, 0, 0.0);
            for (k, truth) in rows.iter().enumerate() {
                if k > 0 {
                    let d = crate::loc::relative_motion(&rows[k - 1], truth);
                    let mut n = || 1.0 + noise.sample(&mut rng);
                    odom = crate::loc::apply_motion(&odom, (d.0 * n(), d.1 * n(), d.2 * n()));
                }
                let scan = simulate_scan(&m.graph, truth, &spec, &[], times[k], &mut rng)
                    .map_err(|e| CliError::Invalid(format!("trajectory row {k}: {e}")))?;
                let step = tracker.step(&scan, &odom);
                match step.status {
                    TrackStatus::Tracked => tracked += 1,
                    TrackStatus::Diverged => diverged += 1,
                    TrackStatus::Degenerate => degenerate += 1,
                }
                score_sum += step.score;
                lines.push(format!(
                    "{},{},{},{},{},{},{},{:?}",
                    times[k],
                    step.pose.x,
                    step.pose.y,
                    step.pose.theta,
                    truth.x,
                    truth.y,
                    step.score,
                    step.status
                ));
                est.push(step.pose);
            }
            if let Some(p) = estimates {
                let body = format!(
                    "t,x,y,theta,truth_x,truth_y,score,status\n{}\n",
                    lines.join("\n")
                );
                std::fs::write(p, body).map_err(|e| io_err(p, e))?;
            }
            let summary = ate(&est, &rows);
            out.json(&json!({
                "frames": rows.len(),
                "ate": summary,
                "tracked": tracked,
                "diverged": diverged,
                "degenerate": degenerate,
                "mean_score": score_sum / rows.len() as f64,
                "weighting": WeightMode::from(*weighting),
            }))
        }
        Command::GenMap {
            seed,
            floors,
            sectors,
            rooms_per_side,
            elevators,
            manifest,
        } => {
            let spec = CampusSpec {
                floors: *floors,
                sectors: *sectors,
                rooms_per_side: *rooms_per_side,
                elevators: *elevators,
                ..CampusSpec::default()
            };
            let campus = generate_synthetic_campus(*seed, &spec)?;
            if let Some(p) = manifest {
                let s =
                    serde_json::to_string_pretty(&campus.manifest).expect("manifest serializes");
                std::fs::write(p, s).map_err(|e| io_err(p, e))?;
            }
            out.text(&campus.xml)
        }
        Command::Storage { map, resolution } => {
            let m = load_map(map, cli.lenient)?;
            let report = storage_report_at(&m.graph, *resolution)?;
            out.text(&if cli.pretty {
                report.to_table()
            } else {
                report.to_json()
            })
        }
    }
}
