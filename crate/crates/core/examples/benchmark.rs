//! Three-way planner benchmark (Grid A*, flat, hierarchical) on a sampled
//! query set, bucketed by route length.
//!
//! cargo run --release --example benchmark -- [queries] [orders]

use osmag_nav::bench::{
    generate_query_set, generate_synthetic_campus, run_benchmark, BenchContext, CampusSpec,
    GridBaseline, Planner,
};
use osmag_nav::graph::{build_base_graph, build_caches, BaseGraphParams};
use osmag_nav::planner::PlannerConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(120);
    let orders: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);

    let graph = generate_synthetic_campus(1, &CampusSpec::default())?.graph;
    let params = BaseGraphParams::default();
    let (pg, _) = build_base_graph(&graph, &params);
    let cache = build_caches(&graph, &pg, &params);
    let grid = GridBaseline::new(&graph, 0.05)?;
    println!(
        "grid baseline: {} cells over {} floors",
        grid.cell_count(),
        grid.floors.len()
    );

    let queries = generate_query_set(&graph, &pg, &cache, n, 5);
    let ctx = BenchContext {
        graph: &graph,
        pg: &pg,
        cache: &cache,
        grid: Some(&grid),
        config: PlannerConfig::default(),
    };
    let report = run_benchmark(
        &ctx,
        &queries,
        &[Planner::Grid, Planner::Flat, Planner::Hier],
        orders,
        1,
    );
    print!("{}", report.to_table());
    Ok(())
}
