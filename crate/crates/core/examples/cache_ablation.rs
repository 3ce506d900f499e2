//! Paired planning with and without the static hierarchical caches: paths
//! must match, and the uncached slowdown should be the cache rebuild.
//!
//! cargo run --release --example cache_ablation -- [queries] [trials]

use osmag_nav::bench::{
    generate_query_set, generate_synthetic_campus, run_cache_ablation, CampusSpec,
};
use osmag_nav::graph::{build_base_graph, build_caches, BaseGraphParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    let trials: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    let graph = generate_synthetic_campus(1, &CampusSpec::default())?.graph;
    let params = BaseGraphParams::default();
    let (pg, _) = build_base_graph(&graph, &params);
    let cache = build_caches(&graph, &pg, &params);
    let queries = generate_query_set(&graph, &pg, &cache, n, 9);

    let report = run_cache_ablation(&graph, &pg, &cache, &queries, trials);
    print!("{}", report.to_table());
    Ok(())
}
