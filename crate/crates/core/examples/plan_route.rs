//! Plan the same routes with flat passage A*, the hierarchical planner and
//! the monolithic Grid A* baseline.
//!
//! cargo run --release --example plan_route

use osmag_nav::bench::{generate_synthetic_campus, grid_astar_baseline, path_length, CampusSpec};
use osmag_nav::graph::{build_base_graph, build_caches, BaseGraphParams};
use osmag_nav::planner::{plan_flat, plan_hierarchical, PlanResult, PlannerConfig};
use osmag_nav::Pose2D;

fn centroid(graph: &osmag_nav::AreaGraph, area: &str, level: &str) -> Pose2D {
    let c = graph
        .area_by_name(area)
        .expect("area exists")
        .polygon
        .centroid();
    Pose2D::new(c.x, c.y, 0.0, level)
}

fn show(r: &PlanResult) {
    println!(
        "  {:<5} cost {:>7.2}  path {:>7.2} m  closed {:>6}  {:>8.3} ms",
        r.planner,
        r.cost,
        path_length(r),
        r.closed_states,
        r.stage_times_us.total_us / 1e3
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = generate_synthetic_campus(1, &CampusSpec::default())?.graph;
    let params = BaseGraphParams::default();
    let (pg, report) = build_base_graph(&graph, &params);
    let cache = build_caches(&graph, &pg, &params);
    println!(
        "passage graph: {} vertices, {} edges ({} vertical), built in {:.0} ms + caches {:.0} ms",
        report.vertices,
        pg.edge_count(),
        report.vertical_edges,
        report.build_ms,
        cache.build_ms
    );

    let routes = [
        (
            "same floor",
            centroid(&graph, "F1-S0-RS01", "1"),
            centroid(&graph, "F1-S4-RN06", "1"),
        ),
        (
            "cross floor",
            centroid(&graph, "F1-S2-RN03", "1"),
            centroid(&graph, "F3-S1-RS05", "3"),
        ),
    ];
    for (label, start, goal) in routes {
        println!("{label}:");
        let flat = plan_flat(&graph, &pg, &cache, &start, &goal)?;
        let hier = plan_hierarchical(
            &graph,
            &pg,
            &cache,
            &start,
            &goal,
            &PlannerConfig::default(),
        )?;
        show(&flat);
        show(&hier);
        match grid_astar_baseline(&graph, &start, &goal, 0.05) {
            Ok(grid) => show(&grid),
            Err(e) => println!("  grid  {e}"),
        }
        println!(
            "  common parent {:?}, lifted through {:?}",
            hier.common_parent, hier.lifted_through
        );
        for t in &hier.floor_transitions {
            println!(
                "  floor {} -> {} at {}",
                t.from_level, t.to_level, t.passage
            );
        }
        println!("  passages: {}", hier.passages.join(" -> "));
    }
    Ok(())
}
