//! Plan hierarchically and drive the segmented mission: goals at each
//! passage, proxies projected into a 50 m rolling window, map switches at
//! floor changes.
//!
//! cargo run --release --example mission -- [trajectory.csv]

use osmag_nav::bench::{generate_synthetic_campus, CampusSpec};
use osmag_nav::exec::{simulate_mission, MissionConfig, MissionEventKind, RobotModel};
use osmag_nav::graph::{build_base_graph, build_caches, BaseGraphParams};
use osmag_nav::planner::{plan_hierarchical, PlannerConfig};
use osmag_nav::Pose2D;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = generate_synthetic_campus(1, &CampusSpec::default())?.graph;
    let params = BaseGraphParams::default();
    let (pg, _) = build_base_graph(&graph, &params);
    let cache = build_caches(&graph, &pg, &params);

    let at = |area: &str, level: &str| {
        let c = graph
            .area_by_name(area)
            .expect("area exists")
            .polygon
            .centroid();
        Pose2D::new(c.x, c.y, 0.0, level)
    };
    let start = at("F1-S3-RS02", "1");
    let goal = at("F2-S0-RN05", "2");
    let plan = plan_hierarchical(
        &graph,
        &pg,
        &cache,
        &start,
        &goal,
        &PlannerConfig::default(),
    )?;
    println!(
        "plan: {} passages, cost {:.1}",
        plan.passages.len(),
        plan.cost
    );

    let log = simulate_mission(
        &graph,
        &plan,
        &RobotModel::default(),
        &MissionConfig::default(),
    )?;
    for e in &log.events {
        match &e.kind {
            MissionEventKind::GoalSwitch { index, reached } => {
                println!("t={:>6.1}s  goal {index:>2} after reaching {reached}", e.t)
            }
            MissionEventKind::MapSwitch { from, to } => {
                println!("t={:>6.1}s  map {from} -> {to}", e.t)
            }
        }
    }
    println!(
        "{:?} in {} ticks, {:.1} m driven, {} proxy ticks, {} collisions, max speed jump at switches {:.3} m/s",
        log.status, log.ticks, log.path_length, log.proxy_ticks, log.collisions, log.max_switch_speed_delta
    );
    if let Some(path) = std::env::args().nth(1) {
        log.write_csv(std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
