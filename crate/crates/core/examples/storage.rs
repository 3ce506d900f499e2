//! Storage footprint of the vector map against a 0.05 m occupancy grid and
//! an estimated point cloud, for campuses of growing size.
//!
//! cargo run --release --example storage

use osmag_nav::bench::{generate_synthetic_campus, storage_report, CampusSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for sectors in [1, 2, 5] {
        let spec = CampusSpec {
            sectors,
            ..CampusSpec::default()
        };
        let graph = generate_synthetic_campus(1, &spec)?.graph;
        let r = storage_report(&graph)?;
        println!(
            "{sectors} sector(s) per floor, {} leaf areas",
            graph.leaf_ids().count()
        );
        print!("{}", r.to_table());
        println!();
    }
    Ok(())
}
