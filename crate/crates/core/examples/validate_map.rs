//! Parse an osmAG file, check the structural invariants, and confirm that
//! writing it back is a fixed point.
//!
//! cargo run --example validate_map -- [map.osm]

use osmag_nav::bench::{generate_synthetic_campus, CampusSpec};
use osmag_nav::model::{parse_osmag, validate, write_osmag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let xml = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => generate_synthetic_campus(1, &CampusSpec::small(4))?.xml,
    };
    let graph = parse_osmag(&xml)?;
    println!(
        "{} areas ({} leaves), {} passages, levels {:?}, depth {}",
        graph.areas.len(),
        graph.leaf_ids().count(),
        graph.passages.len(),
        graph.levels(),
        graph.max_depth()
    );

    let report = validate(&graph);
    if report.ok {
        println!("valid");
    }
    for v in &report.violations {
        println!("{:?}: {}", v.invariant, v.message);
    }

    let once = write_osmag(&graph);
    let twice = write_osmag(&parse_osmag(&once)?);
    println!("round trip fixed point: {}", once == twice);
    Ok(())
}
