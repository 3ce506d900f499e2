//! Generate a synthetic multi-floor campus and write it as osmAG XML plus a
//! JSON manifest.
//!
//! cargo run --example generate_campus -- [out_dir] [seed]

use osmag_nav::bench::{generate_synthetic_campus, CampusSpec};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "target/campus".into()));
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    std::fs::create_dir_all(&dir)?;

    let campus = generate_synthetic_campus(seed, &CampusSpec::default())?;
    let m = &campus.manifest;
    std::fs::write(dir.join("campus.osm"), &campus.xml)?;
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(m)?)?;

    println!(
        "seed {seed}: {} floors, {} leaf areas, {} passages",
        m.floors, m.leaf_areas, m.passages
    );
    println!(
        "rooms {}, elevators {}, inter-floor passages {:?}",
        m.rooms, m.elevators, m.inter_floor_passages
    );
    println!(
        "free area {:.0} m² over all floors, {:.0} m² footprint per floor",
        m.free_area_m2, m.footprint_m2
    );
    println!("wrote {}", dir.display());
    Ok(())
}
