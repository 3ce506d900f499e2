//! Rasterize one floor of the campus and a rolling window around a pose,
//! and export both as PGM + YAML map-server pairs.
//!
//! cargo run --example rasterize -- [out_dir]

use osmag_nav::bench::{generate_synthetic_campus, CampusSpec};
use osmag_nav::raster::{export_pgm, export_yaml, rasterize_floor, Cell, RollingWindow};
use osmag_nav::Pose2D;
use std::path::{Path, PathBuf};

fn save(
    raster: &osmag_nav::raster::OccupancyRaster,
    dir: &Path,
    name: &str,
) -> std::io::Result<()> {
    std::fs::write(dir.join(format!("{name}.pgm")), export_pgm(raster))?;
    std::fs::write(
        dir.join(format!("{name}.yaml")),
        export_yaml(raster, &format!("{name}.pgm")),
    )
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/raster".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let graph = generate_synthetic_campus(1, &CampusSpec::default())?.graph;

    let floor = rasterize_floor(&graph, "1", 0.05)?;
    println!(
        "floor 1 @0.05 m: {}x{} cells, {} free, {} occupied",
        floor.width,
        floor.height,
        floor.count(Cell::Free),
        floor.count(Cell::Occupied)
    );
    save(&floor, &dir, "floor1")?;

    // the window has the same cell count wherever it is placed
    let window = RollingWindow::new(20.0, 0.05);
    for (i, x) in [10.0, 60.0, 110.0].into_iter().enumerate() {
        let frame = window.tick(&graph, &Pose2D::new(x, 9.5, 0.0, "1"));
        println!(
            "window at x={x:>5}: {} cells, {} areas painted",
            frame.raster.len(),
            frame.retained.len()
        );
        save(&frame.raster, &dir, &format!("window{i}"))?;
    }
    println!("wrote {}", dir.display());
    Ok(())
}
