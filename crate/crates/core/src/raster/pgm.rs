use super::{Cell, OccupancyRaster};

pub const PGM_OCCUPIED: u8 = 0;
pub const PGM_FREE: u8 = 254;
pub const PGM_UNKNOWN: u8 = 205;

/// Binary PGM (P5) in map-server convention, top image row = highest y.
pub fn export_pgm(raster: &OccupancyRaster) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", raster.width, raster.height);
    let mut out = Vec::with_capacity(header.len() + raster.len());
    out.extend_from_slice(header.as_bytes());
    for row in (0..raster.height).rev() {
        for col in 0..raster.width {
            out.push(match raster.get((col, row)) {
                Cell::Free => PGM_FREE,
                Cell::Occupied => PGM_OCCUPIED,
                Cell::Unknown => PGM_UNKNOWN,
            });
        }
    }
    out
}

/// Companion map-server YAML for an exported PGM.
pub fn export_yaml(raster: &OccupancyRaster, image: &str) -> String {
    format!(
        "image: {image}\nresolution: {}\norigin: [{}, {}, 0.0]\nnegate: 0\noccupied_thresh: 0.65\nfree_thresh: 0.196\n",
        raster.resolution, raster.origin.x, raster.origin.y
    )
}
