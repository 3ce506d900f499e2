//! Small single-floor maps used by the localization tests and examples.

use crate::geometry::Point2D;
use crate::model::{AreaGraph, AreaType, MapBuilder, ModelError};

const LAT: f64 = 31.0;
const LON: f64 = 121.0;

fn pt(x: f64, y: f64) -> Point2D {
    Point2D::new(x, y)
}

/// One square room `[0, side]²` on level "1".
pub fn square_room(side: f64) -> Result<AreaGraph, ModelError> {
    let mut b = MapBuilder::new(LAT, LON);
    b.area(
        "room",
        AreaType::Room,
        &[pt(0.0, 0.0), pt(side, 0.0), pt(side, side), pt(0.0, side)],
        None,
        Some("1"),
    );
    b.build()
}

/// Straight corridor `[0, length] × [0, width]` with door niches
/// (1 m wide, 0.3 m deep) every 4 m along both long walls, offset between
/// the two sides.
pub fn niche_corridor(length: f64, width: f64) -> Result<AreaGraph, ModelError> {
    let (niche_w, niche_d, pitch) = (1.0, 0.3, 4.0);
    let mut ring = vec![pt(0.0, 0.0)];
    let mut x = 2.0;
    while x + niche_w <= length - 1.0 {
        ring.extend([
            pt(x, 0.0),
            pt(x, -niche_d),
            pt(x + niche_w, -niche_d),
            pt(x + niche_w, 0.0),
        ]);
        x += pitch;
    }
    ring.extend([pt(length, 0.0), pt(length, width)]);
    let mut x = length - 4.0;
    while x - niche_w >= 1.0 {
        ring.extend([
            pt(x, width),
            pt(x, width + niche_d),
            pt(x - niche_w, width + niche_d),
            pt(x - niche_w, width),
        ]);
        x -= pitch;
    }
    ring.push(pt(0.0, width));
    let mut b = MapBuilder::new(LAT, LON);
    b.area("corridor", AreaType::Corridor, &ring, None, Some("1"));
    b.build()
}

/// L-shaped room: an 8 × 6 rectangle with a 4 × 3 notch cut from one
/// corner, placed with its lower-left corner at `origin`.
fn l_ring(origin: Point2D) -> Vec<Point2D> {
    [
        (0.0, 0.0),
        (8.0, 0.0),
        (8.0, 3.0),
        (4.0, 3.0),
        (4.0, 6.0),
        (0.0, 6.0),
    ]
    .iter()
    .map(|&(x, y)| origin.add(pt(x, y)))
    .collect()
}

/// Single asymmetric room.
pub fn l_room() -> Result<AreaGraph, ModelError> {
    let mut b = MapBuilder::new(LAT, LON);
    b.area(
        "room",
        AreaType::Room,
        &l_ring(pt(0.0, 0.0)),
        None,
        Some("1"),
    );
    b.build()
}

/// Two identical L-shaped rooms 12 m apart that share no wall.
pub fn twin_l_rooms() -> Result<AreaGraph, ModelError> {
    let mut b = MapBuilder::new(LAT, LON);
    b.area(
        "west",
        AreaType::Room,
        &l_ring(pt(0.0, 0.0)),
        None,
        Some("1"),
    );
    b.area(
        "east",
        AreaType::Room,
        &l_ring(pt(20.0, 0.0)),
        None,
        Some("1"),
    );
    b.build()
}
