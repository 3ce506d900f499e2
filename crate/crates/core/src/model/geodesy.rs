//! Equirectangular projection about the root anchor.

use super::{ModelError, RootAnchor};
use crate::geometry::Point2D;

/// WGS84 equatorial radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_378_137.0;
const POLAR_LIMIT_DEG: f64 = 89.0;

fn check_lat(lat: f64) -> Result<(), ModelError> {
    if lat.abs() >= POLAR_LIMIT_DEG || !lat.is_finite() {
        Err(ModelError::PolarLatitude(lat))
    } else {
        Ok(())
    }
}

/// Projects geodetic degrees into the anchor's local frame (x east, y north).
pub fn to_local(anchor: &RootAnchor, lat: f64, lon: f64) -> Result<Point2D, ModelError> {
    check_lat(anchor.lat)?;
    check_lat(lat)?;
    let x = EARTH_RADIUS_M * anchor.lat.to_radians().cos() * (lon - anchor.lon).to_radians();
    let y = EARTH_RADIUS_M * (lat - anchor.lat).to_radians();
    Ok(Point2D::new(x, y))
}

/// Exact algebraic inverse of [`to_local`]; returns `(lat, lon)` in degrees.
pub fn from_local(anchor: &RootAnchor, p: Point2D) -> Result<(f64, f64), ModelError> {
    check_lat(anchor.lat)?;
    let lat = anchor.lat + (p.y / EARTH_RADIUS_M).to_degrees();
    let lon = anchor.lon + (p.x / (EARTH_RADIUS_M * anchor.lat.to_radians().cos())).to_degrees();
    check_lat(lat)?;
    Ok((lat, lon))
}
