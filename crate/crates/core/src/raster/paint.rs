use super::{Cell, OccupancyRaster, RasterError};
use crate::geometry::{
    clip_segment, closest_point_on_segment, point_segment_distance, Bounds, Point2D, Pose2D,
};
use crate::model::{AreaGraph, AreaId, CONTAINMENT_TOLERANCE_M};

/// Fraction of a cell used to push wall and door lines off lattice lines and
/// onto the area's own side.
const NUDGE_FRACTION: f64 = 1e-4;

/// Rasterizes one leaf area on its bounding box plus a one-cell margin.
pub fn rasterize_leaf(
    graph: &AreaGraph,
    area: AreaId,
    resolution: f64,
) -> Result<OccupancyRaster, RasterError> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(RasterError::InvalidResolution(resolution));
    }
    let a = graph.area(area);
    if a.polygon.vertices.len() < 3 || a.polygon.area() < resolution * resolution * 1e-3 {
        return Err(RasterError::DegenerateArea(a.name.clone()));
    }
    let level = a.level.clone().unwrap_or_default();
    let mut r =
        OccupancyRaster::covering(&a.polygon.bounds(), resolution, 1, &level, Cell::Unknown);
    rasterize_areas(graph, &[area], &mut r);
    Ok(r)
}

/// Paints `areas` into `raster`: interiors free, boundaries occupied, then
/// resident passages reopened. Each area only touches cells inside its own
/// bounding box, so the result on any cell depends only on the areas whose
/// boxes cover that cell.
pub fn rasterize_areas(graph: &AreaGraph, areas: &[AreaId], raster: &mut OccupancyRaster) {
    let extent = raster.world_bounds();
    let visible: Vec<AreaId> = areas
        .iter()
        .copied()
        .filter(|&a| graph.area(a).polygon.bounds().intersects(&extent))
        .collect();
    for &a in &visible {
        fill_interior(raster, &graph.area(a).polygon.vertices);
    }
    for &a in &visible {
        draw_walls(raster, &graph.area(a).polygon.vertices);
    }
    for &a in &visible {
        for &p in graph.resident_passages(a) {
            reopen_passage(
                raster,
                &graph.area(a).polygon.vertices,
                &graph.passage(p).geometry,
            );
        }
    }
}

/// Raster of every leaf area on `level`.
pub fn rasterize_floor(
    graph: &AreaGraph,
    level: &str,
    resolution: f64,
) -> Result<OccupancyRaster, RasterError> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(RasterError::InvalidResolution(resolution));
    }
    let leaves: Vec<AreaId> = graph
        .leaf_ids()
        .filter(|&a| graph.area(a).level.as_deref() == Some(level))
        .collect();
    let mut b = Bounds::empty();
    for &a in &leaves {
        b = b.union(&graph.area(a).polygon.bounds());
    }
    if b.is_empty() {
        return Ok(OccupancyRaster::new(
            (0, 0),
            1,
            1,
            resolution,
            level,
            Cell::Unknown,
        ));
    }
    let mut r = OccupancyRaster::covering(&b, resolution, 1, level, Cell::Unknown);
    rasterize_areas(graph, &leaves, &mut r);
    Ok(r)
}

/// One rolling-window update: the raster plus the leaf areas painted into it.
#[derive(Clone, Debug)]
pub struct WindowFrame {
    pub raster: OccupancyRaster,
    pub retained: Vec<AreaId>,
}

/// Fixed-size local map that follows the robot.
#[derive(Clone, Debug)]
pub struct RollingWindow {
    pub window_m: f64,
    pub resolution: f64,
}

impl RollingWindow {
    pub fn new(window_m: f64, resolution: f64) -> Self {
        Self {
            window_m,
            resolution,
        }
    }

    pub fn cells_per_side(&self) -> usize {
        (self.window_m / self.resolution).round().max(1.0) as usize
    }

    /// Rebuilds the window around `center`. The raster is aligned to the
    /// global lattice, so successive windows agree on their overlap.
    pub fn tick(&self, graph: &AreaGraph, center: &Pose2D) -> WindowFrame {
        let n = self.cells_per_side();
        let res = self.resolution;
        let cx = (center.x / res).floor() as i64;
        let cy = (center.y / res).floor() as i64;
        let half = (n / 2) as i64;
        let mut raster = OccupancyRaster::new(
            (cx - half, cy - half),
            n,
            n,
            res,
            center.level.clone(),
            Cell::Unknown,
        );
        let probe = raster.world_bounds().expanded(res);
        let retained: Vec<AreaId> = graph
            .leaf_ids()
            .filter(|&a| {
                let area = graph.area(a);
                area.level.as_deref() == Some(center.level.as_str())
                    && area.polygon.bounds().intersects(&probe)
            })
            .collect();
        rasterize_areas(graph, &retained, &mut raster);
        WindowFrame { raster, retained }
    }
}

/// Window×window raster centered on `center`, restricted to `level`.
pub fn rolling_window(
    graph: &AreaGraph,
    center: &Pose2D,
    level: &str,
    window: f64,
    resolution: f64,
) -> OccupancyRaster {
    let mut c = center.clone();
    c.level = level.to_string();
    RollingWindow::new(window, resolution)
        .tick(graph, &c)
        .raster
}

/// Marks free every cell whose center passes the even-odd ray-cast test.
/// Crossings are computed exactly as in [`crate::geometry::Polygon::contains`].
fn fill_interior(raster: &mut OccupancyRaster, ring: &[Point2D]) {
    let n = ring.len();
    if n < 3 {
        return;
    }
    let b = Bounds::from_points(ring);
    let Some((c0, r0, c1, r1)) = cell_span(raster, &b) else {
        return;
    };
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    for row in r0..=r1 {
        let py = raster.cell_center((0, row)).y;
        xs.clear();
        let mut j = n - 1;
        for i in 0..n {
            let vi = ring[i];
            let vj = ring[j];
            if (vi.y > py) != (vj.y > py) {
                xs.push(vj.x + (py - vj.y) * (vi.x - vj.x) / (vi.y - vj.y));
            }
            j = i;
        }
        if xs.is_empty() {
            continue;
        }
        xs.sort_by(f64::total_cmp);
        for col in c0..=c1 {
            let px = raster.cell_center((col, row)).x;
            let above = xs.len() - xs.partition_point(|&c| c <= px);
            if above % 2 == 1 {
                raster.set((col, row), Cell::Free);
            }
        }
    }
}

/// Local cell range covered by `b`, clipped to the raster.
fn cell_span(raster: &OccupancyRaster, b: &Bounds) -> Option<(usize, usize, usize, usize)> {
    if b.is_empty() {
        return None;
    }
    let (gx0, gy0) = raster.lattice_of(b.min);
    let (gx1, gy1) = raster.lattice_of(b.max);
    let c0 = (gx0 - raster.origin_index.0).max(0);
    let r0 = (gy0 - raster.origin_index.1).max(0);
    let c1 = (gx1 - raster.origin_index.0).min(raster.width as i64 - 1);
    let r1 = (gy1 - raster.origin_index.1).min(raster.height as i64 - 1);
    (c0 <= c1 && r0 <= r1).then_some((c0 as usize, r0 as usize, c1 as usize, r1 as usize))
}

/// Draws each boundary edge occupied, shifted a hair toward the interior and
/// shortened at both ends so the ring stays inside the area's own cells.
fn draw_walls(raster: &mut OccupancyRaster, ring: &[Point2D]) {
    let eps = raster.resolution * NUDGE_FRACTION;
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if let Some((p, q)) = inset_segment(a, b, eps) {
            trace_cells(raster, p, q, |r, c| r.set(c, Cell::Occupied));
        }
    }
}

/// `a→b` moved `eps` along its left normal (the interior of a CCW ring) and
/// trimmed by `eps` at both ends.
fn inset_segment(a: Point2D, b: Point2D, eps: f64) -> Option<(Point2D, Point2D)> {
    let d = b.sub(a);
    let len = d.norm();
    if len <= 2.0 * eps {
        return None;
    }
    let u = d.scale(1.0 / len);
    let nrm = Point2D::new(-u.y, u.x);
    Some((
        a.add(nrm.scale(eps)).add(u.scale(eps)),
        b.add(nrm.scale(eps)).sub(u.scale(eps)),
    ))
}

/// Reopens the cells of a passage on `ring`'s side. Passage segments lying on
/// a boundary edge (within the containment tolerance) are snapped onto it and
/// traced exactly like the wall they cut; other segments only reopen cells
/// whose centers are inside the area.
fn reopen_passage(raster: &mut OccupancyRaster, ring: &[Point2D], geometry: &[Point2D]) {
    let eps = raster.resolution * NUDGE_FRACTION;
    let n = ring.len();
    for w in geometry.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let edge = (0..n)
            .map(|i| (ring[i], ring[(i + 1) % n]))
            .find(|&(a, b)| {
                point_segment_distance(p0, a, b) <= CONTAINMENT_TOLERANCE_M
                    && point_segment_distance(p1, a, b) <= CONTAINMENT_TOLERANCE_M
            });
        match edge {
            Some((a, b)) => {
                let q0 = closest_point_on_segment(p0, a, b);
                let q1 = closest_point_on_segment(p1, a, b);
                // orient along the edge so the left normal still points inward
                let (s, t) = if q1.sub(q0).dot(b.sub(a)) >= 0.0 {
                    (q0, q1)
                } else {
                    (q1, q0)
                };
                if let Some((p, q)) = inset_segment(s, t, eps) {
                    trace_cells(raster, p, q, |r, c| r.set(c, Cell::Free));
                }
            }
            None => {
                let poly = crate::geometry::Polygon::new(ring.to_vec());
                trace_cells(raster, p0, p1, |r, c| {
                    if poly.contains(r.cell_center(c)) {
                        r.set(c, Cell::Free);
                    }
                });
            }
        }
    }
}

/// Visits every cell the segment passes through (grid traversal in lattice
/// coordinates), restricted to the raster.
pub(crate) fn trace_cells(
    raster: &mut OccupancyRaster,
    p: Point2D,
    q: Point2D,
    mut visit: impl FnMut(&mut OccupancyRaster, (usize, usize)),
) {
    let bounds = raster.world_bounds().expanded(raster.resolution);
    let Some((t0, t1)) = clip_segment(p, q, &bounds) else {
        return;
    };
    let a = p.lerp(q, t0);
    let b = p.lerp(q, t1);
    for g in lattice_line(a, b, raster.resolution) {
        if let Some(c) = raster.local_of_lattice(g) {
            visit(raster, c);
        }
    }
}

/// Lattice cells crossed by segment `a→b`, in order (Amanatides–Woo).
pub(crate) fn lattice_line(a: Point2D, b: Point2D, res: f64) -> Vec<(i64, i64)> {
    let mut x = (a.x / res).floor() as i64;
    let mut y = (a.y / res).floor() as i64;
    let xe = (b.x / res).floor() as i64;
    let ye = (b.y / res).floor() as i64;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
    let next_boundary = |i: i64, step: i64| -> f64 {
        if step > 0 {
            (i + 1) as f64 * res
        } else {
            i as f64 * res
        }
    };
    let mut t_max_x = if dx != 0.0 {
        (next_boundary(x, step_x) - a.x) / dx
    } else {
        f64::INFINITY
    };
    let mut t_max_y = if dy != 0.0 {
        (next_boundary(y, step_y) - a.y) / dy
    } else {
        f64::INFINITY
    };
    let t_dx = if dx != 0.0 {
        res / dx.abs()
    } else {
        f64::INFINITY
    };
    let t_dy = if dy != 0.0 {
        res / dy.abs()
    } else {
        f64::INFINITY
    };
    let mut out = vec![(x, y)];
    let limit = ((xe - x).abs() + (ye - y).abs()) as usize;
    for _ in 0..limit {
        if x == xe && y == ye {
            break;
        }
        if t_max_x < t_max_y {
            if x == xe {
                y += step_y;
                t_max_y += t_dy;
            } else {
                x += step_x;
                t_max_x += t_dx;
            }
        } else if y == ye {
            x += step_x;
            t_max_x += t_dx;
        } else {
            y += step_y;
            t_max_y += t_dy;
        }
        out.push((x, y));
    }
    out
}
