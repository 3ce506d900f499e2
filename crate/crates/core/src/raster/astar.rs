use super::{CellIndex, OccupancyRaster, RasterError};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPath {
    /// Traversal cost in meters.
    pub cost: f64,
    pub cells: Vec<CellIndex>,
    pub closed_states: usize,
    /// Number of axis-aligned and diagonal moves; `cost` is
    /// `resolution * (straight + diagonal * sqrt 2)`.
    pub straight: u32,
    pub diagonal: u32,
}

const NEIGHBORS: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

struct Entry {
    f: f64,
    g: f64,
    idx: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // max-heap: smallest f first, then largest g, then smallest index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.total_cmp(&other.g))
            .then(other.idx.cmp(&self.idx))
    }
}

fn octile(a: CellIndex, b: CellIndex) -> f64 {
    let dx = (a.0 as i64 - b.0 as i64).unsigned_abs() as f64;
    let dy = (a.1 as i64 - b.1 as i64).unsigned_abs() as f64;
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    (hi - lo) + SQRT_2 * lo
}

/// 8-connected A* over free cells. Diagonal moves are only allowed when both
/// orthogonal neighbors are free. Costs are accumulated as integer move
/// counts so equal-cost paths compare equal exactly.
pub fn grid_astar(
    raster: &OccupancyRaster,
    start: CellIndex,
    goal: CellIndex,
) -> Result<GridPath, RasterError> {
    for c in [start, goal] {
        if c.0 >= raster.width || c.1 >= raster.height {
            return Err(RasterError::OutOfBounds(c.0 as i64, c.1 as i64));
        }
    }
    if !raster.is_free(start) || !raster.is_free(goal) {
        return Err(RasterError::NoPath);
    }
    let n = raster.len();
    let w = raster.width;
    let mut g_s = vec![u32::MAX; n];
    let mut g_d = vec![u32::MAX; n];
    let mut closed = vec![false; n];
    let mut parent = vec![usize::MAX; n];
    let value = |s: u32, d: u32| s as f64 + d as f64 * SQRT_2;

    let si = raster.index(start);
    let gi = raster.index(goal);
    g_s[si] = 0;
    g_d[si] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        f: octile(start, goal),
        g: 0.0,
        idx: si,
    });
    let mut closed_states = 0usize;

    while let Some(Entry { g, idx, .. }) = heap.pop() {
        if closed[idx] {
            continue;
        }
        if g > value(g_s[idx], g_d[idx]) {
            continue;
        }
        closed[idx] = true;
        closed_states += 1;
        if idx == gi {
            let mut cells = vec![goal];
            let mut cur = gi;
            while cur != si {
                cur = parent[cur];
                cells.push((cur % w, cur / w));
            }
            cells.reverse();
            let (s, d) = (g_s[gi], g_d[gi]);
            return Ok(GridPath {
                cost: raster.resolution * value(s, d),
                cells,
                closed_states,
                straight: s,
                diagonal: d,
            });
        }
        let (x, y) = ((idx % w) as i64, (idx / w) as i64);
        for &(dx, dy) in &NEIGHBORS {
            let (nx, ny) = (x + dx, y + dy);
            if !raster.in_bounds(nx, ny) {
                continue;
            }
            let nc = (nx as usize, ny as usize);
            if !raster.is_free(nc) {
                continue;
            }
            let diagonal = dx != 0 && dy != 0;
            if diagonal
                && !(raster.is_free((nx as usize, y as usize))
                    && raster.is_free((x as usize, ny as usize)))
            {
                continue;
            }
            let ni = raster.index(nc);
            if closed[ni] {
                continue;
            }
            let (s, d) = if diagonal {
                (g_s[idx], g_d[idx] + 1)
            } else {
                (g_s[idx] + 1, g_d[idx])
            };
            let ng = value(s, d);
            if g_s[ni] == u32::MAX || ng < value(g_s[ni], g_d[ni]) {
                g_s[ni] = s;
                g_d[ni] = d;
                parent[ni] = idx;
                heap.push(Entry {
                    f: ng + octile(nc, goal),
                    g: ng,
                    idx: ni,
                });
            }
        }
    }
    Err(RasterError::NoPath)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Cell;

    #[test]
    fn straight_corridor() {
        let r = OccupancyRaster::new((0, 0), 10, 10, 0.1, "1", Cell::Free);
        let p = grid_astar(&r, (0, 0), (0, 9)).unwrap();
        assert!((p.cost - 0.9).abs() < 1e-12);
        assert_eq!(p.cells.len(), 10);
    }

    #[test]
    fn occupied_goal_has_no_path() {
        let mut r = OccupancyRaster::new((0, 0), 10, 10, 0.1, "1", Cell::Free);
        r.set((5, 5), Cell::Occupied);
        assert_eq!(grid_astar(&r, (0, 0), (5, 5)), Err(RasterError::NoPath));
    }

    #[test]
    fn no_corner_cutting() {
        let mut r = OccupancyRaster::new((0, 0), 2, 2, 1.0, "1", Cell::Free);
        r.set((1, 0), Cell::Occupied);
        let p = grid_astar(&r, (0, 0), (1, 1)).unwrap();
        assert_eq!(p.cells, vec![(0, 0), (0, 1), (1, 1)]);
        assert!((p.cost - 2.0).abs() < 1e-12);
    }

    #[test]
    fn free_raster_cost_is_octile() {
        let r = OccupancyRaster::new((0, 0), 30, 30, 0.05, "1", Cell::Free);
        let p = grid_astar(&r, (2, 3), (27, 11)).unwrap();
        let expect = 0.05 * ((25.0 - 8.0) + 8.0 * SQRT_2);
        assert!((p.cost - expect).abs() < 1e-12);
    }
}
