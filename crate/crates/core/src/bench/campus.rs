//! Deterministic multi-floor campus generator.
//!
//! Every floor is a straight corridor spine cut into sectors; each sector
//! holds a corridor segment with rooms on both sides. Elevators sit at the
//! ends of the spine, one area per floor, stacked floors joined by
//! inter-floor passages.

use super::BenchError;
use crate::geometry::{Point2D, Polygon};
use crate::model::{write_osmag, AreaGraph, AreaType, MapBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampusSpec {
    pub floors: usize,
    /// Corridor segments per floor, laid out west to east.
    pub sectors: usize,
    /// Rooms on each side of every corridor segment.
    pub rooms_per_side: usize,
    /// 0, 1 (west end) or 2 (both ends).
    pub elevators: usize,
    pub room_width: f64,
    pub room_depth: f64,
    pub corridor_width: f64,
    pub door_width: f64,
    pub elevator_width: f64,
    pub root_lat: f64,
    pub root_lon: f64,
}

impl Default for CampusSpec {
    /// Three floors of five sectors with eight rooms per side: 261 leaves.
    fn default() -> Self {
        Self {
            floors: 3,
            sectors: 5,
            rooms_per_side: 8,
            elevators: 2,
            room_width: 6.0,
            room_depth: 8.0,
            corridor_width: 3.0,
            door_width: 1.0,
            elevator_width: 3.0,
            root_lat: 31.17947,
            root_lon: 121.59085,
        }
    }
}

impl CampusSpec {
    /// Single floor, single sector with `rooms` rooms (rounded up to even).
    pub fn small(rooms: usize) -> Self {
        Self {
            floors: 1,
            sectors: 1,
            rooms_per_side: rooms.div_ceil(2).max(1),
            elevators: 0,
            ..Self::default()
        }
    }

    pub fn rooms_per_floor(&self) -> usize {
        self.sectors * self.rooms_per_side * 2
    }

    pub fn sector_length(&self) -> f64 {
        self.rooms_per_side as f64 * self.room_width
    }

    pub fn spine_length(&self) -> f64 {
        self.sectors as f64 * self.sector_length()
    }

    fn check(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::SpecInfeasible(m.to_string()));
        if self.floors == 0 || self.sectors == 0 || self.rooms_per_side == 0 {
            return bad("floors, sectors and rooms_per_side must be positive");
        }
        if self.elevators > 2 {
            return bad("at most two elevators (one per spine end)");
        }
        if self.floors > 1 && self.elevators == 0 {
            return bad("multi-floor campus needs at least one elevator");
        }
        let dims = [
            self.room_width,
            self.room_depth,
            self.corridor_width,
            self.door_width,
            self.elevator_width,
        ];
        if dims.iter().any(|d| !d.is_finite() || *d <= 0.0) {
            return bad("dimensions must be positive");
        }
        if self.door_width + 1.0 > self.room_width || self.door_width + 0.5 > self.corridor_width {
            return bad("doors need 0.5 m of wall on each side");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CampusManifest {
    pub seed: u64,
    pub spec: CampusSpec,
    pub floors: usize,
    pub areas: usize,
    pub leaf_areas: usize,
    pub structure_areas: usize,
    pub rooms: usize,
    pub corridors: usize,
    pub elevators: usize,
    pub passages: usize,
    pub room_doors: usize,
    pub corridor_links: usize,
    pub elevator_doors: usize,
    pub inter_floor_passages: usize,
    /// Polygon area in m² summed per area type.
    pub area_m2_by_type: BTreeMap<String, f64>,
    /// Leaf area in m² summed over all floors.
    pub free_area_m2: f64,
    /// Building outline area of a single floor.
    pub footprint_m2: f64,
}

pub struct Campus {
    pub xml: String,
    pub graph: AreaGraph,
    pub manifest: CampusManifest,
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Point2D> {
    vec![
        Point2D::new(x0, y0),
        Point2D::new(x1, y0),
        Point2D::new(x1, y1),
        Point2D::new(x0, y1),
    ]
}

fn p(x: f64, y: f64) -> Point2D {
    Point2D::new(x, y)
}

/// Generates the campus for `seed`. Door positions along each wall are the
/// only random element, so the element counts depend on `spec` alone.
pub fn generate_synthetic_campus(seed: u64, spec: &CampusSpec) -> Result<Campus, BenchError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = MapBuilder::new(spec.root_lat, spec.root_lon);
    let mut m = CampusManifest {
        seed,
        spec: spec.clone(),
        floors: spec.floors,
        ..Default::default()
    };
    let add_area = |m: &mut CampusManifest, kind: AreaType, ring: &[Point2D]| {
        *m.area_m2_by_type
            .entry(kind.as_str().to_string())
            .or_default() += Polygon::new(ring.to_vec()).area();
        m.areas += 1;
        match kind {
            AreaType::Structure => m.structure_areas += 1,
            _ => m.leaf_areas += 1,
        }
        match kind {
            AreaType::Room => m.rooms += 1,
            AreaType::Corridor => m.corridors += 1,
            AreaType::Elevator => m.elevators += 1,
            _ => {}
        }
    };

    let (w, d, cw) = (spec.room_width, spec.room_depth, spec.corridor_width);
    let (y_c0, y_c1, y_top) = (d, d + cw, 2.0 * d + cw);
    let len = spec.spine_length();
    let ew = spec.elevator_width;
    let x_min = if spec.elevators >= 1 { -ew } else { 0.0 };
    let x_max = if spec.elevators >= 2 { len + ew } else { len };
    let half_door = spec.door_width / 2.0;
    // elevator doors sit centered on the corridor ends
    let ed = (y_c0 + cw / 2.0 - half_door, y_c0 + cw / 2.0 + half_door);

    let building = rect(x_min, 0.0, x_max, y_top);
    b.area("campus", AreaType::Structure, &building, None, None);
    add_area(&mut m, AreaType::Structure, &building);
    m.footprint_m2 = Polygon::new(building.clone()).area();

    for f in 1..=spec.floors {
        let lvl = f.to_string();
        let level = Some(lvl.as_str());
        let floor_name = format!("F{f}");
        b.area(
            &floor_name,
            AreaType::Structure,
            &building,
            Some("campus"),
            level,
        );
        add_area(&mut m, AreaType::Structure, &building);

        for s in 0..spec.sectors {
            let x0 = s as f64 * spec.sector_length();
            let x1 = x0 + spec.sector_length();
            let sector = format!("F{f}-S{s}");
            let ring = rect(x0, 0.0, x1, y_top);
            b.area(
                &sector,
                AreaType::Structure,
                &ring,
                Some(&floor_name),
                level,
            );
            add_area(&mut m, AreaType::Structure, &ring);

            let corridor = format!("{sector}-C");
            // south wall of the corridor runs east, north wall runs west
            let mut south = vec![p(x0, y_c0)];
            let mut north = vec![p(x1, y_c1)];
            let mut doors = Vec::new();
            for i in 0..spec.rooms_per_side {
                let xa = x0 + i as f64 * w;
                let xb = xa + w;
                for side in 0..2 {
                    let c = rng.random_range(xa + 0.5 + half_door..=xb - 0.5 - half_door);
                    let (dl, dr) = (c - half_door, c + half_door);
                    let room = format!("{sector}-R{}{i:02}", if side == 0 { 'S' } else { 'N' });
                    let (ring, door) = if side == 0 {
                        (
                            vec![
                                p(xa, 0.0),
                                p(xb, 0.0),
                                p(xb, y_c0),
                                p(dr, y_c0),
                                p(dl, y_c0),
                                p(xa, y_c0),
                            ],
                            [p(dl, y_c0), p(dr, y_c0)],
                        )
                    } else {
                        (
                            vec![
                                p(xa, y_c1),
                                p(dl, y_c1),
                                p(dr, y_c1),
                                p(xb, y_c1),
                                p(xb, y_top),
                                p(xa, y_top),
                            ],
                            [p(dl, y_c1), p(dr, y_c1)],
                        )
                    };
                    b.area(&room, AreaType::Room, &ring, Some(&sector), level);
                    add_area(&mut m, AreaType::Room, &ring);
                    doors.push((room, door));
                    if side == 0 {
                        south.extend([p(xa, y_c0), p(dl, y_c0), p(dr, y_c0)]);
                    } else {
                        north.extend([p(xb, y_c1), p(dr, y_c1), p(dl, y_c1)]);
                    }
                }
            }
            // north points were pushed west-to-east per room; reverse within
            let north_tail: Vec<Point2D> = {
                let mut v = north.split_off(1);
                v.sort_by(|a, b| b.x.total_cmp(&a.x));
                v
            };
            north.extend(north_tail);
            let mut ring = south;
            ring.push(p(x1, y_c0));
            if s + 1 == spec.sectors && spec.elevators >= 2 {
                ring.extend([p(x1, ed.0), p(x1, ed.1)]);
            }
            ring.extend(north);
            ring.push(p(x0, y_c1));
            if s == 0 && spec.elevators >= 1 {
                ring.extend([p(x0, ed.1), p(x0, ed.0)]);
            }
            b.area(&corridor, AreaType::Corridor, &ring, Some(&sector), level);
            add_area(&mut m, AreaType::Corridor, &ring);

            for (room, door) in doors {
                let name = format!("{room}-door");
                b.passage(&name, &door, &room, &corridor, level);
                m.room_doors += 1;
            }
            if s > 0 {
                let prev = format!("F{f}-S{}-C", s - 1);
                b.passage(
                    &format!("{sector}-link"),
                    &[p(x0, y_c0), p(x0, y_c1)],
                    &prev,
                    &corridor,
                    level,
                );
                m.corridor_links += 1;
            }
        }

        let ends = [
            ("W", -ew, 0.0, 0.0, format!("F{f}-S0-C")),
            (
                "E",
                len,
                len + ew,
                len,
                format!("F{f}-S{}-C", spec.sectors - 1),
            ),
        ];
        for (tag, ex0, ex1, door_x, corridor) in ends.iter().take(spec.elevators) {
            let name = format!("F{f}-E{tag}");
            let ring = if *door_x == *ex1 {
                vec![
                    p(*ex0, y_c0),
                    p(*ex1, y_c0),
                    p(*ex1, ed.0),
                    p(*ex1, ed.1),
                    p(*ex1, y_c1),
                    p(*ex0, y_c1),
                ]
            } else {
                vec![
                    p(*ex0, y_c0),
                    p(*ex1, y_c0),
                    p(*ex1, y_c1),
                    p(*ex0, y_c1),
                    p(*ex0, ed.1),
                    p(*ex0, ed.0),
                ]
            };
            b.area(&name, AreaType::Elevator, &ring, Some(&floor_name), level);
            add_area(&mut m, AreaType::Elevator, &ring);
            b.passage(
                &format!("{name}-door"),
                &[p(*door_x, ed.0), p(*door_x, ed.1)],
                &name,
                corridor,
                level,
            );
            m.elevator_doors += 1;
            if f > 1 {
                let below = format!("F{}-E{tag}", f - 1);
                let cx = (ex0 + ex1) / 2.0;
                let cy = y_c0 + cw / 2.0;
                let label = format!("{};{f}", f - 1);
                b.passage(
                    &format!("E{tag}-{}-{f}", f - 1),
                    &[p(cx - 0.5, cy), p(cx + 0.5, cy)],
                    &below,
                    &name,
                    Some(&label),
                );
                m.inter_floor_passages += 1;
            }
        }
    }

    m.passages = m.room_doors + m.corridor_links + m.elevator_doors + m.inter_floor_passages;
    m.free_area_m2 = m
        .area_m2_by_type
        .iter()
        .filter(|(k, _)| k.as_str() != "structure")
        .map(|(_, v)| v)
        .sum();
    let graph = b.build()?;
    let xml = write_osmag(&graph);
    Ok(Campus {
        xml,
        graph,
        manifest: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn small_campus_validates() {
        let c = generate_synthetic_campus(1, &CampusSpec::small(4)).unwrap();
        let report = validate(&c.graph);
        assert!(report.ok, "{}", report.to_json());
        assert_eq!(c.manifest.rooms, 4);
        assert_eq!(c.graph.passages.len(), c.manifest.passages);
    }

    #[test]
    fn default_campus_counts() {
        let c = generate_synthetic_campus(7, &CampusSpec::default()).unwrap();
        let report = validate(&c.graph);
        assert!(report.ok, "{}", report.to_json());
        let leaves = c.graph.leaf_ids().count();
        assert_eq!(leaves, c.manifest.leaf_areas);
        assert!(leaves >= 200);
        assert_eq!(c.graph.areas.len(), c.manifest.areas);
        assert_eq!(c.graph.levels().len(), 3);
    }

    #[test]
    fn one_elevator_three_floors_has_two_inter_floor_passages() {
        let spec = CampusSpec {
            elevators: 1,
            sectors: 1,
            rooms_per_side: 2,
            ..CampusSpec::default()
        };
        let c = generate_synthetic_campus(3, &spec).unwrap();
        assert_eq!(c.manifest.inter_floor_passages, 2);
        let names: Vec<&str> = c
            .graph
            .passages
            .iter()
            .filter(|p| p.level.as_deref().is_some_and(|l| l.contains(';')))
            .map(|p| p.name.as_str())
            .collect();
        assert_eq!(names, ["EW-1-2", "EW-2-3"]);
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = CampusSpec::default();
        let a = generate_synthetic_campus(11, &spec).unwrap();
        let b = generate_synthetic_campus(11, &spec).unwrap();
        assert_eq!(a.xml, b.xml);
        let c = generate_synthetic_campus(12, &spec).unwrap();
        assert_ne!(a.xml, c.xml);
    }

    #[test]
    fn infeasible_specs_rejected() {
        let spec = CampusSpec {
            floors: 2,
            elevators: 0,
            ..CampusSpec::default()
        };
        assert!(matches!(
            generate_synthetic_campus(1, &spec),
            Err(BenchError::SpecInfeasible(_))
        ));
    }
}
