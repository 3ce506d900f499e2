//! Map validity checks: tree, containment, geometric consistency and passage
//! adjacency. Validation never fails; it reports.

use super::{AreaGraph, AreaId};
use crate::geometry::{ray_segment_intersection, Point2D, Polygon};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Child vertices may sit this far outside the parent polygon.
pub const CONTAINMENT_TOLERANCE_M: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Invariant {
    Tree,
    Containment,
    GeometricConsistency,
    PassageAdjacency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub elements: Vec<String>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, inv: Invariant) -> bool {
        self.violations.iter().any(|v| v.invariant == inv)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn validate(graph: &AreaGraph) -> ValidationReport {
    let mut violations = Vec::new();
    check_tree(graph, &mut violations);
    check_containment(graph, &mut violations);
    check_siblings(graph, &mut violations);
    check_passages(graph, &mut violations);
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

fn check_tree(graph: &AreaGraph, out: &mut Vec<Violation>) {
    for a in &graph.areas {
        if let Some(p) = &a.parent {
            if graph.area_id(p).is_none() {
                out.push(Violation {
                    invariant: Invariant::Tree,
                    elements: vec![a.name.clone(), p.clone()],
                    message: format!("`{}` references missing parent `{p}`", a.name),
                });
            }
        }
    }
    // cycle detection: walk up from each area; report each cycle once
    let mut reported: Vec<Vec<AreaId>> = Vec::new();
    for id in graph.area_ids() {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = graph.parent(cur) {
            if let Some(pos) = path.iter().position(|&x| x == p) {
                let mut cycle: Vec<AreaId> = path[pos..].to_vec();
                cycle.sort();
                if !reported.contains(&cycle) {
                    let names: Vec<String> =
                        cycle.iter().map(|c| graph.area(*c).name.clone()).collect();
                    out.push(Violation {
                        invariant: Invariant::Tree,
                        message: format!("parent references form a cycle: {}", names.join(" -> ")),
                        elements: names,
                    });
                    reported.push(cycle);
                }
                break;
            }
            path.push(p);
            cur = p;
        }
    }
}

fn check_containment(graph: &AreaGraph, out: &mut Vec<Violation>) {
    for id in graph.area_ids() {
        let Some(pid) = graph.parent(id) else {
            continue;
        };
        let child = graph.area(id);
        let parent = graph.area(pid);
        let worst = child
            .polygon
            .vertices
            .iter()
            .filter(|v| !parent.polygon.contains(**v))
            .map(|v| parent.polygon.boundary_distance(*v))
            .fold(0.0f64, f64::max);
        if worst > CONTAINMENT_TOLERANCE_M {
            out.push(Violation {
                invariant: Invariant::Containment,
                elements: vec![child.name.clone(), parent.name.clone()],
                message: format!(
                    "`{}` extends {worst:.3} m outside parent `{}`",
                    child.name, parent.name
                ),
            });
        }
    }
}

fn check_siblings(graph: &AreaGraph, out: &mut Vec<Violation>) {
    // group by (declared parent, level)
    let mut groups: BTreeMap<(Option<String>, Option<String>), Vec<AreaId>> = BTreeMap::new();
    for id in graph.area_ids() {
        let a = graph.area(id);
        groups
            .entry((a.parent.clone(), a.level.clone()))
            .or_default()
            .push(id);
    }
    for members in groups.values() {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let pa = &graph.area(a).polygon;
                let pb = &graph.area(b).polygon;
                if interiors_overlap(pa, pb, CONTAINMENT_TOLERANCE_M) {
                    let (na, nb) = (&graph.area(a).name, &graph.area(b).name);
                    out.push(Violation {
                        invariant: Invariant::GeometricConsistency,
                        elements: vec![na.clone(), nb.clone()],
                        message: format!("siblings `{na}` and `{nb}` on the same level overlap"),
                    });
                }
            }
        }
    }
}

fn check_passages(graph: &AreaGraph, out: &mut Vec<Violation>) {
    for p in &graph.passages {
        for end in [&p.from_area, &p.to_area] {
            if graph.area_id(end).is_none() {
                out.push(Violation {
                    invariant: Invariant::PassageAdjacency,
                    elements: vec![p.name.clone(), end.clone()],
                    message: format!("passage `{}` references missing area `{end}`", p.name),
                });
            }
        }
    }
}

/// True when the two polygons share interior area beyond `tol` meters of
/// boundary noise. Shared edges and touching corners do not count.
pub(crate) fn interiors_overlap(a: &Polygon, b: &Polygon, tol: f64) -> bool {
    let ba = a.bounds().expanded(-tol);
    let bb = b.bounds().expanded(-tol);
    if ba.is_empty() || bb.is_empty() || !ba.intersects(&bb) {
        return false;
    }
    let deep_inside = |p: &Polygon, v| p.contains(v) && p.boundary_distance(v) > tol;
    if a.vertices.iter().any(|v| deep_inside(b, *v))
        || b.vertices.iter().any(|v| deep_inside(a, *v))
    {
        return true;
    }
    if deep_inside(b, a.interior_point()) || deep_inside(a, b.interior_point()) {
        return true;
    }
    // split each edge at every contact with the other polygon; a piece
    // running through the other interior means the interiors overlap
    boundary_enters(a, b, tol) || boundary_enters(b, a, tol)
}

fn boundary_enters(a: &Polygon, b: &Polygon, tol: f64) -> bool {
    let deep_inside = |v: Point2D| b.contains(v) && b.boundary_distance(v) > tol;
    for (a0, a1) in a.edges() {
        let d = a1.sub(a0);
        let len2 = d.dot(d);
        if len2 == 0.0 {
            continue;
        }
        let mut ts = vec![0.0, 1.0];
        for (b0, b1) in b.edges() {
            if let Some(t) = ray_segment_intersection(a0, d, b0, b1) {
                if t <= 1.0 {
                    ts.push(t);
                }
            }
            for v in [b0, b1] {
                let t = v.sub(a0).dot(d) / len2;
                if (0.0..=1.0).contains(&t) {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        if ts
            .windows(2)
            .any(|w| w[1] > w[0] && deep_inside(a0.lerp(a1, 0.5 * (w[0] + w[1]))))
        {
            return true;
        }
    }
    false
}
