//! osmAG map model: areas, passages, hierarchy and the geodetic root anchor.
//!
//! An [`AreaGraph`] is immutable once built. Besides the raw elements it keeps
//! index structures (parent/children links, resident passages per area) that
//! the planners and localizer query constantly.

mod builder;
pub mod geodesy;
mod parse;
mod query;
mod validate;
mod write;

pub use builder::MapBuilder;
pub use geodesy::{from_local, to_local, EARTH_RADIUS_M};
pub use parse::{parse_osmag, parse_osmag_with, ParseOptions};
pub use validate::{validate, Invariant, ValidationReport, Violation, CONTAINMENT_TOLERANCE_M};
pub use write::write_osmag;

use crate::geometry::{polyline_midpoint, Point2D, Polygon};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("map has no node tagged name=root")]
    MissingRoot,
    #[error("map has more than one root node ({0} and {1})")]
    MultipleRoots(i64, i64),
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("duplicate node id {0}")]
    DuplicateNodeId(i64),
    #[error("{element}: missing required tag `{key}`")]
    MissingRequiredTag { element: String, key: String },
    #[error("{element}: invalid value `{value}` for `{key}`")]
    InvalidTagValue {
        element: String,
        key: String,
        value: String,
    },
    #[error("{element}: legacy tag `{key}` (canonical key is `{canonical}`; use lenient parsing to convert)")]
    LegacyTag {
        element: String,
        key: String,
        canonical: String,
    },
    #[error("way {way} references missing node {node}")]
    DanglingNodeRef { way: String, node: i64 },
    #[error("node {0}: invalid coordinates")]
    InvalidCoordinate(i64),
    #[error("area `{0}`: polygon is not closed")]
    UnclosedPolygon(String),
    #[error("area `{0}`: polygon has fewer than 3 distinct vertices or zero area")]
    DegeneratePolygon(String),
    #[error("passage `{0}`: fewer than 2 nodes")]
    DegeneratePassage(String),
    #[error("passage `{0}` connects an area to itself")]
    SelfLoopPassage(String),
    #[error("latitude {0} too close to a pole for the local projection")]
    PolarLatitude(f64),
    #[error("unknown area `{0}`")]
    UnknownArea(String),
    #[error("areas `{0}` and `{1}` have no common ancestor")]
    NoCommonAncestor(String, String),
    #[error("point ({x:.3}, {y:.3}) on level {level} is not inside any leaf area")]
    NotInAnyArea { x: f64, y: f64, level: String },
    #[error("point lies inside overlapping leaf areas {0:?}")]
    AmbiguousContainment(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AreaId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PassageId(pub u32);

impl AreaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PassageId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AreaType {
    Room,
    Corridor,
    Structure,
    Elevator,
    Stairs,
}

impl AreaType {
    pub fn as_str(self) -> &'static str {
        match self {
            AreaType::Room => "room",
            AreaType::Corridor => "corridor",
            AreaType::Structure => "structure",
            AreaType::Elevator => "elevator",
            AreaType::Stairs => "stairs",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "room" => AreaType::Room,
            "corridor" => AreaType::Corridor,
            "structure" => AreaType::Structure,
            "elevator" => AreaType::Elevator,
            "stairs" => AreaType::Stairs,
            _ => return None,
        })
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, AreaType::Elevator | AreaType::Stairs)
    }
}

impl fmt::Display for AreaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// OSM node in WGS84 degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoNode {
    pub id: i64,
    pub lat: f64,
    pub lon: f64,
    pub tags: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootAnchor {
    pub node_id: i64,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Area {
    pub way_id: i64,
    pub name: String,
    pub area_type: AreaType,
    /// Node refs, closed (first == last), counter-clockwise.
    pub nodes: Vec<i64>,
    /// Local-frame polygon without the closing vertex, counter-clockwise.
    pub polygon: Polygon,
    pub parent: Option<String>,
    pub level: Option<String>,
    pub height: Option<f64>,
    pub extra_tags: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Passage {
    pub way_id: i64,
    pub name: String,
    pub nodes: Vec<i64>,
    pub geometry: Vec<Point2D>,
    pub from_area: String,
    pub to_area: String,
    pub level: Option<String>,
    pub height: Option<f64>,
    pub extra_tags: BTreeMap<String, String>,
}

impl Passage {
    /// Representative point: the arclength midpoint of the polyline.
    pub fn center(&self) -> Point2D {
        polyline_midpoint(&self.geometry)
    }
}

/// Parsed osmAG map plus lookup structures.
#[derive(Clone, Debug, PartialEq)]
pub struct AreaGraph {
    pub nodes: BTreeMap<i64, GeoNode>,
    pub root: RootAnchor,
    pub areas: Vec<Area>,
    pub passages: Vec<Passage>,
    /// child name → parent name, as declared by `osmAG:parent`.
    pub hierarchy: BTreeMap<String, String>,
    area_index: HashMap<String, AreaId>,
    passage_index: HashMap<String, PassageId>,
    parent_of: Vec<Option<AreaId>>,
    children: Vec<Vec<AreaId>>,
    passage_areas: Vec<[Option<AreaId>; 2]>,
    resident: Vec<Vec<PassageId>>,
}

impl AreaGraph {
    /// Assembles a graph from already-resolved elements. Polygons are
    /// normalized to counter-clockwise winding here.
    pub fn from_parts(
        nodes: BTreeMap<i64, GeoNode>,
        root: RootAnchor,
        mut areas: Vec<Area>,
        passages: Vec<Passage>,
    ) -> Result<Self, ModelError> {
        let mut area_index = HashMap::new();
        let mut passage_index = HashMap::new();
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for a in &areas {
            if seen.insert(a.name.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateName(a.name.clone()));
            }
        }
        for p in &passages {
            if seen.insert(p.name.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateName(p.name.clone()));
            }
        }
        drop(seen);

        for a in areas.iter_mut() {
            normalize_area_polygon(a)?;
        }
        for p in &passages {
            if p.geometry.len() < 2 {
                return Err(ModelError::DegeneratePassage(p.name.clone()));
            }
            if p.from_area == p.to_area {
                return Err(ModelError::SelfLoopPassage(p.name.clone()));
            }
        }

        for (i, a) in areas.iter().enumerate() {
            area_index.insert(a.name.clone(), AreaId(i as u32));
        }
        for (i, p) in passages.iter().enumerate() {
            passage_index.insert(p.name.clone(), PassageId(i as u32));
        }

        let mut hierarchy = BTreeMap::new();
        let mut parent_of = vec![None; areas.len()];
        let mut children = vec![Vec::new(); areas.len()];
        for (i, a) in areas.iter().enumerate() {
            if let Some(pname) = &a.parent {
                hierarchy.insert(a.name.clone(), pname.clone());
                if let Some(&pid) = area_index.get(pname) {
                    parent_of[i] = Some(pid);
                    children[pid.index()].push(AreaId(i as u32));
                }
            }
        }

        let mut passage_areas = Vec::with_capacity(passages.len());
        let mut resident = vec![Vec::new(); areas.len()];
        for (i, p) in passages.iter().enumerate() {
            let f = area_index.get(&p.from_area).copied();
            let t = area_index.get(&p.to_area).copied();
            for a in [f, t].into_iter().flatten() {
                resident[a.index()].push(PassageId(i as u32));
            }
            passage_areas.push([f, t]);
        }

        Ok(Self {
            nodes,
            root,
            areas,
            passages,
            hierarchy,
            area_index,
            passage_index,
            parent_of,
            children,
            passage_areas,
            resident,
        })
    }

    pub fn area_id(&self, name: &str) -> Option<AreaId> {
        self.area_index.get(name).copied()
    }

    pub fn passage_id(&self, name: &str) -> Option<PassageId> {
        self.passage_index.get(name).copied()
    }

    pub fn area(&self, id: AreaId) -> &Area {
        &self.areas[id.index()]
    }

    pub fn passage(&self, id: PassageId) -> &Passage {
        &self.passages[id.index()]
    }

    pub fn area_by_name(&self, name: &str) -> Option<&Area> {
        self.area_id(name).map(|id| self.area(id))
    }

    pub fn passage_by_name(&self, name: &str) -> Option<&Passage> {
        self.passage_id(name).map(|id| self.passage(id))
    }

    pub fn area_ids(&self) -> impl Iterator<Item = AreaId> {
        (0..self.areas.len() as u32).map(AreaId)
    }

    pub fn passage_ids(&self) -> impl Iterator<Item = PassageId> {
        (0..self.passages.len() as u32).map(PassageId)
    }

    pub fn parent(&self, id: AreaId) -> Option<AreaId> {
        self.parent_of[id.index()]
    }

    pub fn children(&self, id: AreaId) -> &[AreaId] {
        &self.children[id.index()]
    }

    /// Areas the passage connects (`None` for dangling references).
    pub fn passage_areas(&self, id: PassageId) -> [Option<AreaId>; 2] {
        self.passage_areas[id.index()]
    }

    /// Passages incident to an area, in document order.
    pub fn resident_passages(&self, id: AreaId) -> &[PassageId] {
        &self.resident[id.index()]
    }

    /// Leaf areas are non-structure areas without children; they are the unit
    /// of direct traversability.
    pub fn is_leaf(&self, id: AreaId) -> bool {
        self.area(id).area_type != AreaType::Structure && self.children(id).is_empty()
    }

    pub fn leaf_ids(&self) -> impl Iterator<Item = AreaId> + '_ {
        self.area_ids().filter(move |&a| self.is_leaf(a))
    }

    /// Chain `[id, parent, grandparent, ...]`. Stops on cycles.
    pub fn ancestors(&self, id: AreaId) -> Vec<AreaId> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent(cur) {
            if chain.contains(&p) {
                break;
            }
            chain.push(p);
            cur = p;
        }
        chain
    }

    pub fn depth(&self, id: AreaId) -> usize {
        self.ancestors(id).len() - 1
    }

    pub fn max_depth(&self) -> usize {
        self.area_ids().map(|a| self.depth(a)).max().unwrap_or(0)
    }

    pub fn is_descendant_or_self(&self, id: AreaId, ancestor: AreaId) -> bool {
        self.ancestors(id).contains(&ancestor)
    }

    /// Distinct level labels carried by areas, sorted.
    pub fn levels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.areas.iter().filter_map(|a| a.level.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Local-frame position of a node.
    pub fn node_local(&self, id: i64) -> Option<Point2D> {
        let n = self.nodes.get(&id)?;
        to_local(&self.root, n.lat, n.lon).ok()
    }
}

fn normalize_area_polygon(a: &mut Area) -> Result<(), ModelError> {
    if a.nodes.len() < 2 || a.nodes.first() != a.nodes.last() {
        return Err(ModelError::UnclosedPolygon(a.name.clone()));
    }
    let mut distinct: Vec<i64> = a.nodes[..a.nodes.len() - 1].to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || a.polygon.vertices.len() < 3 || a.polygon.area() < 1e-9 {
        return Err(ModelError::DegeneratePolygon(a.name.clone()));
    }
    if !a.polygon.is_ccw() {
        // keep vertices aligned with nodes[..n-1]
        a.polygon.vertices.reverse();
        a.polygon.vertices.rotate_right(1);
        a.nodes.reverse();
    }
    Ok(())
}
