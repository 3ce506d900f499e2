use super::{
    from_local, to_local, Area, AreaGraph, AreaType, GeoNode, ModelError, Passage, RootAnchor,
};
use crate::geometry::{Point2D, Polygon};
use std::collections::{BTreeMap, HashMap};

const COORD_SCALE: f64 = 1e7;

/// Builds an [`AreaGraph`] from local-frame coordinates.
///
/// Coordinates are stored as WGS84 degrees rounded to 7 decimals, exactly as
/// they would be written to disk, and vertices that round to the same
/// coordinate share one node. Local geometry is recomputed from the rounded
/// degrees, so a built map survives a write/parse round trip unchanged.
pub struct MapBuilder {
    root: RootAnchor,
    nodes: BTreeMap<i64, GeoNode>,
    by_coord: HashMap<(i64, i64), i64>,
    areas: Vec<Area>,
    passages: Vec<Passage>,
    next_node: i64,
    next_way: i64,
}

impl MapBuilder {
    pub fn new(root_lat: f64, root_lon: f64) -> Self {
        let lat = round7(root_lat);
        let lon = round7(root_lon);
        let mut nodes = BTreeMap::new();
        let mut tags = BTreeMap::new();
        tags.insert("name".to_string(), "root".to_string());
        nodes.insert(
            1,
            GeoNode {
                id: 1,
                lat,
                lon,
                tags,
            },
        );
        Self {
            root: RootAnchor {
                node_id: 1,
                lat,
                lon,
            },
            nodes,
            by_coord: HashMap::new(),
            areas: Vec::new(),
            passages: Vec::new(),
            next_node: 2,
            next_way: 1,
        }
    }

    pub fn root(&self) -> &RootAnchor {
        &self.root
    }

    /// Returns the id of the node at `p`, creating it if needed.
    pub fn node(&mut self, p: Point2D) -> i64 {
        let (lat, lon) =
            from_local(&self.root, p).expect("builder coordinates within projection range");
        let key = (
            (lat * COORD_SCALE).round() as i64,
            (lon * COORD_SCALE).round() as i64,
        );
        if let Some(&id) = self.by_coord.get(&key) {
            return id;
        }
        let id = self.next_node;
        self.next_node += 1;
        self.nodes.insert(
            id,
            GeoNode {
                id,
                lat: key.0 as f64 / COORD_SCALE,
                lon: key.1 as f64 / COORD_SCALE,
                tags: BTreeMap::new(),
            },
        );
        self.by_coord.insert(key, id);
        id
    }

    /// Adds a tagged standalone node (e.g. a semantic object).
    pub fn tagged_node(&mut self, p: Point2D, tags: &[(&str, &str)]) -> i64 {
        let id = self.next_node;
        self.next_node += 1;
        let (lat, lon) =
            from_local(&self.root, p).expect("builder coordinates within projection range");
        self.nodes.insert(
            id,
            GeoNode {
                id,
                lat: round7(lat),
                lon: round7(lon),
                tags: tags
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect(),
            },
        );
        id
    }

    /// Adds an area from an open ring of vertices (closure is implicit).
    pub fn area(
        &mut self,
        name: &str,
        area_type: AreaType,
        ring: &[Point2D],
        parent: Option<&str>,
        level: Option<&str>,
    ) -> &mut Area {
        let mut ids: Vec<i64> = Vec::with_capacity(ring.len() + 1);
        for p in ring {
            let id = self.node(*p);
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        if ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        if let Some(&first) = ids.first() {
            ids.push(first);
        }
        let way_id = self.next_way;
        self.next_way += 1;
        self.areas.push(Area {
            way_id,
            name: name.into(),
            area_type,
            nodes: ids,
            polygon: Polygon::new(Vec::new()),
            parent: parent.map(Into::into),
            level: level.map(Into::into),
            height: None,
            extra_tags: BTreeMap::new(),
        });
        self.areas.last_mut().unwrap()
    }

    pub fn passage(
        &mut self,
        name: &str,
        pts: &[Point2D],
        from: &str,
        to: &str,
        level: Option<&str>,
    ) -> &mut Passage {
        let ids: Vec<i64> = pts.iter().map(|p| self.node(*p)).collect();
        let way_id = self.next_way;
        self.next_way += 1;
        self.passages.push(Passage {
            way_id,
            name: name.into(),
            nodes: ids,
            geometry: Vec::new(),
            from_area: from.into(),
            to_area: to.into(),
            level: level.map(Into::into),
            height: None,
            extra_tags: BTreeMap::new(),
        });
        self.passages.last_mut().unwrap()
    }

    pub fn build(self) -> Result<AreaGraph, ModelError> {
        let local = |id: &i64| -> Result<Point2D, ModelError> {
            let n = &self.nodes[id];
            to_local(&self.root, n.lat, n.lon)
        };
        let mut areas = self.areas.clone();
        for a in areas.iter_mut() {
            let n = a.nodes.len().saturating_sub(1);
            a.polygon = Polygon::new(a.nodes[..n].iter().map(local).collect::<Result<_, _>>()?);
        }
        let mut passages = self.passages.clone();
        for p in passages.iter_mut() {
            p.geometry = p.nodes.iter().map(local).collect::<Result<_, _>>()?;
        }
        AreaGraph::from_parts(self.nodes, self.root, areas, passages)
    }
}

fn round7(v: f64) -> f64 {
    (v * COORD_SCALE).round() / COORD_SCALE
}
