//! OSM-XML reader for the osmAG node/way/tag schema.

use super::{to_local, Area, AreaGraph, AreaType, GeoNode, ModelError, Passage, RootAnchor};
use crate::geometry::Polygon;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use std::collections::BTreeMap;

pub(crate) const KEY_NAME: &str = "name";
pub(crate) const KEY_TYPE: &str = "osmAG:type";
pub(crate) const KEY_AREA_TYPE: &str = "osmAG:areaType";
pub(crate) const KEY_PARENT: &str = "osmAG:parent";
pub(crate) const KEY_FROM: &str = "osmAG:from";
pub(crate) const KEY_TO: &str = "osmAG:to";
pub(crate) const KEY_LEVEL: &str = "level";
pub(crate) const KEY_HEIGHT: &str = "height";

const CANONICAL_KEYS: [&str; 6] = [
    KEY_TYPE,
    KEY_AREA_TYPE,
    KEY_PARENT,
    KEY_FROM,
    KEY_TO,
    "osmAG:area_usage",
];

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Map legacy key spellings (e.g. `osmAG:areatype`) to canonical keys
    /// instead of rejecting them.
    pub lenient: bool,
}

struct RawWay {
    id: i64,
    refs: Vec<i64>,
    tags: Vec<(String, String)>,
}

/// Parses canonical osmAG XML. Legacy tag spellings are rejected.
pub fn parse_osmag(xml: &str) -> Result<AreaGraph, ModelError> {
    parse_osmag_with(xml, ParseOptions::default())
}

pub fn parse_osmag_with(xml: &str, opts: ParseOptions) -> Result<AreaGraph, ModelError> {
    let (nodes, ways) = read_elements(xml)?;

    let mut root: Option<RootAnchor> = None;
    for n in nodes.values() {
        if n.tags.get(KEY_NAME).map(String::as_str) == Some("root") {
            if let Some(r) = &root {
                return Err(ModelError::MultipleRoots(r.node_id, n.id));
            }
            root = Some(RootAnchor {
                node_id: n.id,
                lat: n.lat,
                lon: n.lon,
            });
        }
    }
    let root = root.ok_or(ModelError::MissingRoot)?;

    let mut areas = Vec::new();
    let mut passages = Vec::new();
    for way in ways {
        let element = format!("way {}", way.id);
        let tags = canonicalize_tags(&element, way.tags, opts)?;
        let Some(kind) = tags.get(KEY_TYPE).cloned() else {
            continue;
        };
        let name = tags
            .get(KEY_NAME)
            .cloned()
            .ok_or_else(|| missing(&element, KEY_NAME))?;
        let element = format!("way {} ({name})", way.id);
        let mut points = Vec::with_capacity(way.refs.len());
        for r in &way.refs {
            let n = nodes.get(r).ok_or_else(|| ModelError::DanglingNodeRef {
                way: name.clone(),
                node: *r,
            })?;
            points.push(to_local(&root, n.lat, n.lon)?);
        }
        let level = tags.get(KEY_LEVEL).cloned();
        let height = match tags.get(KEY_HEIGHT) {
            Some(h) => Some(
                h.trim()
                    .parse::<f64>()
                    .map_err(|_| ModelError::InvalidTagValue {
                        element: element.clone(),
                        key: KEY_HEIGHT.into(),
                        value: h.clone(),
                    })?,
            ),
            None => None,
        };
        match kind.as_str() {
            "area" => {
                let raw_type = tags
                    .get(KEY_AREA_TYPE)
                    .ok_or_else(|| missing(&element, KEY_AREA_TYPE))?;
                let area_type =
                    AreaType::parse(raw_type).ok_or_else(|| ModelError::InvalidTagValue {
                        element: element.clone(),
                        key: KEY_AREA_TYPE.into(),
                        value: raw_type.clone(),
                    })?;
                let parent = tags.get(KEY_PARENT).cloned();
                let extra_tags = extra(
                    &tags,
                    &[
                        KEY_NAME,
                        KEY_TYPE,
                        KEY_AREA_TYPE,
                        KEY_PARENT,
                        KEY_LEVEL,
                        KEY_HEIGHT,
                    ],
                );
                if way.refs.len() < 2 || way.refs.first() != way.refs.last() {
                    return Err(ModelError::UnclosedPolygon(name));
                }
                points.pop();
                areas.push(Area {
                    way_id: way.id,
                    name,
                    area_type,
                    nodes: way.refs,
                    polygon: Polygon::new(points),
                    parent,
                    level,
                    height,
                    extra_tags,
                });
            }
            "passage" => {
                let from_area = tags
                    .get(KEY_FROM)
                    .cloned()
                    .ok_or_else(|| missing(&element, KEY_FROM))?;
                let to_area = tags
                    .get(KEY_TO)
                    .cloned()
                    .ok_or_else(|| missing(&element, KEY_TO))?;
                let extra_tags = extra(
                    &tags,
                    &[KEY_NAME, KEY_TYPE, KEY_FROM, KEY_TO, KEY_LEVEL, KEY_HEIGHT],
                );
                passages.push(Passage {
                    way_id: way.id,
                    name,
                    nodes: way.refs,
                    geometry: points,
                    from_area,
                    to_area,
                    level,
                    height,
                    extra_tags,
                });
            }
            other => {
                return Err(ModelError::InvalidTagValue {
                    element,
                    key: KEY_TYPE.into(),
                    value: other.into(),
                })
            }
        }
    }

    AreaGraph::from_parts(nodes, root, areas, passages)
}

fn missing(element: &str, key: &str) -> ModelError {
    ModelError::MissingRequiredTag {
        element: element.into(),
        key: key.into(),
    }
}

fn extra(tags: &BTreeMap<String, String>, consumed: &[&str]) -> BTreeMap<String, String> {
    tags.iter()
        .filter(|(k, _)| !consumed.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Rejects (or, when lenient, rewrites) keys that differ from a canonical
/// `osmAG:*` key only by spelling.
fn canonicalize_tags(
    element: &str,
    tags: Vec<(String, String)>,
    opts: ParseOptions,
) -> Result<BTreeMap<String, String>, ModelError> {
    let mut out = BTreeMap::new();
    for (k, v) in tags {
        let key = match legacy_canonical(&k) {
            Some(canonical) if opts.lenient => canonical.to_string(),
            Some(canonical) => {
                return Err(ModelError::LegacyTag {
                    element: element.into(),
                    key: k,
                    canonical: canonical.into(),
                })
            }
            None => k,
        };
        out.insert(key, v);
    }
    Ok(out)
}

fn legacy_canonical(key: &str) -> Option<&'static str> {
    let folded: String = key.to_ascii_lowercase().replace('_', "");
    CANONICAL_KEYS
        .iter()
        .find(|c| **c != key && c.to_ascii_lowercase().replace('_', "") == folded)
        .copied()
}

type Elements = (BTreeMap<i64, GeoNode>, Vec<RawWay>);

fn read_elements(xml: &str) -> Result<Elements, ModelError> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);

    let mut nodes: BTreeMap<i64, GeoNode> = BTreeMap::new();
    let mut ways = Vec::new();
    let mut cur_node: Option<GeoNode> = None;
    let mut cur_way: Option<RawWay> = None;
    let mut saw_osm = false;

    loop {
        let ev = reader.read_event().map_err(|e| {
            ModelError::MalformedXml(format!("at byte {}: {e}", reader.buffer_position()))
        })?;
        match ev {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"osm" => {
                saw_osm = true;
                let _ = e;
            }
            Event::Start(e) => match e.name().as_ref() {
                b"node" => cur_node = Some(read_node(&e)?),
                b"way" => {
                    cur_way = Some(RawWay {
                        id: attr_i64(&e, "id")?,
                        refs: Vec::new(),
                        tags: Vec::new(),
                    })
                }
                b"tag" | b"nd" => handle_child(&e, &mut cur_node, &mut cur_way)?,
                _ => {}
            },
            Event::Empty(e) => match e.name().as_ref() {
                b"node" => insert_node(&mut nodes, read_node(&e)?)?,
                b"way" => ways.push(RawWay {
                    id: attr_i64(&e, "id")?,
                    refs: Vec::new(),
                    tags: Vec::new(),
                }),
                b"tag" | b"nd" => handle_child(&e, &mut cur_node, &mut cur_way)?,
                _ => {}
            },
            Event::End(e) => match e.name().as_ref() {
                b"node" => {
                    if let Some(n) = cur_node.take() {
                        insert_node(&mut nodes, n)?;
                    }
                }
                b"way" => {
                    if let Some(w) = cur_way.take() {
                        ways.push(w);
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_osm {
        return Err(ModelError::MalformedXml(
            "missing <osm> root element".into(),
        ));
    }
    Ok((nodes, ways))
}

fn insert_node(nodes: &mut BTreeMap<i64, GeoNode>, n: GeoNode) -> Result<(), ModelError> {
    if nodes.contains_key(&n.id) {
        return Err(ModelError::DuplicateNodeId(n.id));
    }
    nodes.insert(n.id, n);
    Ok(())
}

fn handle_child(
    e: &BytesStart,
    node: &mut Option<GeoNode>,
    way: &mut Option<RawWay>,
) -> Result<(), ModelError> {
    match e.name().as_ref() {
        b"tag" => {
            let k = attr_str(e, "k")?;
            let v = attr_str(e, "v")?;
            if let Some(w) = way.as_mut() {
                w.tags.push((k, v));
            } else if let Some(n) = node.as_mut() {
                n.tags.insert(k, v);
            }
        }
        b"nd" => {
            if let Some(w) = way.as_mut() {
                w.refs.push(attr_i64(e, "ref")?);
            }
        }
        _ => {}
    }
    Ok(())
}

fn read_node(e: &BytesStart) -> Result<GeoNode, ModelError> {
    let id = attr_i64(e, "id")?;
    let lat = attr_str(e, "lat")?
        .parse::<f64>()
        .map_err(|_| ModelError::InvalidCoordinate(id))?;
    let lon = attr_str(e, "lon")?
        .parse::<f64>()
        .map_err(|_| ModelError::InvalidCoordinate(id))?;
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(ModelError::InvalidCoordinate(id));
    }
    Ok(GeoNode {
        id,
        lat,
        lon,
        tags: BTreeMap::new(),
    })
}

fn attr_str(e: &BytesStart, key: &str) -> Result<String, ModelError> {
    for a in e.attributes() {
        let a = a.map_err(|err| ModelError::MalformedXml(err.to_string()))?;
        if a.key.as_ref() == key.as_bytes() {
            return a
                .unescape_value()
                .map(|v| v.into_owned())
                .map_err(|err| ModelError::MalformedXml(err.to_string()));
        }
    }
    Err(ModelError::MalformedXml(format!(
        "<{}> missing attribute `{key}`",
        String::from_utf8_lossy(e.name().as_ref())
    )))
}

fn attr_i64(e: &BytesStart, key: &str) -> Result<i64, ModelError> {
    let s = attr_str(e, key)?;
    s.trim()
        .parse()
        .map_err(|_| ModelError::MalformedXml(format!("attribute `{key}`=`{s}` is not an integer")))
}
