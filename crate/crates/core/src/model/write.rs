//! Canonical OSM-XML writer. Output is deterministic: nodes by id, then areas
//! and passages in map order, canonical tags first and extras sorted by key.

use super::parse::{
    KEY_AREA_TYPE, KEY_FROM, KEY_HEIGHT, KEY_LEVEL, KEY_NAME, KEY_PARENT, KEY_TO, KEY_TYPE,
};
use super::AreaGraph;
use quick_xml::escape::escape;
use std::collections::BTreeMap;
use std::fmt::Write;

pub fn write_osmag(graph: &AreaGraph) -> String {
    let mut out = String::with_capacity(256 + graph.nodes.len() * 96);
    out.push_str("<?xml version='1.0' encoding='UTF-8'?>\n");
    out.push_str("<osm version='0.6' generator='osmag-nav'>\n");

    for n in graph.nodes.values() {
        let _ = write!(
            out,
            "  <node id='{}' lat='{:.7}' lon='{:.7}'",
            n.id, n.lat, n.lon
        );
        if n.tags.is_empty() {
            out.push_str(" />\n");
        } else {
            out.push_str(">\n");
            for (k, v) in &n.tags {
                push_tag(&mut out, k, v);
            }
            out.push_str("  </node>\n");
        }
    }

    for a in &graph.areas {
        let _ = writeln!(out, "  <way id='{}'>", a.way_id);
        push_refs(&mut out, &a.nodes);
        push_tag(&mut out, KEY_NAME, &a.name);
        push_tag(&mut out, KEY_TYPE, "area");
        push_tag(&mut out, KEY_AREA_TYPE, a.area_type.as_str());
        if let Some(p) = &a.parent {
            push_tag(&mut out, KEY_PARENT, p);
        }
        push_common(&mut out, &a.level, a.height, &a.extra_tags);
        out.push_str("  </way>\n");
    }

    for p in &graph.passages {
        let _ = writeln!(out, "  <way id='{}'>", p.way_id);
        push_refs(&mut out, &p.nodes);
        push_tag(&mut out, KEY_NAME, &p.name);
        push_tag(&mut out, KEY_TYPE, "passage");
        push_tag(&mut out, KEY_FROM, &p.from_area);
        push_tag(&mut out, KEY_TO, &p.to_area);
        push_common(&mut out, &p.level, p.height, &p.extra_tags);
        out.push_str("  </way>\n");
    }

    out.push_str("</osm>\n");
    out
}

fn push_refs(out: &mut String, refs: &[i64]) {
    for r in refs {
        let _ = writeln!(out, "    <nd ref='{r}' />");
    }
}

fn push_common(
    out: &mut String,
    level: &Option<String>,
    height: Option<f64>,
    extra: &BTreeMap<String, String>,
) {
    if let Some(l) = level {
        push_tag(out, KEY_LEVEL, l);
    }
    if let Some(h) = height {
        push_tag(out, KEY_HEIGHT, &h.to_string());
    }
    for (k, v) in extra {
        push_tag(out, k, v);
    }
}

fn push_tag(out: &mut String, k: &str, v: &str) {
    let _ = writeln!(out, "    <tag k='{}' v='{}' />", escape(k), escape(v));
}
