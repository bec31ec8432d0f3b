//! OSM XML ingestion.

use std::collections::BTreeMap;
use std::str::FromStr;

use shadepath_core::{GeoPoint, NodeId, RoadNetwork, Way};

use crate::error::{Error, Result};

/// Parses an OSM XML document, keeping every node and every way that carries
/// a `highway` tag.
pub fn parse_osm(document: &[u8]) -> Result<RoadNetwork> {
    let text = std::str::from_utf8(document).map_err(|e| Error::Osm {
        line: line_of_byte(document, e.valid_up_to()),
        message: format!("invalid UTF-8: {e}"),
    })?;
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Osm {
        line: e.pos().row,
        message: e.to_string(),
    })?;

    let err_at = |node: roxmltree::Node, message: String| Error::Osm {
        line: doc.text_pos_at(node.range().start).row,
        message,
    };
    fn attr<T: FromStr>(
        node: roxmltree::Node,
        name: &str,
        err_at: &impl Fn(roxmltree::Node, String) -> Error,
    ) -> Result<T> {
        let raw = node.attribute(name).ok_or_else(|| {
            err_at(
                node,
                format!("<{}> missing attribute {name}", node.tag_name().name()),
            )
        })?;
        raw.parse().map_err(|_| {
            err_at(
                node,
                format!(
                    "<{}> attribute {name}={raw:?} is invalid",
                    node.tag_name().name()
                ),
            )
        })
    }

    let mut nodes = BTreeMap::new();
    let mut ways = Vec::new();
    for el in doc.root_element().children().filter(|n| n.is_element()) {
        match el.tag_name().name() {
            "node" => {
                let id: NodeId = attr(el, "id", &err_at)?;
                let lat: f64 = attr(el, "lat", &err_at)?;
                let lon: f64 = attr(el, "lon", &err_at)?;
                let p = GeoPoint::new(lat, lon).map_err(|e| err_at(el, e.to_string()))?;
                nodes.insert(id, p);
            }
            "way" => {
                let id: i64 = attr(el, "id", &err_at)?;
                let mut refs = Vec::new();
                let mut tags = BTreeMap::new();
                for child in el.children().filter(|n| n.is_element()) {
                    match child.tag_name().name() {
                        "nd" => refs.push(attr::<NodeId>(child, "ref", &err_at)?),
                        "tag" => {
                            let k: String = attr(child, "k", &err_at)?;
                            let v: String = attr(child, "v", &err_at)?;
                            tags.insert(k, v);
                        }
                        _ => {}
                    }
                }
                if !tags.contains_key("highway") {
                    continue;
                }
                let way = Way::new(id, refs, tags).map_err(|e| err_at(el, e.to_string()))?;
                ways.push(way);
            }
            _ => {}
        }
    }
    Ok(RoadNetwork::new(nodes, ways)?)
}

fn line_of_byte(bytes: &[u8], offset: usize) -> u32 {
    1 + bytes[..offset].iter().filter(|&&b| b == b'\n').count() as u32
}
