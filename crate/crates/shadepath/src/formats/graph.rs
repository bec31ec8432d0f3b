//! Serialized layered graph.
//!
//! ```text
//! SHADEGRAPH 1
//! mode,<walk|bike>
//! counts,<vertices>,<edges>
//! v,<node_id>,<lat>,<lon>            (one per vertex)
//! e,<u>,<v>,<length_m>,<ratio>[,<way_id>,<segment_index>]   (one per edge)
//! ```
//!
//! Floats are written in shortest round-trip form, so a load reproduces the
//! in-memory graph exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use shadepath_core::{EdgeId, EdgeWeights, GeoPoint, LayeredGraph, Mode};

use super::{field, format_err};
use crate::error::{IoContext, Result};

pub const FORMAT_TAG: &str = "SHADEGRAPH 1";

pub fn render(g: &LayeredGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{FORMAT_TAG}");
    let _ = writeln!(s, "mode,{}", g.mode());
    let _ = writeln!(s, "counts,{},{}", g.vertex_count(), g.edge_count());
    for (id, p) in g.vertices() {
        let _ = writeln!(s, "v,{id},{},{}", p.lat, p.lon);
    }
    for e in g.edges() {
        let _ = write!(
            s,
            "e,{},{},{},{}",
            g.node_id(e.u),
            g.node_id(e.v),
            e.weights.length_m,
            e.weights.ratio
        );
        if let Some(id) = e.edge_id {
            let _ = write!(s, ",{},{}", id.way_id, id.segment_index);
        }
        s.push('\n');
    }
    s
}

pub fn parse(text: &str, path: &Path) -> Result<LayeredGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| format_err(path, 0, format!("missing {what}")))
    };
    let (_, tag) = next("format tag")?;
    if tag != FORMAT_TAG {
        return Err(format_err(
            path,
            1,
            format!("expected {FORMAT_TAG:?}, found {tag:?}"),
        ));
    }
    let (ln, mode_line) = next("mode")?;
    let mode: Mode = mode_line
        .strip_prefix("mode,")
        .ok_or_else(|| format_err(path, ln, "expected mode record"))?
        .parse()
        .map_err(|e: shadepath_core::Error| format_err(path, ln, e.to_string()))?;
    let (ln, counts) = next("counts")?;
    let c: Vec<&str> = counts.split(',').collect();
    if c.first() != Some(&"counts") {
        return Err(format_err(path, ln, "expected counts record"));
    }
    let nv: usize = field(&c, 1, "vertex count", path, ln)?;
    let ne: usize = field(&c, 2, "edge count", path, ln)?;

    let mut vertices = Vec::with_capacity(nv);
    let mut edges = Vec::with_capacity(ne);
    for (ln, rec) in lines {
        if rec.is_empty() {
            continue;
        }
        let f: Vec<&str> = rec.split(',').collect();
        match f[0] {
            "v" => {
                let id = field(&f, 1, "node_id", path, ln)?;
                let p = GeoPoint::new(
                    field(&f, 2, "lat", path, ln)?,
                    field(&f, 3, "lon", path, ln)?,
                )
                .map_err(|e| format_err(path, ln, e.to_string()))?;
                vertices.push((id, p));
            }
            "e" => {
                let w = EdgeWeights::new(
                    field(&f, 3, "length_m", path, ln)?,
                    field(&f, 4, "ratio", path, ln)?,
                )
                .map_err(|e| format_err(path, ln, e.to_string()))?;
                let edge_id = if f.len() >= 7 {
                    Some(EdgeId {
                        way_id: field(&f, 5, "way_id", path, ln)?,
                        segment_index: field(&f, 6, "segment_index", path, ln)?,
                    })
                } else {
                    None
                };
                edges.push((
                    edge_id,
                    field(&f, 1, "u", path, ln)?,
                    field(&f, 2, "v", path, ln)?,
                    w,
                ));
            }
            other => return Err(format_err(path, ln, format!("unknown record {other:?}"))),
        }
    }
    if vertices.len() != nv || edges.len() != ne {
        return Err(format_err(
            path,
            3,
            format!(
                "header declares {nv} vertices / {ne} edges, found {} / {}",
                vertices.len(),
                edges.len()
            ),
        ));
    }
    LayeredGraph::from_parts(mode, vertices, edges).map_err(|e| format_err(path, 0, e.to_string()))
}

pub fn write(path: &Path, g: &LayeredGraph) -> Result<()> {
    fs::write(path, render(g)).at(path)
}

pub fn read(path: &Path) -> Result<LayeredGraph> {
    parse(&fs::read_to_string(path).at(path)?, path)
}
