//! Debug dump of mode-graph edges.

use std::fs::File;
use std::path::Path;

use shadepath_core::Edge;

use crate::error::{IoContext, Result};

/// Writes `edge_id,u,v,length_m,way_name` rows; `edge_id` is `way_id:segment_index`.
pub fn write(path: &Path, edges: &[Edge]) -> Result<()> {
    let file = File::create(path).at(path)?;
    let mut w = csv::Writer::from_writer(file);
    let io = |e: csv::Error| std::io::Error::other(e);
    w.write_record(["edge_id", "u", "v", "length_m", "way_name"])
        .map_err(io)
        .at(path)?;
    for e in edges {
        w.write_record([
            format!("{}:{}", e.edge_id.way_id, e.edge_id.segment_index),
            e.u.to_string(),
            e.v.to_string(),
            e.length_m.to_string(),
            e.way_name.clone().unwrap_or_default(),
        ])
        .map_err(io)
        .at(path)?;
    }
    w.flush().at(path)
}
