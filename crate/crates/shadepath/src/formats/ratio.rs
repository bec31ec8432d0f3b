//! Ratio table file: `way_id,segment_index,u,v,l_shaded_m,l_acc_m,r` per edge.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use shadepath_core::{EdgeAccumulator, EdgeId, ShadeRatioTable};

use super::{field, format_err};
use crate::error::{IoContext, Result};

pub const HEADER: &str = "way_id,segment_index,u,v,l_shaded_m,l_acc_m,r";

pub fn render(table: &ShadeRatioTable) -> String {
    let mut s = String::with_capacity(64 * (table.len() + 1));
    s.push_str(HEADER);
    s.push('\n');
    for a in table.accumulators() {
        let r = a.ratio().unwrap_or(table.default_ratio());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            a.edge_id.way_id, a.edge_id.segment_index, a.u, a.v, a.shaded_m, a.acc_m, r
        );
    }
    s
}

/// Parses a ratio file. `r` is recomputed from the accumulators, with
/// `default_ratio` for rows whose accumulated length is zero.
pub fn parse(text: &str, default_ratio: f64, path: &Path) -> Result<ShadeRatioTable> {
    let mut table = ShadeRatioTable::new(default_ratio)?;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let rec = raw.trim();
        if rec.is_empty() || rec.starts_with('#') || (line == 1 && rec == HEADER) {
            continue;
        }
        let f: Vec<&str> = rec.split(',').collect();
        if f.len() != 7 {
            return Err(format_err(
                path,
                line,
                format!("expected 7 fields, found {}", f.len()),
            ));
        }
        let acc = EdgeAccumulator {
            edge_id: EdgeId {
                way_id: field(&f, 0, "way_id", path, line)?,
                segment_index: field(&f, 1, "segment_index", path, line)?,
            },
            u: field(&f, 2, "u", path, line)?,
            v: field(&f, 3, "v", path, line)?,
            shaded_m: field(&f, 4, "l_shaded_m", path, line)?,
            acc_m: field(&f, 5, "l_acc_m", path, line)?,
        };
        let _: f64 = field(&f, 6, "r", path, line)?;
        table
            .insert(acc)
            .map_err(|e| format_err(path, line, e.to_string()))?;
    }
    Ok(table)
}

pub fn write(path: &Path, table: &ShadeRatioTable) -> Result<()> {
    fs::write(path, render(table)).at(path)
}

pub fn read(path: &Path, default_ratio: f64) -> Result<ShadeRatioTable> {
    parse(&fs::read_to_string(path).at(path)?, default_ratio, path)
}
