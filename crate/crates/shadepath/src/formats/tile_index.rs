//! Tile index: one `center_lat,center_lon,zoom,filename` record per line.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use shadepath_core::{GeoPoint, TileRef};

use super::{field, format_err};
use crate::error::{IoContext, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TileEntry {
    pub tile: TileRef,
    pub filename: String,
}

/// Parses index text. Blank lines and `#` comments are ignored.
pub fn parse(text: &str, path: &Path) -> Result<Vec<TileEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let rec = raw.trim();
        if rec.is_empty() || rec.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = rec.splitn(4, ',').collect();
        if fields.len() != 4 {
            return Err(format_err(
                path,
                line,
                "expected center_lat,center_lon,zoom,filename",
            ));
        }
        let lat: f64 = field(&fields, 0, "center_lat", path, line)?;
        let lon: f64 = field(&fields, 1, "center_lon", path, line)?;
        let zoom: u8 = field(&fields, 2, "zoom", path, line)?;
        let filename = fields[3].trim().to_string();
        if filename.is_empty() {
            return Err(format_err(path, line, "empty filename"));
        }
        let tile = GeoPoint::new(lat, lon)
            .and_then(|c| TileRef::with_zoom(c, zoom))
            .map_err(|e| format_err(path, line, e.to_string()))?;
        out.push(TileEntry { tile, filename });
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<Vec<TileEntry>> {
    let text = fs::read_to_string(path).at(path)?;
    parse(&text, path)
}

pub fn render(entries: &[TileEntry]) -> String {
    let mut s = String::from("# center_lat,center_lon,zoom,filename\n");
    for e in entries {
        let _ = writeln!(
            s,
            "{:.8},{:.8},{},{}",
            e.tile.center.lat, e.tile.center.lon, e.tile.zoom, e.filename
        );
    }
    s
}

pub fn write(path: &Path, entries: &[TileEntry]) -> Result<()> {
    fs::write(path, render(entries)).at(path)
}
