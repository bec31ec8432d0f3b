//! On-disk formats exchanged between pipeline stages.

pub mod edges;
pub mod graph;
pub mod mask;
pub mod ratio;
pub mod tile_image;
pub mod tile_index;

use std::path::Path;

use crate::error::Error;

pub(crate) fn format_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses field `i` of a comma-separated record.
pub(crate) fn field<T: std::str::FromStr>(
    fields: &[&str],
    i: usize,
    name: &str,
    path: &Path,
    line: usize,
) -> Result<T, Error> {
    let raw = fields
        .get(i)
        .ok_or_else(|| format_err(path, line, format!("missing field {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| format_err(path, line, format!("invalid {name}: {raw:?}")))
}
