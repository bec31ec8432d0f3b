//! Compact bitmask files.
//!
//! ```text
//! SHADEMASK 1\n
//! <center_lat> <center_lon> <zoom> <side_px> <threshold>\n
//! <side_px^2 bits, row-major, most significant bit first, zero padded>
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use shadepath_core::{GeoPoint, ShadeMask, TileRef};

use super::format_err;
use crate::error::{IoContext, Result};

const MAGIC: &str = "SHADEMASK 1";

pub fn encode(mask: &ShadeMask) -> Vec<u8> {
    let t = &mask.tile;
    let mut out = format!(
        "{MAGIC}\n{} {} {} {} {}\n",
        t.center.lat, t.center.lon, t.zoom, t.side_px, mask.threshold_used
    )
    .into_bytes();
    let bits = mask.bits();
    let mut packed = vec![0u8; bits.len().div_ceil(8)];
    for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
        packed[i / 8] |= 0x80 >> (i % 8);
    }
    out.extend_from_slice(&packed);
    out
}

/// Header fields: tile and threshold.
fn read_header(r: &mut impl BufRead, path: &Path) -> Result<(TileRef, u8)> {
    let mut magic = String::new();
    r.read_line(&mut magic).at(path)?;
    if magic.trim_end() != MAGIC {
        return Err(format_err(path, 1, "not a shade mask file"));
    }
    let mut header = String::new();
    r.read_line(&mut header).at(path)?;
    let f: Vec<&str> = header.split_whitespace().collect();
    let bad = |what: &str| format_err(path, 2, format!("invalid {what}"));
    let [lat, lon, zoom, side, thr] = f[..] else {
        return Err(bad("header"));
    };
    let lat: f64 = lat.parse().map_err(|_| bad("center_lat"))?;
    let lon: f64 = lon.parse().map_err(|_| bad("center_lon"))?;
    let zoom: u8 = zoom.parse().map_err(|_| bad("zoom"))?;
    let side: u32 = side.parse().map_err(|_| bad("side_px"))?;
    let thr: u8 = thr.parse().map_err(|_| bad("threshold"))?;
    let tile = GeoPoint::new(lat, lon)
        .and_then(|c| TileRef::with_zoom(c, zoom))
        .map_err(|e| format_err(path, 2, e.to_string()))?;
    if tile.side_px != side {
        return Err(bad("side_px"));
    }
    Ok((tile, thr))
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<ShadeMask> {
    let mut r = BufReader::new(bytes);
    let (tile, thr) = read_header(&mut r, path)?;
    let n = (tile.side_px * tile.side_px) as usize;
    let mut packed = Vec::new();
    r.read_to_end(&mut packed).at(path)?;
    if packed.len() != n.div_ceil(8) {
        return Err(format_err(
            path,
            3,
            format!(
                "expected {} payload bytes, found {}",
                n.div_ceil(8),
                packed.len()
            ),
        ));
    }
    let bits = (0..n)
        .map(|i| packed[i / 8] & (0x80 >> (i % 8)) != 0)
        .collect();
    Ok(ShadeMask::from_bits(tile, thr, bits)?)
}

pub fn write(path: &Path, mask: &ShadeMask) -> Result<()> {
    fs::write(path, encode(mask)).at(path)
}

pub fn read(path: &Path) -> Result<ShadeMask> {
    decode(&fs::read(path).at(path)?, path)
}

/// Reads only the tile reference from a mask file.
pub fn read_tile(path: &Path) -> Result<TileRef> {
    let f = fs::File::open(path).at(path)?;
    read_header(&mut BufReader::new(f), path).map(|(t, _)| t)
}
