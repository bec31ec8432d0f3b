//! Tile geometry and georeferencing.
//!
//! Dataset tiles are zoom-20 squares of 400 x 400 pixels whose ground side
//! length shrinks with latitude as `49.84 * cos(lat)` meters. Inside a tile we
//! use a local equirectangular approximation centred on the tile, which is
//! accurate to well under a centimetre at the < 50 m tile scale.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Result};

/// Ground side length of a zoom-20 tile at the equator, meters.
pub const EQUATOR_TILE_SIDE_M: f64 = 49.84;
/// Pixels per tile side for dataset tiles.
pub const TILE_SIDE_PX: u32 = 400;
/// Zoom level of every dataset tile.
pub const DATASET_ZOOM: u8 = 20;
/// Equatorial circumference used for meters <-> degrees conversion.
pub const EARTH_CIRCUMFERENCE_M: f64 = 40_075_017.0;
/// Mean Earth radius used by [`haversine`].
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Meters spanned by one degree of latitude.
pub const METERS_PER_DEGREE_LAT: f64 = EARTH_CIRCUMFERENCE_M / 360.0;

/// A WGS84 coordinate in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(invalid(alloc::format!("latitude {lat} out of range")));
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(invalid(alloc::format!("longitude {lon} out of range")));
        }
        Ok(Self { lat, lon })
    }
}

/// Great-circle distance in meters.
pub fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = lat2 - lat1;
    let dlon = (b.lon - a.lon).to_radians();
    let s_lat = libm::sin(dlat / 2.0);
    let s_lon = libm::sin(dlon / 2.0);
    let h = s_lat * s_lat + libm::cos(lat1) * libm::cos(lat2) * s_lon * s_lon;
    2.0 * EARTH_RADIUS_M * libm::asin(libm::sqrt(h.min(1.0)))
}

/// Ground length of one zoom-20 tile side at `lat`, meters.
///
/// Per-pixel resolution is this value divided by [`TILE_SIDE_PX`].
pub fn resolution_at(lat: f64) -> Result<f64> {
    if !lat.is_finite() || lat <= -90.0 || lat >= 90.0 {
        return Err(invalid(alloc::format!(
            "latitude {lat} outside the open interval (-90, 90)"
        )));
    }
    Ok(EQUATOR_TILE_SIDE_M * libm::cos(lat.to_radians()))
}

/// Axis-aligned geographic box. `min` is the south-west corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: GeoPoint,
    pub max: GeoPoint,
}

impl BBox {
    pub fn new(min: GeoPoint, max: GeoPoint) -> Result<Self> {
        if min.lat > max.lat || min.lon > max.lon {
            return Err(invalid("bounding box min exceeds max"));
        }
        Ok(Self { min, max })
    }

    /// Smallest box containing both points.
    pub fn around(a: GeoPoint, b: GeoPoint) -> Self {
        Self {
            min: GeoPoint {
                lat: a.lat.min(b.lat),
                lon: a.lon.min(b.lon),
            },
            max: GeoPoint {
                lat: a.lat.max(b.lat),
                lon: a.lon.max(b.lon),
            },
        }
    }

    /// Whether this box meets a tile extent. Tile extents are treated as
    /// half-open so that a box equal to one tile does not pick up neighbours
    /// that merely share a border; degenerate boxes (points, axis-aligned
    /// segments) still hit the tile containing them.
    pub fn intersects_tile(&self, tile: &BBox) -> bool {
        axis_overlaps(self.min.lat, self.max.lat, tile.min.lat, tile.max.lat)
            && axis_overlaps(self.min.lon, self.max.lon, tile.min.lon, tile.max.lon)
    }
}

fn axis_overlaps(lo: f64, hi: f64, tile_lo: f64, tile_hi: f64) -> bool {
    if lo == hi {
        tile_lo <= lo && lo < tile_hi
    } else {
        lo < tile_hi && tile_lo < hi
    }
}

/// A georeferenced square tile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileRef {
    pub center: GeoPoint,
    pub zoom: u8,
    pub side_px: u32,
    pub side_m: f64,
}

impl TileRef {
    /// A dataset tile (zoom 20, 400 px) centred on `center`.
    pub fn new(center: GeoPoint) -> Result<Self> {
        Self::with_zoom(center, DATASET_ZOOM)
    }

    pub fn with_zoom(center: GeoPoint, zoom: u8) -> Result<Self> {
        if zoom != DATASET_ZOOM {
            return Err(invalid(alloc::format!(
                "unsupported zoom {zoom}; only zoom {DATASET_ZOOM} tiles are modelled"
            )));
        }
        Ok(Self {
            center,
            zoom,
            side_px: TILE_SIDE_PX,
            side_m: resolution_at(center.lat)?,
        })
    }

    /// Ground meters covered by one pixel.
    pub fn pixel_m(&self) -> f64 {
        self.side_m / f64::from(self.side_px)
    }

    fn meters_per_degree_lon(&self) -> f64 {
        METERS_PER_DEGREE_LAT * libm::cos(self.center.lat.to_radians())
    }

    /// Geographic extent of the tile.
    pub fn extent(&self) -> BBox {
        let half_lat = self.side_m / METERS_PER_DEGREE_LAT / 2.0;
        let half_lon = self.side_m / self.meters_per_degree_lon() / 2.0;
        BBox {
            min: GeoPoint {
                lat: self.center.lat - half_lat,
                lon: self.center.lon - half_lon,
            },
            max: GeoPoint {
                lat: self.center.lat + half_lat,
                lon: self.center.lon + half_lon,
            },
        }
    }

    /// Continuous pixel-space position of `g`: `x` grows east along columns,
    /// `y` grows south along rows, and pixel `(row, col)` covers
    /// `[col, col + 1) x [row, row + 1)`.
    pub fn to_pixel_space(&self, g: GeoPoint) -> (f64, f64) {
        let half = f64::from(self.side_px) / 2.0;
        let px = self.pixel_m();
        let x = (g.lon - self.center.lon) * self.meters_per_degree_lon() / px + half;
        let y = (self.center.lat - g.lat) * METERS_PER_DEGREE_LAT / px + half;
        (x, y)
    }

    /// Geographic position of the pixel-space point `(x, y)`.
    pub fn from_pixel_space(&self, x: f64, y: f64) -> GeoPoint {
        let half = f64::from(self.side_px) / 2.0;
        let px = self.pixel_m();
        GeoPoint {
            lat: self.center.lat - (y - half) * px / METERS_PER_DEGREE_LAT,
            lon: self.center.lon + (x - half) * px / self.meters_per_degree_lon(),
        }
    }

    fn order_key(&self) -> (f64, f64, u8) {
        (self.center.lat, self.center.lon, self.zoom)
    }

    /// Total order over tiles by (center lat, center lon, zoom).
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        let (a_lat, a_lon, a_z) = self.order_key();
        let (b_lat, b_lon, b_z) = other.order_key();
        a_lat
            .total_cmp(&b_lat)
            .then(a_lon.total_cmp(&b_lon))
            .then(a_z.cmp(&b_z))
    }
}

/// Pixel address within a tile; addresses the pixel's centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PixelCoord {
    pub row: u32,
    pub col: u32,
}

impl PixelCoord {
    pub fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }
}

/// Geographic coordinate of the centre of pixel `p`.
pub fn pixel_to_geo(tile: &TileRef, p: PixelCoord) -> Result<GeoPoint> {
    if p.row >= tile.side_px || p.col >= tile.side_px {
        return Err(invalid(alloc::format!(
            "pixel ({}, {}) outside {}x{} tile",
            p.row,
            p.col,
            tile.side_px,
            tile.side_px
        )));
    }
    Ok(tile.from_pixel_space(f64::from(p.col) + 0.5, f64::from(p.row) + 0.5))
}

/// Pixel containing `g`, or `None` when `g` lies outside the tile.
pub fn geo_to_pixel(tile: &TileRef, g: GeoPoint) -> Option<PixelCoord> {
    let (x, y) = tile.to_pixel_space(g);
    let side = f64::from(tile.side_px);
    if !(0.0..side).contains(&x) || !(0.0..side).contains(&y) {
        return None;
    }
    Some(PixelCoord {
        row: libm::floor(y) as u32,
        col: libm::floor(x) as u32,
    })
}

/// All tiles of `tiles` whose extent intersects `bbox`, in input order.
pub fn tiles_covering(bbox: &BBox, tiles: &[TileRef]) -> Result<Vec<TileRef>> {
    if bbox.min.lat > bbox.max.lat || bbox.min.lon > bbox.max.lon {
        return Err(invalid("bounding box min exceeds max"));
    }
    Ok(tiles
        .iter()
        .filter(|t| bbox.intersects_tile(&t.extent()))
        .copied()
        .collect())
}

/// Uniform-grid bucket index over tile extents.
///
/// Returns the same answer as [`tiles_covering`] but only inspects tiles in
/// grid cells touched by the query box.
#[derive(Debug, Clone)]
pub struct TileIndex {
    tiles: Vec<TileRef>,
    extents: Vec<BBox>,
    cell_lat: f64,
    cell_lon: f64,
    cells: BTreeMap<(i64, i64), Vec<usize>>,
}

impl TileIndex {
    pub fn new(tiles: Vec<TileRef>) -> Self {
        let extents: Vec<BBox> = tiles.iter().map(TileRef::extent).collect();
        let cell_lat = extents
            .iter()
            .map(|e| e.max.lat - e.min.lat)
            .fold(0.0_f64, f64::max);
        let cell_lon = extents
            .iter()
            .map(|e| e.max.lon - e.min.lon)
            .fold(0.0_f64, f64::max);
        let mut index = Self {
            tiles,
            extents,
            cell_lat: if cell_lat > 0.0 { cell_lat } else { 1.0 },
            cell_lon: if cell_lon > 0.0 { cell_lon } else { 1.0 },
            cells: BTreeMap::new(),
        };
        for (i, e) in index.extents.iter().enumerate() {
            let (r0, r1, c0, c1) = index.cell_range(e);
            for r in r0..=r1 {
                for c in c0..=c1 {
                    index.cells.entry((r, c)).or_default().push(i);
                }
            }
        }
        index
    }

    pub fn tiles(&self) -> &[TileRef] {
        &self.tiles
    }

    fn cell_range(&self, b: &BBox) -> (i64, i64, i64, i64) {
        let r = |lat: f64| libm::floor(lat / self.cell_lat) as i64;
        let c = |lon: f64| libm::floor(lon / self.cell_lon) as i64;
        (r(b.min.lat), r(b.max.lat), c(b.min.lon), c(b.max.lon))
    }

    /// Indices (into [`TileIndex::tiles`]) of tiles meeting `bbox`, ascending.
    pub fn covering(&self, bbox: &BBox) -> Vec<usize> {
        let (r0, r1, c0, c1) = self.cell_range(bbox);
        let cell_count = (r1 - r0 + 1).saturating_mul(c1 - c0 + 1);
        let mut hits: Vec<usize> = if cell_count as usize > self.tiles.len() {
            (0..self.tiles.len()).collect()
        } else {
            let mut v = Vec::new();
            for r in r0..=r1 {
                for c in c0..=c1 {
                    if let Some(ids) = self.cells.get(&(r, c)) {
                        v.extend_from_slice(ids);
                    }
                }
            }
            v.sort_unstable();
            v.dedup();
            v
        };
        hits.retain(|&i| bbox.intersects_tile(&self.extents[i]));
        hits
    }
}
