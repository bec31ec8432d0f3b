//! Per-edge shade ratios accumulated across every tile an edge crosses.
//!
//! For each (edge, tile) pair the edge is rasterized onto the tile and its
//! on-route pixels are counted; shaded and total pixel counts are turned into
//! meters using the tile's per-pixel ground resolution. Contributions from all
//! tiles are summed per edge and the final ratio is `shaded_m / acc_m`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geo::{BBox, GeoPoint, PixelCoord, TileIndex, TileRef};
use crate::mask::ShadeMask;
use crate::network::{Edge, EdgeId, NodeId};
use crate::raster::rasterize_edge;

/// Ratio assigned to edges no tile covers: fully sun-exposed.
pub const DEFAULT_RATIO: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeAccumulator {
    pub edge_id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub shaded_m: f64,
    pub acc_m: f64,
}

impl EdgeAccumulator {
    pub fn ratio(&self) -> Option<f64> {
        (self.acc_m > 0.0).then(|| (self.shaded_m / self.acc_m).clamp(0.0, 1.0))
    }
}

/// Shaded/total length per edge plus the ratio used for uncovered edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadeRatioTable {
    entries: BTreeMap<EdgeId, EdgeAccumulator>,
    default_ratio: f64,
}

impl ShadeRatioTable {
    pub fn new(default_ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&default_ratio) {
            return Err(invalid(alloc::format!(
                "default ratio {default_ratio} outside [0, 1]"
            )));
        }
        Ok(Self {
            entries: BTreeMap::new(),
            default_ratio,
        })
    }

    pub fn default_ratio(&self) -> f64 {
        self.default_ratio
    }

    /// Ensures `edge` has an accumulator, starting at (0, 0).
    pub fn register(&mut self, edge_id: EdgeId, u: NodeId, v: NodeId) {
        self.entries.entry(edge_id).or_insert(EdgeAccumulator {
            edge_id,
            u,
            v,
            shaded_m: 0.0,
            acc_m: 0.0,
        });
    }

    /// Inserts a fully formed accumulator, e.g. one read back from a file.
    pub fn insert(&mut self, acc: EdgeAccumulator) -> Result<()> {
        check_contribution(acc.shaded_m, acc.acc_m)?;
        self.entries.insert(acc.edge_id, acc);
        Ok(())
    }

    /// Adds one tile's contribution to an edge. Each (edge, tile) pair must be
    /// passed exactly once.
    pub fn accumulate(&mut self, edge: &Edge, contribution: (f64, f64)) -> Result<()> {
        let (shaded, total) = contribution;
        check_contribution(shaded, total)?;
        self.register(edge.edge_id, edge.u, edge.v);
        let acc = self
            .entries
            .get_mut(&edge.edge_id)
            .expect("registered above");
        acc.shaded_m += shaded;
        acc.acc_m += total;
        Ok(())
    }

    pub fn get(&self, id: &EdgeId) -> Option<&EdgeAccumulator> {
        self.entries.get(id)
    }

    pub fn accumulators(&self) -> impl Iterator<Item = &EdgeAccumulator> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Ratio for one edge; `None` when the edge was never registered.
    pub fn ratio(&self, id: &EdgeId) -> Option<f64> {
        self.entries
            .get(id)
            .map(|a| a.ratio().unwrap_or(self.default_ratio))
    }

    /// Final ratio per edge; uncovered edges get the default ratio.
    pub fn finalize(&self) -> BTreeMap<EdgeId, f64> {
        self.entries
            .iter()
            .map(|(id, a)| (*id, a.ratio().unwrap_or(self.default_ratio)))
            .collect()
    }

    /// Name-level view: accumulators summed over every edge of each named way.
    pub fn by_name<'a>(
        &self,
        edges: impl IntoIterator<Item = &'a Edge>,
    ) -> BTreeMap<String, (f64, f64)> {
        let mut out: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for e in edges {
            let (Some(name), Some(acc)) = (&e.way_name, self.entries.get(&e.edge_id)) else {
                continue;
            };
            let slot = out.entry(name.clone()).or_default();
            slot.0 += acc.shaded_m;
            slot.1 += acc.acc_m;
        }
        out
    }
}

fn check_contribution(shaded: f64, total: f64) -> Result<()> {
    if !(shaded.is_finite() && total.is_finite()) || shaded < 0.0 || total < 0.0 {
        return Err(invalid(alloc::format!(
            "contribution ({shaded}, {total}) must be finite and non-negative"
        )));
    }
    if shaded > total {
        return Err(invalid(alloc::format!(
            "shaded length {shaded} exceeds total {total}"
        )));
    }
    Ok(())
}

/// Shaded and total on-route meters of `pixels` within one tile.
pub fn edge_tile_contribution(pixels: &[PixelCoord], mask: &ShadeMask) -> Result<(f64, f64)> {
    let mut shaded = 0_usize;
    for &p in pixels {
        match mask.is_shaded(p) {
            Some(true) => shaded += 1,
            Some(false) => {}
            None => {
                return Err(invalid(alloc::format!(
                    "pixel ({}, {}) outside mask",
                    p.row,
                    p.col
                )))
            }
        }
    }
    let px_m = mask.tile.pixel_m();
    Ok((shaded as f64 * px_m, pixels.len() as f64 * px_m))
}

/// Supplies the shade mask of a tile on demand.
pub trait MaskSource {
    type Error;

    fn load(&mut self, tile: &TileRef) -> core::result::Result<ShadeMask, Self::Error>;
}

/// In-memory masks, looked up by tile.
impl MaskSource for [ShadeMask] {
    type Error = Error;

    fn load(&mut self, tile: &TileRef) -> Result<ShadeMask> {
        self.iter()
            .find(|m| m.tile.total_cmp(tile).is_eq())
            .cloned()
            .ok_or_else(|| {
                invalid(alloc::format!(
                    "no mask for tile at ({}, {})",
                    tile.center.lat,
                    tile.center.lon
                ))
            })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DeriveError<E> {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("loading mask for tile at ({}, {}): {source}", tile.center.lat, tile.center.lon)]
    Mask { tile: TileRef, source: E },
}

/// Ratio table for `edges` over every tile in `tiles`.
///
/// Each edge visits exactly the tiles meeting its bounding box. Tiles are
/// processed in a canonical (lat, lon) order, so the result does not depend on
/// the order of `tiles`. Duplicate tiles are rejected.
pub fn derive_all<S: MaskSource + ?Sized>(
    vertices: &BTreeMap<NodeId, GeoPoint>,
    edges: &[Edge],
    tiles: &[TileRef],
    masks: &mut S,
    default_ratio: f64,
) -> core::result::Result<ShadeRatioTable, DeriveError<S::Error>> {
    let mut table = ShadeRatioTable::new(default_ratio)?;

    let mut sorted = tiles.to_vec();
    sorted.sort_by(TileRef::total_cmp);
    if sorted.windows(2).any(|w| w[0].total_cmp(&w[1]).is_eq()) {
        return Err(invalid("duplicate tile in tile set").into());
    }
    let index = TileIndex::new(sorted);

    let endpoints = |e: &Edge| -> Result<(GeoPoint, GeoPoint)> {
        let get = |id| {
            vertices
                .get(&id)
                .copied()
                .ok_or_else(|| invalid(alloc::format!("edge endpoint {id} has no coordinate")))
        };
        Ok((get(e.u)?, get(e.v)?))
    };

    let mut per_tile: Vec<Vec<usize>> = alloc::vec![Vec::new(); index.tiles().len()];
    for (i, e) in edges.iter().enumerate() {
        table.register(e.edge_id, e.u, e.v);
        let (a, b) = endpoints(e)?;
        for t in index.covering(&BBox::around(a, b)) {
            per_tile[t].push(i);
        }
    }

    for (tile, edge_ids) in index.tiles().iter().zip(&per_tile) {
        if edge_ids.is_empty() {
            continue;
        }
        let mask = masks.load(tile).map_err(|source| DeriveError::Mask {
            tile: *tile,
            source,
        })?;
        if mask.side() != tile.side_px {
            return Err(invalid("mask dimensions do not match tile").into());
        }
        for &i in edge_ids {
            let e = &edges[i];
            let (a, b) = endpoints(e)?;
            let pixels = rasterize_edge(a, b, tile);
            let contribution = edge_tile_contribution(&pixels, &mask)?;
            table.accumulate(e, contribution)?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::{extract_mask, TileImage};
    use alloc::vec;

    fn equator_tile() -> TileRef {
        TileRef::new(GeoPoint::new(0.0, 0.0).unwrap()).unwrap()
    }

    fn edge(way: i64, u: NodeId, v: NodeId) -> Edge {
        Edge {
            edge_id: EdgeId {
                way_id: way,
                segment_index: 0,
            },
            u,
            v,
            length_m: 1.0,
            way_name: None,
        }
    }

    #[test]
    fn worked_example_67_percent() {
        let tile = equator_tile();
        let mut bits = vec![false; 400 * 400];
        for c in 0..268 {
            bits[200 * 400 + c] = true;
        }
        let mask = ShadeMask::from_bits(tile, 75, bits).unwrap();
        let pixels: Vec<_> = (0..400).map(|c| PixelCoord::new(200, c)).collect();
        let (s, t) = edge_tile_contribution(&pixels, &mask).unwrap();
        assert!((s - 33.39).abs() <= 0.05, "{s}");
        assert!((t - 49.84).abs() <= 0.05, "{t}");
        assert!((s / t - 0.67).abs() < 1e-12);
    }

    #[test]
    fn empty_and_all_shaded() {
        let tile = equator_tile();
        let mask = ShadeMask::from_bits(tile, 75, vec![true; 160_000]).unwrap();
        assert_eq!(edge_tile_contribution(&[], &mask).unwrap(), (0.0, 0.0));
        let px: Vec<_> = (0..37).map(|c| PixelCoord::new(3, c)).collect();
        let (s, t) = edge_tile_contribution(&px, &mask).unwrap();
        assert_eq!(s, t);
        assert!(edge_tile_contribution(&[PixelCoord::new(400, 0)], &mask).is_err());
    }

    #[test]
    fn accumulate_two_tiles() {
        let mut table = ShadeRatioTable::new(0.0).unwrap();
        let e = edge(1, 1, 2);
        table.accumulate(&e, (10.0, 20.0)).unwrap();
        table.accumulate(&e, (5.0, 20.0)).unwrap();
        let acc = table.get(&e.edge_id).unwrap();
        assert_eq!((acc.shaded_m, acc.acc_m), (15.0, 40.0));
        assert_eq!(table.ratio(&e.edge_id), Some(0.375));
    }

    #[test]
    fn zero_contribution_and_invalid() {
        let mut table = ShadeRatioTable::new(0.25).unwrap();
        let e = edge(1, 1, 2);
        table.accumulate(&e, (0.0, 0.0)).unwrap();
        assert_eq!(table.ratio(&e.edge_id), Some(0.25));
        assert!(table.accumulate(&e, (3.0, 2.0)).is_err());
        assert!(table.accumulate(&e, (-1.0, 2.0)).is_err());
        assert!(table.accumulate(&e, (f64::NAN, 2.0)).is_err());
        assert!(ShadeRatioTable::new(1.5).is_err());
    }

    #[test]
    fn finalize_examples() {
        let mut table = ShadeRatioTable::new(0.0).unwrap();
        let (a, b, c) = (edge(1, 1, 2), edge(2, 2, 3), edge(3, 3, 4));
        table.accumulate(&a, (33.39, 49.84)).unwrap();
        table.accumulate(&b, (0.0, 49.84)).unwrap();
        table.register(c.edge_id, c.u, c.v);
        let r = table.finalize();
        assert!((r[&a.edge_id] - 0.67).abs() < 1e-3);
        assert_eq!(r[&b.edge_id], 0.0);
        assert_eq!(r[&c.edge_id], 0.0);
    }

    #[test]
    fn name_view_sums_segments() {
        let mut table = ShadeRatioTable::new(0.0).unwrap();
        let mut a = edge(1, 1, 2);
        a.way_name = Some("Mill Ave".into());
        let mut b = edge(1, 2, 3);
        b.edge_id.segment_index = 1;
        b.way_name = Some("Mill Ave".into());
        table.accumulate(&a, (10.0, 20.0)).unwrap();
        table.accumulate(&b, (5.0, 20.0)).unwrap();
        assert_eq!(table.by_name([&a, &b])["Mill Ave"], (15.0, 40.0));
    }

    /// Tile immediately east of `t` (same latitude, touching extents).
    fn east_of(t: &TileRef) -> TileRef {
        let e = t.extent();
        TileRef::new(GeoPoint::new(t.center.lat, t.center.lon + (e.max.lon - e.min.lon)).unwrap())
            .unwrap()
    }

    #[test]
    fn edge_fully_inside_shaded_tile() {
        let t = TileRef::new(GeoPoint::new(33.42, -111.94).unwrap()).unwrap();
        let masks = [extract_mask(&TileImage::filled(t, [0, 0, 0]), 75).unwrap()];
        let verts: BTreeMap<_, _> = [
            (1, t.from_pixel_space(50.3, 60.2)),
            (2, t.from_pixel_space(300.7, 210.9)),
        ]
        .into();
        let table =
            derive_all(&verts, &[edge(1, 1, 2)], &[t], &mut masks.clone()[..], 0.0).unwrap();
        assert_eq!(
            table.finalize().values().copied().collect::<Vec<_>>(),
            vec![1.0]
        );
    }

    #[test]
    fn edge_split_across_shaded_and_bright_tiles() {
        let west = TileRef::new(GeoPoint::new(33.42, -111.94).unwrap()).unwrap();
        let east = east_of(&west);
        let mut masks = [
            extract_mask(&TileImage::filled(west, [0, 0, 0]), 75).unwrap(),
            extract_mask(&TileImage::filled(east, [250, 250, 250]), 75).unwrap(),
        ];
        // Horizontal edge from x=100 in the west tile to x=300 in the east one.
        let a = west.from_pixel_space(100.0, 180.5);
        let b = GeoPoint {
            lat: a.lat,
            lon: east.from_pixel_space(300.0, 180.5).lon,
        };
        let verts: BTreeMap<_, _> = [(1, a), (2, b)].into();
        let table =
            derive_all(&verts, &[edge(9, 1, 2)], &[east, west], &mut masks[..], 0.0).unwrap();
        let r = table.finalize()[&EdgeId {
            way_id: 9,
            segment_index: 0,
        }];
        assert!((r - 0.5).abs() <= 0.02, "{r}");
    }

    #[test]
    fn empty_tile_set_uses_default() {
        let verts: BTreeMap<_, _> = [
            (1, GeoPoint::new(1.0, 1.0).unwrap()),
            (2, GeoPoint::new(1.001, 1.0).unwrap()),
        ]
        .into();
        let mut none: Vec<ShadeMask> = Vec::new();
        let table = derive_all(&verts, &[edge(1, 1, 2)], &[], &mut none[..], 0.0).unwrap();
        assert_eq!(
            table.finalize().values().copied().collect::<Vec<_>>(),
            vec![0.0]
        );
    }

    #[test]
    fn missing_mask_names_tile() {
        let t = TileRef::new(GeoPoint::new(10.0, 10.0).unwrap()).unwrap();
        let verts: BTreeMap<_, _> = [(1, t.center), (2, t.from_pixel_space(10.0, 10.0))].into();
        let mut none: Vec<ShadeMask> = Vec::new();
        let err = derive_all(&verts, &[edge(1, 1, 2)], &[t], &mut none[..], 0.0).unwrap_err();
        assert!(matches!(err, DeriveError::Mask { tile, .. } if tile == t));
    }

    #[test]
    fn duplicate_tiles_rejected() {
        let t = TileRef::new(GeoPoint::new(10.0, 10.0).unwrap()).unwrap();
        let mut none: Vec<ShadeMask> = Vec::new();
        assert!(derive_all(&BTreeMap::new(), &[], &[t, t], &mut none[..], 0.0).is_err());
    }

    #[test]
    fn inverted_mask_complements_ratio() {
        let t = TileRef::new(GeoPoint::new(-20.0, 30.0).unwrap()).unwrap();
        let mut img = TileImage::filled(t, [200, 200, 200]);
        for (i, px) in img.pixels_mut().iter_mut().enumerate() {
            if (i / 400 + i % 400) % 7 < 3 {
                *px = [20, 20, 20];
            }
        }
        let m = extract_mask(&img, 75).unwrap();
        let verts: BTreeMap<_, _> = [
            (1, t.from_pixel_space(12.3, 40.1)),
            (2, t.from_pixel_space(350.2, 377.7)),
        ]
        .into();
        let e = [edge(1, 1, 2)];
        let r = derive_all(&verts, &e, &[t], &mut [m.clone()][..], 0.0)
            .unwrap()
            .finalize();
        let rinv = derive_all(&verts, &e, &[t], &mut [m.inverted()][..], 0.0)
            .unwrap()
            .finalize();
        let (a, b) = (r.values().next().unwrap(), rinv.values().next().unwrap());
        assert!((a + b - 1.0).abs() < 1e-12);
    }
}
