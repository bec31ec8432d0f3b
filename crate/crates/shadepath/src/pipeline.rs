//! Pipeline stages: tiles -> masks -> ratio table -> layered graph.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use shadepath_core::{
    derive_all, extract_mask, mode_filter, shade_fraction, AdmissionTable, DeriveError,
    LayeredGraph, MaskSource, Mode, RoadNetwork, ShadeMask, ShadeRatioTable, TileRef,
};

use crate::error::{Error, IoContext, Result};
use crate::formats::{mask, ratio, tile_image, tile_index};
use crate::osm::parse_osm;

/// Outcome of [`derive_masks`].
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSummary {
    pub tiles: usize,
    pub mean_shade_fraction: f64,
}

/// Mask file name for a tile image file name.
pub fn mask_file_name(tile_filename: &str) -> String {
    let stem = Path::new(tile_filename).with_extension("");
    let flat = stem.to_string_lossy().replace(['/', '\\'], "_");
    format!("{flat}.mask")
}

/// Thresholds every indexed tile and writes one mask file per tile into
/// `out_dir`; with `overlay`, also a `<name>.overlay.png` debug image.
pub fn derive_masks(
    index_path: &Path,
    tiles_dir: &Path,
    out_dir: &Path,
    threshold: u8,
    overlay: bool,
) -> Result<MaskSummary> {
    let entries = tile_index::read(index_path)?;
    fs::create_dir_all(out_dir).at(out_dir)?;
    let fractions = entries
        .par_iter()
        .map(|e| {
            let img = tile_image::load(&tiles_dir.join(&e.filename), e.tile)?;
            let m = extract_mask(&img, threshold)?;
            let name = mask_file_name(&e.filename);
            mask::write(&out_dir.join(&name), &m)?;
            if overlay {
                let png = out_dir.join(name.replace(".mask", ".overlay.png"));
                tile_image::save_overlay(&png, &img, &m)?;
            }
            Ok(shade_fraction(&m))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = if fractions.is_empty() {
        0.0
    } else {
        fractions.iter().sum::<f64>() / fractions.len() as f64
    };
    Ok(MaskSummary {
        tiles: fractions.len(),
        mean_shade_fraction: mean,
    })
}

fn tile_key(t: &TileRef) -> (u64, u64) {
    (t.center.lat.to_bits(), t.center.lon.to_bits())
}

/// Mask files in a directory, loaded lazily by tile.
#[derive(Debug)]
pub struct MaskDir {
    tiles: Vec<TileRef>,
    paths: BTreeMap<(u64, u64), PathBuf>,
}

impl MaskDir {
    /// Indexes every `*.mask` file in `dir` by reading its header.
    pub fn open(dir: &Path) -> Result<Self> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .at(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()
            .at(dir)?;
        files.retain(|p| p.extension().is_some_and(|x| x == "mask"));
        files.sort();
        let mut tiles = Vec::with_capacity(files.len());
        let mut paths = BTreeMap::new();
        for p in files {
            let t = mask::read_tile(&p)?;
            if paths.insert(tile_key(&t), p.clone()).is_some() {
                return Err(crate::formats::format_err(
                    &p,
                    2,
                    "duplicate tile in mask directory",
                ));
            }
            tiles.push(t);
        }
        Ok(Self { tiles, paths })
    }

    pub fn tiles(&self) -> &[TileRef] {
        &self.tiles
    }
}

impl MaskSource for MaskDir {
    type Error = Error;

    fn load(&mut self, tile: &TileRef) -> Result<ShadeMask> {
        let path = self.paths.get(&tile_key(tile)).ok_or(Error::MissingMask {
            lat: tile.center.lat,
            lon: tile.center.lon,
        })?;
        mask::read(path)
    }
}

/// Which edges a ratio table is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    /// Every highway segment (the universal shade layer).
    All,
    Mode(Mode),
}

pub fn load_network(osm_path: &Path) -> Result<RoadNetwork> {
    parse_osm(&fs::read(osm_path).at(osm_path)?)
}

/// Shade ratios for the edges of `layer`, from the masks in `masks_dir`.
pub fn compute_ratios(
    net: &RoadNetwork,
    masks_dir: &Path,
    layer: Layer,
    default_ratio: f64,
) -> Result<ShadeRatioTable> {
    let (vertices, edges) = match layer {
        Layer::All => net.segments(|_| true),
        Layer::Mode(m) => {
            let g = mode_filter(net, m, &AdmissionTable::default());
            (g.vertices, g.edges)
        }
    };
    let mut masks = MaskDir::open(masks_dir)?;
    let tiles = masks.tiles().to_vec();
    derive_all(&vertices, &edges, &tiles, &mut masks, default_ratio).map_err(|e| match e {
        DeriveError::Invalid(e) => e.into(),
        DeriveError::Mask { source, .. } => source,
    })
}

/// Joins a ratio file onto the `mode` layer of `net`.
pub fn build_graph(
    net: &RoadNetwork,
    ratios_path: &Path,
    mode: Mode,
    default_ratio: f64,
) -> Result<LayeredGraph> {
    let table = ratio::read(ratios_path, default_ratio)?;
    let g = mode_filter(net, mode, &AdmissionTable::default());
    Ok(LayeredGraph::build(&g, &table)?)
}
