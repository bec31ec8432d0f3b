//! PNG tile rasters and mask overlays.

use std::path::Path;

use image::{Rgb, RgbImage};
use shadepath_core::{ShadeMask, TileImage, TileRef};

use crate::error::{Error, Result};

/// Loads an 8-bit RGB(A) PNG as the raster of `tile`. Alpha is dropped.
pub fn load(path: &Path, tile: TileRef) -> Result<TileImage> {
    let img = image::open(path)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?
        .to_rgb8();
    if img.width() != tile.side_px || img.height() != tile.side_px {
        return Err(super::format_err(
            path,
            0,
            format!(
                "tile is {}x{}, expected {}x{}",
                img.width(),
                img.height(),
                tile.side_px,
                tile.side_px
            ),
        ));
    }
    let pixels = img.pixels().map(|p| p.0).collect();
    Ok(TileImage::new(tile, pixels)?)
}

pub fn save(path: &Path, img: &TileImage) -> Result<()> {
    let side = img.tile.side_px;
    let buf = RgbImage::from_fn(
        side,
        side,
        |x, y| Rgb(img.pixels()[(y * side + x) as usize]),
    );
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Debug view: shaded pixels blended half-way towards yellow.
pub fn save_overlay(path: &Path, img: &TileImage, mask: &ShadeMask) -> Result<()> {
    let side = img.tile.side_px;
    let buf = RgbImage::from_fn(side, side, |x, y| {
        let i = (y * side + x) as usize;
        let [r, g, b] = img.pixels()[i];
        if mask.bits()[i] {
            Rgb([
                ((u16::from(r) + 255) / 2) as u8,
                ((u16::from(g) + 255) / 2) as u8,
                b / 2,
            ])
        } else {
            Rgb([r, g, b])
        }
    });
    buf.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}
