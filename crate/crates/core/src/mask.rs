//! Per-pixel shade classification by brightness thresholding.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::geo::{PixelCoord, TileRef};

/// Brightness below which a pixel counts as shaded.
pub const DEFAULT_THRESHOLD: u8 = 75;

/// An 8-bit RGB raster for one tile, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TileImage {
    pub tile: TileRef,
    pixels: Vec<[u8; 3]>,
}

impl TileImage {
    pub fn new(tile: TileRef, pixels: Vec<[u8; 3]>) -> Result<Self> {
        let side = tile.side_px as usize;
        if pixels.len() != side * side {
            return Err(invalid(alloc::format!(
                "image has {} pixels, tile expects {side}x{side}",
                pixels.len()
            )));
        }
        Ok(Self { tile, pixels })
    }

    /// Uniformly coloured tile.
    pub fn filled(tile: TileRef, rgb: [u8; 3]) -> Self {
        let side = tile.side_px as usize;
        Self {
            tile,
            pixels: alloc::vec![rgb; side * side],
        }
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [[u8; 3]] {
        &mut self.pixels
    }

    pub fn get(&self, p: PixelCoord) -> [u8; 3] {
        self.pixels[p.row as usize * self.tile.side_px as usize + p.col as usize]
    }
}

/// Boolean shaded-pixel grid for one tile, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadeMask {
    pub tile: TileRef,
    pub threshold_used: u8,
    shaded: Vec<bool>,
}

impl ShadeMask {
    pub fn from_bits(tile: TileRef, threshold_used: u8, shaded: Vec<bool>) -> Result<Self> {
        let side = tile.side_px as usize;
        if shaded.len() != side * side {
            return Err(invalid(alloc::format!(
                "mask has {} cells, tile expects {side}x{side}",
                shaded.len()
            )));
        }
        Ok(Self {
            tile,
            threshold_used,
            shaded,
        })
    }

    pub fn side(&self) -> u32 {
        self.tile.side_px
    }

    pub fn bits(&self) -> &[bool] {
        &self.shaded
    }

    pub fn is_shaded(&self, p: PixelCoord) -> Option<bool> {
        if p.row >= self.side() || p.col >= self.side() {
            return None;
        }
        Some(self.shaded[p.row as usize * self.side() as usize + p.col as usize])
    }

    /// The complementary mask (every bit flipped).
    pub fn inverted(&self) -> Self {
        Self {
            tile: self.tile,
            threshold_used: self.threshold_used,
            shaded: self.shaded.iter().map(|b| !b).collect(),
        }
    }
}

/// Whether a pixel is shaded: channel mean strictly below `threshold`.
#[inline]
pub fn is_dark(rgb: [u8; 3], threshold: u8) -> bool {
    // mean < t  <=>  r + g + b < 3t, exact in integers
    let sum = u32::from(rgb[0]) + u32::from(rgb[1]) + u32::from(rgb[2]);
    sum < 3 * u32::from(threshold)
}

/// Classify every pixel of `img`.
pub fn extract_mask(img: &TileImage, threshold: u8) -> Result<ShadeMask> {
    let shaded = img.pixels.iter().map(|&p| is_dark(p, threshold)).collect();
    ShadeMask::from_bits(img.tile, threshold, shaded)
}

/// Fraction of the tile's pixels that are shaded.
pub fn shade_fraction(mask: &ShadeMask) -> f64 {
    let n = mask.shaded.len();
    if n == 0 {
        return 0.0;
    }
    let count = mask.shaded.iter().filter(|&&b| b).count();
    count as f64 / n as f64
}
