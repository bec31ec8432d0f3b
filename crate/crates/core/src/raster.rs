//! Line voxelization on a tile's pixel grid.
//!
//! Segments are clipped to the tile square and then walked cell by cell
//! (Amanatides & Woo). Every pixel whose interior the segment crosses is
//! emitted once, in order from the first endpoint to the second. When the
//! segment passes exactly through a pixel corner the walk steps diagonally,
//! so the output is always 8-connected.

use alloc::vec::Vec;

use crate::geo::{GeoPoint, PixelCoord, TileRef};

/// Pixels of `tile` crossed by the segment `a`-`b`, in traversal order.
/// Empty when the segment misses the tile.
pub fn rasterize_edge(a: GeoPoint, b: GeoPoint, tile: &TileRef) -> Vec<PixelCoord> {
    rasterize_segment(tile.to_pixel_space(a), tile.to_pixel_space(b), tile.side_px)
}

/// Clip `p0`-`p1` (pixel-space, see [`TileRef::to_pixel_space`]) to
/// `[0, side]^2`. Returns the parameter range kept, or `None`.
fn clip(p0: (f64, f64), p1: (f64, f64), side: f64) -> Option<(f64, f64)> {
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    for (p, q) in [
        (-dx, p0.0),
        (dx, side - p0.0),
        (-dy, p0.1),
        (dy, side - p0.1),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

fn start_cell(x: f64, d: f64, side: i64) -> i64 {
    let f = libm::floor(x);
    // Starting on a grid line and heading negative: the first cell entered
    // is the one below the line.
    let c = if d < 0.0 && f == x {
        f as i64 - 1
    } else {
        f as i64
    };
    c.clamp(0, side - 1)
}

/// Pixel-space voxelization on a `side` x `side` grid.
pub fn rasterize_segment(p0: (f64, f64), p1: (f64, f64), side: u32) -> Vec<PixelCoord> {
    let sidef = f64::from(side);
    if !(p0.0.is_finite() && p0.1.is_finite() && p1.0.is_finite() && p1.1.is_finite()) {
        return Vec::new();
    }
    let Some((t0, t1)) = clip(p0, p1, sidef) else {
        return Vec::new();
    };
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    let (x0, y0) = (p0.0 + t0 * dx, p0.1 + t0 * dy);
    let (x1, y1) = (p0.0 + t1 * dx, p0.1 + t1 * dy);
    let (dx, dy) = (x1 - x0, y1 - y0);

    // Pixel squares are half-open: a segment lying on the far border
    // belongs to the neighbouring tile.
    if (dx == 0.0 && x0 >= sidef) || (dy == 0.0 && y0 >= sidef) {
        return Vec::new();
    }

    let n = i64::from(side);
    let mut cx = start_cell(x0, dx, n);
    let mut cy = start_cell(y0, dy, n);
    let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dy > 0.0 { 1 } else { -1 };

    // Parameter (0..=1 along the clipped segment) at which the walk leaves
    // the current cell across a vertical / horizontal grid line. Computed
    // directly, not incrementally, so a boundary at the segment end yields
    // exactly 1.0.
    let next_t = |c: i64, step: i64, origin: f64, d: f64| -> f64 {
        if d == 0.0 {
            f64::INFINITY
        } else {
            let boundary = if step > 0 { c + 1 } else { c } as f64;
            (boundary - origin) / d
        }
    };

    let mut out = Vec::new();
    loop {
        out.push(PixelCoord::new(cy as u32, cx as u32));
        let tx = next_t(cx, step_x, x0, dx);
        let ty = next_t(cy, step_y, y0, dy);
        let t = tx.min(ty);
        if t >= 1.0 {
            break;
        }
        if tx <= ty {
            cx += step_x;
        }
        if ty <= tx {
            cy += step_y;
        }
        if !(0..n).contains(&cx) || !(0..n).contains(&cy) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    /// Independent oracle: every cell whose closed square holds a positive
    /// length of the segment (clipped against that cell alone).
    fn brute_supercover(p0: (f64, f64), p1: (f64, f64), side: u32) -> BTreeSet<PixelCoord> {
        let mut cells = BTreeSet::new();
        let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
        let len = libm::sqrt(dx * dx + dy * dy);
        for r in 0..side {
            for c in 0..side {
                let (cx, cy) = (f64::from(c), f64::from(r));
                let mut t0 = 0.0_f64;
                let mut t1 = 1.0_f64;
                let mut ok = true;
                for (p, q) in [
                    (-dx, p0.0 - cx),
                    (dx, cx + 1.0 - p0.0),
                    (-dy, p0.1 - cy),
                    (dy, cy + 1.0 - p0.1),
                ] {
                    if p == 0.0 {
                        if q < 0.0 {
                            ok = false;
                        }
                    } else if p < 0.0 {
                        t0 = t0.max(q / p);
                    } else {
                        t1 = t1.min(q / p);
                    }
                }
                if ok && (t1 - t0) * len > 1e-9 {
                    cells.insert(PixelCoord::new(r, c));
                }
            }
        }
        cells
    }

    fn eight_connected(px: &[PixelCoord]) -> bool {
        px.windows(2).all(|w| {
            let dr = (i64::from(w[0].row) - i64::from(w[1].row)).abs();
            let dc = (i64::from(w[0].col) - i64::from(w[1].col)).abs();
            dr <= 1 && dc <= 1 && dr + dc > 0
        })
    }

    #[test]
    fn full_row_is_400_pixels() {
        let px = rasterize_segment((-10.0, 200.5), (410.0, 200.5), 400);
        assert_eq!(px.len(), 400);
        assert!(px.iter().all(|p| p.row == 200));
        assert_eq!(px[0].col, 0);
        assert_eq!(px[399].col, 399);
    }

    #[test]
    fn outside_is_empty() {
        assert!(rasterize_segment((-10.0, -5.0), (-1.0, 500.0), 400).is_empty());
        assert!(rasterize_segment((500.0, 0.0), (600.0, 400.0), 400).is_empty());
    }

    #[test]
    fn corner_to_corner_diagonal() {
        let px = rasterize_segment((0.0, 0.0), (400.0, 400.0), 400);
        assert!((400..=800).contains(&px.len()), "{}", px.len());
        assert!(eight_connected(&px));
        let oracle = brute_supercover((0.0, 0.0), (400.0, 400.0), 400);
        let got: BTreeSet<_> = px.iter().copied().collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn far_border_belongs_to_neighbour() {
        assert!(rasterize_segment((400.0, 10.0), (400.0, 300.0), 400).is_empty());
        let px = rasterize_segment((10.0, 5.5), (400.0, 5.5), 400);
        assert_eq!(px.len(), 390);
        // ...but the near border is ours
        assert_eq!(rasterize_segment((0.0, 10.5), (0.0, 12.5), 400).len(), 3);
    }

    #[test]
    fn ends_on_grid_line_does_not_spill() {
        let px = rasterize_segment((10.5, 3.5), (20.0, 3.5), 400);
        assert_eq!(px.first().unwrap().col, 10);
        assert_eq!(px.last().unwrap().col, 19);
        let px = rasterize_segment((20.0, 3.5), (10.5, 3.5), 400);
        assert_eq!(px.first().unwrap().col, 19);
        assert_eq!(px.last().unwrap().col, 10);
    }

    #[test]
    fn point_segment_is_one_pixel() {
        assert_eq!(
            rasterize_segment((5.2, 7.9), (5.2, 7.9), 400),
            alloc::vec![PixelCoord::new(7, 5)]
        );
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            x0 in -20.0f64..60.0, y0 in -20.0f64..60.0,
            x1 in -20.0f64..60.0, y1 in -20.0f64..60.0,
        ) {
            let side = 40;
            let px = rasterize_segment((x0, y0), (x1, y1), side);
            let got: BTreeSet<_> = px.iter().copied().collect();
            prop_assert_eq!(got.len(), px.len(), "duplicate pixels");
            prop_assert!(eight_connected(&px));
            let oracle = brute_supercover((x0, y0), (x1, y1), side);
            // The walk may include a start/end cell touched with ~zero length.
            let missing: Vec<_> = oracle.difference(&got).collect();
            prop_assert!(missing.is_empty(), "missing {:?}", missing);
            prop_assert!(got.len() <= oracle.len() + 2);
        }
    }
}
