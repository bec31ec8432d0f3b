//! Shade-aware route planning core.
//!
//! Derives per-edge shade ratios from thresholded satellite tiles, joins them
//! onto walk or bike road graphs, and plans routes that trade distance against
//! sun exposure with a single preference `alpha` in `[0, 1]`.
//!
//! The crate is `no_std` and needs only `alloc`; file formats, OSM parsing and
//! the CLI live in the `shadepath` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod geo;
pub mod layered;
pub mod mask;
pub mod network;
pub mod raster;
pub mod ratio;
pub mod router;

pub use error::{Error, Result};
pub use geo::{
    geo_to_pixel, haversine, pixel_to_geo, resolution_at, tiles_covering, BBox, GeoPoint,
    PixelCoord, TileIndex, TileRef,
};
pub use layered::{joint_weight, EdgeWeights, LayeredGraph};
pub use mask::{extract_mask, shade_fraction, ShadeMask, TileImage, DEFAULT_THRESHOLD};
pub use network::{
    mode_filter, AdmissionTable, Edge, EdgeId, Mode, ModeGraph, NodeId, RoadNetwork, Way,
};
pub use raster::rasterize_edge;
pub use ratio::{
    derive_all, edge_tile_contribution, DeriveError, EdgeAccumulator, MaskSource, ShadeRatioTable,
};
pub use router::{plan, plan_topk, reconstruct, snap, Preference, RoutePlan, RouteQuery};
