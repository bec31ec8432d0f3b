//! Files, OSM ingestion, CLI glue and the HTTP service around
//! [`shadepath_core`].

pub mod error;
pub mod formats;
pub mod osm;
pub mod pipeline;
pub mod response;
pub mod service;

pub use error::{Error, Result};
pub use osm::parse_osm;
