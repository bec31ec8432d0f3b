#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use shadepath::formats::tile_image;
use shadepath::formats::tile_index::{self, TileEntry};
use shadepath::service::{serve_on, AppState};
use shadepath_core::geo::METERS_PER_DEGREE_LAT;
use shadepath_core::{
    resolution_at, EdgeWeights, GeoPoint, LayeredGraph, Mode, NodeId, TileImage, TileRef,
};

pub const DARK: [u8; 3] = [10, 10, 10];
pub const LIGHT: [u8; 3] = [230, 230, 230];

pub fn gp(lat: f64, lon: f64) -> GeoPoint {
    GeoPoint::new(lat, lon).unwrap()
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadepath"))
        .args(args)
        .output()
        .expect("spawn shadepath")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Triangle A(1) B(2) C(3): A-B and B-C are 100 m at r = 0.9, A-C is 150 m
/// in full sun. D(4)-E(5) is a separate component far away.
pub fn triangle(mode: Mode) -> LayeredGraph {
    let w = |l, r| EdgeWeights::new(l, r).unwrap();
    LayeredGraph::from_parts(
        mode,
        vec![
            (1, gp(0.0, 0.0)),
            (2, gp(0.0009, 0.00045)),
            (3, gp(0.0, 0.0009)),
            (4, gp(0.01, 0.01)),
            (5, gp(0.0101, 0.01)),
        ],
        vec![
            (None, 1, 2, w(100.0, 0.9)),
            (None, 2, 3, w(100.0, 0.9)),
            (None, 1, 3, w(150.0, 0.0)),
            (None, 4, 5, w(10.0, 0.5)),
        ],
    )
    .unwrap()
}

pub fn triangle_point(id: NodeId) -> GeoPoint {
    triangle(Mode::Walk).vertex(id).unwrap()
}

/// Tile centers of a `rows` x `cols` block of abutting tiles whose south-west
/// corner is `sw`, rounded as the index file stores them.
pub fn tile_grid(sw: GeoPoint, rows: usize, cols: usize) -> Vec<TileRef> {
    let side = resolution_at(sw.lat).unwrap();
    let dlat = side / METERS_PER_DEGREE_LAT;
    let dlon = side / (METERS_PER_DEGREE_LAT * sw.lat.to_radians().cos());
    let round = |x: f64| (x * 1e8).round() / 1e8;
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let lat = round(sw.lat + (r as f64 + 0.5) * dlat);
            let lon = round(sw.lon + (c as f64 + 0.5) * dlon);
            out.push(TileRef::new(gp(lat, lon)).unwrap());
        }
    }
    out
}

/// Writes one PNG per tile plus `index.csv`; returns the index path.
pub fn write_tiles(dir: &Path, images: &[TileImage]) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let mut entries = Vec::new();
    for (i, img) in images.iter().enumerate() {
        let filename = format!("tile_{i:03}.png");
        tile_image::save(&dir.join(&filename), img).unwrap();
        entries.push(TileEntry {
            tile: img.tile,
            filename,
        });
    }
    let index = dir.join("index.csv");
    tile_index::write(&index, &entries).unwrap();
    index
}

pub type OsmWay<'a> = (i64, Vec<NodeId>, Vec<(&'a str, &'a str)>);

pub fn osm_xml(nodes: &[(NodeId, GeoPoint)], ways: &[OsmWay]) -> String {
    let mut s = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\">\n");
    for (id, g) in nodes {
        let _ = writeln!(
            s,
            "  <node id=\"{id}\" lat=\"{}\" lon=\"{}\"/>",
            g.lat, g.lon
        );
    }
    for (id, refs, tags) in ways {
        let _ = writeln!(s, "  <way id=\"{id}\">");
        for r in refs {
            let _ = writeln!(s, "    <nd ref=\"{r}\"/>");
        }
        for (k, v) in tags {
            let _ = writeln!(s, "    <tag k=\"{k}\" v=\"{v}\"/>");
        }
        s.push_str("  </way>\n");
    }
    s.push_str("</osm>\n");
    s
}

/// Starts the service on an ephemeral port; returns its base URL.
pub fn spawn_server(graphs: Vec<LayeredGraph>) -> String {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let addr = listener.local_addr().unwrap();
    let state = Arc::new(AppState::new(graphs));
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let l = tokio::net::TcpListener::from_std(listener).unwrap();
            serve_on(state, l).await.unwrap();
        });
    });
    format!("http://{addr}")
}

pub struct HttpReply {
    pub status: u16,
    pub body: String,
    pub allow_origin: Option<String>,
}

pub fn http_get(url: &str) -> HttpReply {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into();
    let mut resp = agent
        .get(url)
        .header("Origin", "http://localhost:5173")
        .call()
        .unwrap();
    HttpReply {
        status: resp.status().as_u16(),
        allow_origin: resp
            .headers()
            .get("access-control-allow-origin")
            .map(|v| v.to_str().unwrap().to_string()),
        body: resp.body_mut().read_to_string().unwrap(),
    }
}
