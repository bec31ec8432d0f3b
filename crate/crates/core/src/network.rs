//! Road network model and per-mode connectivity graphs.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::geo::{haversine, GeoPoint};

pub type NodeId = i64;

/// Travel mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Walk,
    Bike,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Walk, Mode::Bike];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Walk => "walk",
            Mode::Bike => "bike",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walk" => Ok(Mode::Walk),
            "bike" => Ok(Mode::Bike),
            other => Err(invalid(alloc::format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Way {
    pub way_id: i64,
    pub node_ids: Vec<NodeId>,
    pub name: Option<String>,
    pub tags: BTreeMap<String, String>,
}

impl Way {
    /// Builds a way, collapsing immediate duplicate node references.
    pub fn new(
        way_id: i64,
        mut node_ids: Vec<NodeId>,
        tags: BTreeMap<String, String>,
    ) -> Result<Self> {
        node_ids.dedup();
        if node_ids.len() < 2 {
            return Err(invalid(alloc::format!(
                "way {way_id} has fewer than two distinct consecutive nodes"
            )));
        }
        let name = tags.get("name").cloned();
        Ok(Self {
            way_id,
            node_ids,
            name,
            tags,
        })
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.get(key).map(String::as_str)
    }
}

/// Parsed OSM nodes and highway ways.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoadNetwork {
    nodes: BTreeMap<NodeId, GeoPoint>,
    ways: Vec<Way>,
}

impl RoadNetwork {
    /// Fails with [`Error::DanglingNode`] when a way references an absent node.
    pub fn new(nodes: BTreeMap<NodeId, GeoPoint>, ways: Vec<Way>) -> Result<Self> {
        for w in &ways {
            if let Some(&missing) = w.node_ids.iter().find(|id| !nodes.contains_key(id)) {
                return Err(Error::DanglingNode {
                    way: w.way_id,
                    node: missing,
                });
            }
        }
        Ok(Self { nodes, ways })
    }

    pub fn nodes(&self) -> &BTreeMap<NodeId, GeoPoint> {
        &self.nodes
    }

    pub fn ways(&self) -> &[Way] {
        &self.ways
    }

    pub fn node(&self, id: NodeId) -> Option<GeoPoint> {
        self.nodes.get(&id).copied()
    }

    /// Splits every way accepted by `keep` into consecutive-pair edges.
    /// Zero-length segments (distinct nodes at identical coordinates) are skipped.
    pub fn segments(
        &self,
        mut keep: impl FnMut(&Way) -> bool,
    ) -> (BTreeMap<NodeId, GeoPoint>, Vec<Edge>) {
        let mut vertices = BTreeMap::new();
        let mut edges = Vec::new();
        for way in self.ways.iter().filter(|w| keep(w)) {
            for (i, pair) in way.node_ids.windows(2).enumerate() {
                let (u, v) = (pair[0], pair[1]);
                let (a, b) = (self.nodes[&u], self.nodes[&v]);
                let length_m = haversine(a, b);
                if length_m <= 0.0 {
                    continue;
                }
                vertices.insert(u, a);
                vertices.insert(v, b);
                edges.push(Edge {
                    edge_id: EdgeId {
                        way_id: way.way_id,
                        segment_index: i as u32,
                    },
                    u,
                    v,
                    length_m,
                    way_name: way.name.clone(),
                });
            }
        }
        (vertices, edges)
    }
}

/// Identity of one way segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub way_id: i64,
    pub segment_index: u32,
}

/// Undirected segment between consecutive way nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub edge_id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub length_m: f64,
    pub way_name: Option<String>,
}

/// Connectivity graph for one travel mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGraph {
    pub mode: Mode,
    pub vertices: BTreeMap<NodeId, GeoPoint>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct TagRule {
    mode: Mode,
    key: String,
    value: String,
}

/// Which ways admit which travel mode.
///
/// A way is admitted for a mode when at least one `allow` rule for that mode
/// matches one of its tags and no `deny` rule for that mode does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissionTable {
    allow: Vec<TagRule>,
    deny: Vec<TagRule>,
}

const DEFAULT_ADMISSION: &str = include_str!("../data/admission.txt");

impl Default for AdmissionTable {
    fn default() -> Self {
        Self::parse(DEFAULT_ADMISSION).expect("bundled admission table is valid")
    }
}

impl AdmissionTable {
    /// Parses `allow|deny,<mode>,<tag>,<value>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = Self {
            allow: Vec::new(),
            deny: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [kind, mode, key, value] = fields[..] else {
                return Err(parse_err(alloc::format!(
                    "expected 4 fields, found {}",
                    fields.len()
                )));
            };
            let rule = TagRule {
                mode: mode.parse().map_err(|e: Error| parse_err(e.to_string()))?,
                key: key.to_string(),
                value: value.to_string(),
            };
            match kind {
                "allow" => table.allow.push(rule),
                "deny" => table.deny.push(rule),
                other => return Err(parse_err(alloc::format!("unknown rule kind {other:?}"))),
            }
        }
        Ok(table)
    }

    pub fn admits(&self, way: &Way, mode: Mode) -> bool {
        let matches = |r: &&TagRule| r.mode == mode && way.tag(&r.key) == Some(r.value.as_str());
        self.allow.iter().any(|r| matches(&r)) && !self.deny.iter().any(|r| matches(&r))
    }
}

/// The `mode` layer of `net`: admitted ways split into segment edges.
pub fn mode_filter(net: &RoadNetwork, mode: Mode, table: &AdmissionTable) -> ModeGraph {
    let (vertices, edges) = net.segments(|w| table.admits(w, mode));
    ModeGraph {
        mode,
        vertices,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    fn way(id: i64, nodes: &[NodeId], t: &[(&str, &str)]) -> Way {
        Way::new(id, nodes.to_vec(), tags(t)).unwrap()
    }

    fn grid_nodes() -> BTreeMap<NodeId, GeoPoint> {
        (0..6)
            .map(|i| {
                (
                    i as NodeId + 1,
                    GeoPoint::new(
                        33.42 + 0.0001 * (i / 3) as f64,
                        -111.94 + 0.0001 * (i % 3) as f64,
                    )
                    .unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn way_dedups_consecutive_nodes() {
        let w = way(1, &[1, 1, 2, 2, 3], &[("highway", "path")]);
        assert_eq!(w.node_ids, vec![1, 2, 3]);
        assert!(Way::new(2, vec![5, 5], BTreeMap::new()).is_err());
    }

    #[test]
    fn dangling_reference_names_way() {
        let err = RoadNetwork::new(
            grid_nodes(),
            vec![way(77, &[1, 99], &[("highway", "path")])],
        )
        .unwrap_err();
        assert_eq!(err, Error::DanglingNode { way: 77, node: 99 });
    }

    #[test]
    fn footway_and_cycleway_admission() {
        let table = AdmissionTable::default();
        let foot = way(1, &[1, 2], &[("highway", "footway")]);
        let cycle = way(2, &[2, 3], &[("highway", "cycleway")]);
        assert!(table.admits(&foot, Mode::Walk));
        assert!(!table.admits(&foot, Mode::Bike));
        assert!(table.admits(&cycle, Mode::Bike));
        assert!(!table.admits(&cycle, Mode::Walk));
    }

    #[test]
    fn deny_tags_override() {
        let table = AdmissionTable::default();
        let w = way(1, &[1, 2], &[("highway", "residential"), ("foot", "no")]);
        assert!(!table.admits(&w, Mode::Walk));
        assert!(table.admits(&w, Mode::Bike));
        let w = way(2, &[1, 2], &[("highway", "path"), ("bicycle", "no")]);
        assert!(table.admits(&w, Mode::Walk));
        assert!(!table.admits(&w, Mode::Bike));
        let w = way(3, &[1, 2], &[("highway", "motorway")]);
        assert!(!table.admits(&w, Mode::Walk) && !table.admits(&w, Mode::Bike));
    }

    #[test]
    fn five_way_fixture_edge_sets() {
        let net = RoadNetwork::new(
            grid_nodes(),
            vec![
                way(10, &[1, 2, 3], &[("highway", "footway")]),
                way(11, &[4, 5], &[("highway", "cycleway")]),
                way(12, &[1, 4], &[("highway", "residential")]),
                way(13, &[3, 6], &[("highway", "steps")]),
                way(14, &[5, 6], &[("highway", "primary"), ("bicycle", "no")]),
            ],
        )
        .unwrap();
        let table = AdmissionTable::default();
        let ids = |g: &ModeGraph| {
            g.edges
                .iter()
                .map(|e| (e.edge_id.way_id, e.edge_id.segment_index, e.u, e.v))
                .collect::<Vec<_>>()
        };
        let walk = mode_filter(&net, Mode::Walk, &table);
        assert_eq!(
            ids(&walk),
            vec![
                (10, 0, 1, 2),
                (10, 1, 2, 3),
                (12, 0, 1, 4),
                (13, 0, 3, 6),
                (14, 0, 5, 6)
            ]
        );
        let bike = mode_filter(&net, Mode::Bike, &table);
        assert_eq!(ids(&bike), vec![(11, 0, 4, 5), (12, 0, 1, 4)]);
        assert_eq!(
            bike.vertices.keys().copied().collect::<Vec<_>>(),
            vec![1, 4, 5]
        );
        for e in walk.edges.iter().chain(&bike.edges) {
            let d = haversine(net.node(e.u).unwrap(), net.node(e.v).unwrap());
            assert!((e.length_m - d).abs() <= 1e-6 * d);
            assert!(e.length_m > 0.0);
        }
    }

    #[test]
    fn split_preserves_polyline_length() {
        let net = RoadNetwork::new(
            grid_nodes(),
            vec![way(1, &[1, 2, 3, 6, 5, 4], &[("highway", "path")])],
        )
        .unwrap();
        let g = mode_filter(&net, Mode::Walk, &AdmissionTable::default());
        let total: f64 = g.edges.iter().map(|e| e.length_m).sum();
        let ids = &net.ways()[0].node_ids;
        let poly: f64 = ids
            .windows(2)
            .map(|p| haversine(net.node(p[0]).unwrap(), net.node(p[1]).unwrap()))
            .sum();
        assert!((total - poly).abs() < 1e-9);
    }

    #[test]
    fn admission_parse_errors() {
        assert!(AdmissionTable::parse("allow,walk,highway").is_err());
        assert!(AdmissionTable::parse("permit,walk,highway,path").is_err());
        assert!(matches!(
            AdmissionTable::parse("# ok\nallow,car,highway,path"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn mode_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("car".parse::<Mode>().is_err());
    }
}
