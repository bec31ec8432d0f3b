//! Shade layer joined onto a mode layer.
//!
//! The ratio table covers every known link; the mode graph decides which
//! links exist for walking or cycling. Only mode-graph edges are kept, each
//! annotated with its length and shade ratio.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geo::GeoPoint;
use crate::network::{EdgeId, Mode, ModeGraph, NodeId};
use crate::ratio::ShadeRatioTable;

/// Per-edge objectives. `exposed_m` is the sun-exposed length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeights {
    pub length_m: f64,
    pub ratio: f64,
    pub exposed_m: f64,
}

impl EdgeWeights {
    pub fn new(length_m: f64, ratio: f64) -> Result<Self> {
        if !length_m.is_finite() || length_m <= 0.0 {
            return Err(invalid(alloc::format!(
                "edge length {length_m} must be positive"
            )));
        }
        if !(0.0..=1.0).contains(&ratio) {
            return Err(invalid(alloc::format!(
                "shade ratio {ratio} outside [0, 1]"
            )));
        }
        Ok(Self {
            length_m,
            ratio,
            exposed_m: length_m * (1.0 - ratio),
        })
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid(alloc::format!("alpha {alpha} outside [0, 1]")));
    }
    Ok(())
}

#[inline]
pub(crate) fn joint_weight_unchecked(w: &EdgeWeights, alpha: f64) -> f64 {
    (1.0 - alpha) * w.length_m + alpha * w.exposed_m
}

/// Preference-weighted edge cost in meters:
/// `(1 - alpha) * length + alpha * exposed`.
pub fn joint_weight(w: &EdgeWeights, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(joint_weight_unchecked(w, alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredEdge {
    pub edge_id: Option<EdgeId>,
    /// Dense vertex indices, see [`LayeredGraph::node_id`].
    pub u: usize,
    pub v: usize,
    pub weights: EdgeWeights,
}

/// Routable graph for one mode. Vertices are stored sorted by node id, so
/// comparing dense indices orders vertices the same way as their ids.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredGraph {
    mode: Mode,
    ids: Vec<NodeId>,
    points: Vec<GeoPoint>,
    edges: Vec<LayeredEdge>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl LayeredGraph {
    /// Mode-layer edges annotated from `ratios`; ratio-table entries with no
    /// mode-layer counterpart are inaccessible and ignored.
    pub fn build(mode_graph: &ModeGraph, ratios: &ShadeRatioTable) -> Result<Self> {
        let vertices: Vec<(NodeId, GeoPoint)> =
            mode_graph.vertices.iter().map(|(k, v)| (*k, *v)).collect();
        let edges = mode_graph
            .edges
            .iter()
            .map(|e| {
                let ratio = ratios
                    .ratio(&e.edge_id)
                    .unwrap_or_else(|| ratios.default_ratio());
                Ok((
                    Some(e.edge_id),
                    e.u,
                    e.v,
                    EdgeWeights::new(e.length_m, ratio)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(mode_graph.mode, vertices, edges)
    }

    /// Assembles a graph from explicit vertex and edge records.
    pub fn from_parts(
        mode: Mode,
        mut vertices: Vec<(NodeId, GeoPoint)>,
        edges: Vec<(Option<EdgeId>, NodeId, NodeId, EdgeWeights)>,
    ) -> Result<Self> {
        vertices.sort_by_key(|(id, _)| *id);
        if vertices.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("duplicate vertex id"));
        }
        let (ids, points): (Vec<_>, Vec<_>) = vertices.into_iter().unzip();
        let mut g = Self {
            mode,
            adjacency: alloc::vec![Vec::new(); ids.len()],
            ids,
            points,
            edges: Vec::with_capacity(edges.len()),
        };
        for (edge_id, u, v, weights) in edges {
            let ui = g.index_of(u).ok_or(Error::UnknownVertex(u))?;
            let vi = g.index_of(v).ok_or(Error::UnknownVertex(v))?;
            if ui == vi {
                return Err(invalid(alloc::format!("self-loop at vertex {u}")));
            }
            let k = g.edges.len();
            g.edges.push(LayeredEdge {
                edge_id,
                u: ui,
                v: vi,
                weights,
            });
            g.adjacency[ui].push((vi, k));
            g.adjacency[vi].push((ui, k));
        }
        Ok(g)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub fn node_id(&self, index: usize) -> NodeId {
        self.ids[index]
    }

    pub fn point(&self, index: usize) -> GeoPoint {
        self.points[index]
    }

    pub fn vertex(&self, id: NodeId) -> Option<GeoPoint> {
        self.index_of(id).map(|i| self.points[i])
    }

    pub fn vertices(&self) -> impl Iterator<Item = (NodeId, GeoPoint)> + '_ {
        self.ids.iter().copied().zip(self.points.iter().copied())
    }

    pub fn edges(&self) -> &[LayeredEdge] {
        &self.edges
    }

    /// `(neighbour index, edge index)` pairs around vertex `index`.
    pub fn neighbors(&self, index: usize) -> &[(usize, usize)] {
        &self.adjacency[index]
    }

    /// Weights of every edge joining `u` and `v` (parallel edges allowed).
    pub fn edges_between(&self, u: NodeId, v: NodeId) -> Vec<EdgeWeights> {
        let (Some(ui), Some(vi)) = (self.index_of(u), self.index_of(v)) else {
            return Vec::new();
        };
        self.adjacency[ui]
            .iter()
            .filter(|(n, _)| *n == vi)
            .map(|(_, k)| self.edges[*k].weights)
            .collect()
    }

    /// Edge ids present in this graph.
    pub fn edge_ids(&self) -> BTreeMap<EdgeId, usize> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(k, e)| e.edge_id.map(|id| (id, k)))
            .collect()
    }
}
