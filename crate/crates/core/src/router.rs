//! Preference-weighted shortest paths.
//!
//! [`plan`] is Dijkstra over the joint edge cost for a fixed `alpha`. Labels
//! are compared lexicographically by (joint cost, total length, vertex
//! sequence); every edge has positive length, so labels strictly grow along
//! any path and the search stays exact under this order. The frontier uses
//! lazy re-insertion: stale heap entries are skipped on extraction.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::geo::{haversine, GeoPoint};
use crate::layered::{check_alpha, joint_weight_unchecked, LayeredGraph};
use crate::network::{Mode, NodeId};

/// How many routes to return and at which preference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preference {
    /// One route at a fixed alpha.
    Alpha(f64),
    /// Up to `k` routes from an evenly spaced alpha sweep.
    TopK(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteQuery {
    pub origin: GeoPoint,
    pub destination: GeoPoint,
    pub mode: Mode,
    pub preference: Preference,
}

impl RouteQuery {
    pub fn validate(&self) -> Result<()> {
        match self.preference {
            Preference::Alpha(a) => check_alpha(a),
            Preference::TopK(0) => Err(invalid("k must be at least 1")),
            Preference::TopK(_) => Ok(()),
        }
    }
}

/// A planned route and its totals.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePlan {
    pub nodes: Vec<NodeId>,
    pub total_length_m: f64,
    pub total_exposed_m: f64,
    pub joint_cost: f64,
    pub alpha_used: f64,
}

impl RoutePlan {
    /// `1 - exposed / length`; zero for an empty (single-vertex) route.
    pub fn mean_shade_ratio(&self) -> f64 {
        if self.total_length_m > 0.0 {
            1.0 - self.total_exposed_m / self.total_length_m
        } else {
            0.0
        }
    }
}

/// Nearest vertex by great-circle distance; ties go to the smaller node id.
pub fn snap(g: GeoPoint, graph: &LayeredGraph) -> Result<NodeId> {
    let mut best: Option<(f64, NodeId)> = None;
    // Vertices iterate in ascending id order, so strict `<` keeps the smallest id.
    for (id, p) in graph.vertices() {
        let d = haversine(g, p);
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, id));
        }
    }
    best.map(|(_, id)| id).ok_or(Error::EmptyGraph)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Label {
    cost: f64,
    length: f64,
}

impl Label {
    const UNREACHED: Label = Label {
        cost: f64::INFINITY,
        length: f64::INFINITY,
    };

    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.length.total_cmp(&other.length))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    label: Label,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (label, vertex)
        other
            .label
            .cmp(&self.label)
            .then(other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Per-query search state.
struct Search {
    labels: Vec<Label>,
    /// (predecessor vertex, edge index)
    prev: Vec<Option<(usize, usize)>>,
    settled: Vec<bool>,
}

impl Search {
    fn path_to(&self, origin: usize, target: usize) -> Option<Vec<usize>> {
        walk_back(
            |v| self.prev[v].map(|(p, _)| p),
            origin,
            target,
            self.labels.len(),
        )
    }

    /// Whether reaching `target` through `via` gives a lexicographically
    /// smaller vertex sequence than the current path to `target`.
    fn via_is_smaller(&self, origin: usize, via: usize, target: usize) -> bool {
        let (Some(mut cand), Some(cur)) = (self.path_to(origin, via), self.path_to(origin, target))
        else {
            return false;
        };
        cand.push(target);
        cand < cur
    }
}

/// Follows predecessor links from `target` back to `origin`; `None` when the
/// chain ends early or cycles.
fn walk_back<T: Copy + PartialEq>(
    prev: impl Fn(T) -> Option<T>,
    origin: T,
    target: T,
    limit: usize,
) -> Option<Vec<T>> {
    let mut path = alloc::vec![target];
    let mut u = target;
    while u != origin {
        u = prev(u)?;
        path.push(u);
        if path.len() > limit + 1 {
            return None;
        }
    }
    path.reverse();
    Some(path)
}

/// Path from `origin` to `target` following `prev` links (target -> its
/// predecessor) in reverse.
pub fn reconstruct(
    prev: &BTreeMap<NodeId, NodeId>,
    origin: NodeId,
    target: NodeId,
) -> Result<Vec<NodeId>> {
    walk_back(|v| prev.get(&v).copied(), origin, target, prev.len()).ok_or_else(|| {
        // report the vertex where the chain stops
        let mut u = target;
        let mut steps = 0;
        while let Some(&p) = prev.get(&u) {
            u = p;
            steps += 1;
            if steps > prev.len() {
                break;
            }
        }
        Error::BrokenChain(u)
    })
}

/// Minimum joint-cost route from `origin` to `destination` at `alpha`.
pub fn plan(
    graph: &LayeredGraph,
    origin: NodeId,
    destination: NodeId,
    alpha: f64,
) -> Result<RoutePlan> {
    check_alpha(alpha)?;
    let o = graph.index_of(origin).ok_or(Error::UnknownVertex(origin))?;
    let d = graph
        .index_of(destination)
        .ok_or(Error::UnknownVertex(destination))?;

    let n = graph.vertex_count();
    let mut s = Search {
        labels: alloc::vec![Label::UNREACHED; n],
        prev: alloc::vec![None; n],
        settled: alloc::vec![false; n],
    };
    s.labels[o] = Label {
        cost: 0.0,
        length: 0.0,
    };
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        label: s.labels[o],
        vertex: o,
    });

    while let Some(HeapEntry { label, vertex: u }) = heap.pop() {
        if s.settled[u] || label != s.labels[u] {
            continue;
        }
        s.settled[u] = true;
        if u == d {
            break;
        }
        for &(v, k) in graph.neighbors(u) {
            if s.settled[v] {
                continue;
            }
            let w = &graph.edges()[k].weights;
            let cand = Label {
                cost: label.cost + joint_weight_unchecked(w, alpha),
                length: label.length + w.length_m,
            };
            match cand.cmp(&s.labels[v]) {
                Ordering::Less => {
                    s.labels[v] = cand;
                    s.prev[v] = Some((u, k));
                    heap.push(HeapEntry {
                        label: cand,
                        vertex: v,
                    });
                }
                Ordering::Equal if s.via_is_smaller(o, u, v) => {
                    s.prev[v] = Some((u, k));
                }
                _ => {}
            }
        }
    }

    if !s.settled[d] {
        return Err(Error::NoRoute {
            from: origin,
            to: destination,
        });
    }

    let path = s
        .path_to(o, d)
        .ok_or(Error::BrokenChain(graph.node_id(d)))?;
    let mut total_exposed = 0.0;
    for &v in &path[1..] {
        let (_, k) = s.prev[v].expect("on path");
        total_exposed += graph.edges()[k].weights.exposed_m;
    }
    Ok(RoutePlan {
        nodes: path.iter().map(|&i| graph.node_id(i)).collect(),
        total_length_m: s.labels[d].length,
        total_exposed_m: total_exposed,
        joint_cost: s.labels[d].cost,
        alpha_used: alpha,
    })
}

/// The alpha grid used by [`plan_topk`]: `i / (k - 1)` for `k > 1`, `[0]` for `k = 1`.
pub fn alpha_grid(k: usize) -> Result<Vec<f64>> {
    match k {
        0 => Err(invalid("k must be at least 1")),
        1 => Ok(alloc::vec![0.0]),
        _ => Ok((0..k).map(|i| i as f64 / (k - 1) as f64).collect()),
    }
}

/// Routes at `k` evenly spaced preferences from shortest (alpha = 0) to most
/// shaded (alpha = 1), keeping the lowest-alpha copy of repeated routes.
pub fn plan_topk(
    graph: &LayeredGraph,
    origin: NodeId,
    destination: NodeId,
    k: usize,
) -> Result<Vec<RoutePlan>> {
    let mut out: Vec<RoutePlan> = Vec::new();
    for alpha in alpha_grid(k)? {
        let p = plan(graph, origin, destination, alpha)?;
        if !out.iter().any(|q| q.nodes == p.nodes) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Snaps both endpoints and plans according to the query's preference.
pub fn answer(
    graph: &LayeredGraph,
    query: &RouteQuery,
) -> Result<(NodeId, NodeId, Vec<RoutePlan>)> {
    query.validate()?;
    let o = snap(query.origin, graph)?;
    let d = snap(query.destination, graph)?;
    let plans = match query.preference {
        Preference::Alpha(a) => alloc::vec![plan(graph, o, d, a)?],
        Preference::TopK(k) => plan_topk(graph, o, d, k)?,
    };
    Ok((o, d, plans))
}
