//! Route query parameters and the JSON wire format shared by the CLI and the
//! HTTP service. Both emit exactly [`RouteResponse::to_json`].

use std::collections::HashMap;

use serde::Serialize;
use shadepath_core::router::answer;
use shadepath_core::{GeoPoint, LayeredGraph, Mode, Preference, RouteQuery};

/// Parsed `/route` parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteParams {
    pub origin: GeoPoint,
    pub destination: GeoPoint,
    pub mode: Mode,
    pub preference: Preference,
}

impl RouteParams {
    /// From query-string pairs. Exactly one of `alpha` and `k` must be present.
    pub fn from_query(q: &HashMap<String, String>) -> Result<Self, ApiError> {
        fn num<T: std::str::FromStr>(
            q: &HashMap<String, String>,
            key: &str,
        ) -> Result<Option<T>, ApiError> {
            q.get(key)
                .map(|raw| {
                    raw.trim()
                        .parse()
                        .map_err(|_| ApiError::invalid(format!("{key}={raw:?} is not a number")))
                })
                .transpose()
        }
        let req = |key: &str| -> Result<f64, ApiError> {
            num(q, key)?.ok_or_else(|| ApiError::invalid(format!("missing parameter {key}")))
        };
        let point = |lat: f64, lon: f64| {
            GeoPoint::new(lat, lon).map_err(|e| ApiError::invalid(e.to_string()))
        };
        let origin = point(req("o_lat")?, req("o_lon")?)?;
        let destination = point(req("d_lat")?, req("d_lon")?)?;
        let mode: Mode = q
            .get("mode")
            .ok_or_else(|| ApiError::invalid("missing parameter mode"))?
            .parse()
            .map_err(|e: shadepath_core::Error| ApiError::invalid(e.to_string()))?;
        let alpha: Option<f64> = num(q, "alpha")?;
        let k: Option<usize> = num(q, "k")?;
        let preference = match (alpha, k) {
            (Some(a), None) => Preference::Alpha(a),
            (None, Some(k)) => Preference::TopK(k),
            (Some(_), Some(_)) => {
                return Err(ApiError::invalid("alpha and k are mutually exclusive"))
            }
            (None, None) => return Err(ApiError::invalid("one of alpha or k is required")),
        };
        let p = Self {
            origin,
            destination,
            mode,
            preference,
        };
        p.query()
            .validate()
            .map_err(|e| ApiError::invalid(e.to_string()))?;
        Ok(p)
    }

    pub fn query(&self) -> RouteQuery {
        RouteQuery {
            origin: self.origin,
            destination: self.destination,
            mode: self.mode,
            preference: self.preference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub lat: f64,
    pub lon: f64,
}

impl From<GeoPoint> for Point {
    fn from(g: GeoPoint) -> Self {
        Self {
            lat: g.lat,
            lon: g.lon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteJson {
    pub alpha_used: f64,
    pub total_length_m: f64,
    pub total_exposed_m: f64,
    pub mean_shade_ratio: f64,
    pub node_ids: Vec<i64>,
    pub geometry: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendEntry {
    pub route: usize,
    pub role: &'static str,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteResponse {
    pub mode: &'static str,
    pub origin: Point,
    pub destination: Point,
    pub routes: Vec<RouteJson>,
    pub legend: Vec<LegendEntry>,
}

impl RouteResponse {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("response serializes")
    }
}

const SHORTEST_RGB: [u8; 3] = [0xFF, 0x8C, 0x00];
const SHADED_RGB: [u8; 3] = [0x22, 0x8B, 0x22];

fn role(i: usize, n: usize, alpha: f64) -> &'static str {
    match (i, n) {
        (_, 1) if alpha == 0.0 => "shortest",
        (_, 1) if alpha == 1.0 => "most_shaded",
        (_, 1) => "preferred",
        (0, _) => "shortest",
        (i, n) if i + 1 == n => "most_shaded",
        _ => "intermediate",
    }
}

/// Orange for the shortest route, green for the most shaded, linear in between.
fn color(i: usize, n: usize, alpha: f64) -> String {
    let t = if n > 1 {
        i as f64 / (n - 1) as f64
    } else {
        alpha
    };
    let c: Vec<u8> = (0..3)
        .map(|k| {
            let a = f64::from(SHORTEST_RGB[k]);
            let b = f64::from(SHADED_RGB[k]);
            (a + (b - a) * t).round() as u8
        })
        .collect();
    format!("#{:02X}{:02X}{:02X}", c[0], c[1], c[2])
}

/// Error body: `{"error":{"code":..,"message":..}}` plus an HTTP status.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl ApiError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            status: 400,
            code: "invalid_argument",
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorBody {
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        })
        .expect("error serializes")
    }
}

impl From<shadepath_core::Error> for ApiError {
    fn from(e: shadepath_core::Error) -> Self {
        use shadepath_core::Error as E;
        let (status, code) = match &e {
            E::InvalidArgument(_) | E::Parse { .. } => (400, "invalid_argument"),
            E::NoRoute { .. } => (404, "no_route"),
            E::EmptyGraph => (404, "empty_graph"),
            E::UnknownVertex(_) | E::DanglingNode { .. } | E::BrokenChain(_) => (500, "internal"),
        };
        Self {
            status,
            code,
            message: e.to_string(),
        }
    }
}

/// Answers `params` on `graph`.
pub fn route_response(
    graph: &LayeredGraph,
    params: &RouteParams,
) -> Result<RouteResponse, ApiError> {
    if graph.mode() != params.mode {
        return Err(ApiError::invalid(format!(
            "graph serves mode {}, query asked for {}",
            graph.mode(),
            params.mode
        )));
    }
    let (o, d, plans) = answer(graph, &params.query())?;
    let n = plans.len();
    let routes: Vec<RouteJson> = plans
        .iter()
        .map(|p| RouteJson {
            alpha_used: p.alpha_used,
            total_length_m: p.total_length_m,
            total_exposed_m: p.total_exposed_m,
            mean_shade_ratio: p.mean_shade_ratio(),
            geometry: p
                .nodes
                .iter()
                .map(|&id| graph.vertex(id).expect("path vertex in graph").into())
                .collect(),
            node_ids: p.nodes.clone(),
        })
        .collect();
    let legend = plans
        .iter()
        .enumerate()
        .map(|(i, p)| LegendEntry {
            route: i,
            role: role(i, n, p.alpha_used),
            color: color(i, n, p.alpha_used),
        })
        .collect();
    Ok(RouteResponse {
        mode: graph.mode().as_str(),
        origin: graph.vertex(o).expect("snapped vertex").into(),
        destination: graph.vertex(d).expect("snapped vertex").into(),
        routes,
        legend,
    })
}
