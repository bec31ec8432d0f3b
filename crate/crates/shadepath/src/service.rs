//! HTTP query service.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde_json::json;
use shadepath_core::{LayeredGraph, Mode};
use tower_http::cors::{Any, CorsLayer};

use crate::response::{route_response, ApiError, RouteParams};

/// Immutable graphs shared by every request.
#[derive(Debug, Default)]
pub struct AppState {
    graphs: BTreeMap<Mode, Arc<LayeredGraph>>,
}

impl AppState {
    pub fn new(graphs: impl IntoIterator<Item = LayeredGraph>) -> Self {
        Self {
            graphs: graphs
                .into_iter()
                .map(|g| (g.mode(), Arc::new(g)))
                .collect(),
        }
    }

    pub fn graph(&self, mode: Mode) -> Option<&Arc<LayeredGraph>> {
        self.graphs.get(&mode)
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods(Any)
        .allow_headers(Any);
    Router::new()
        .route("/route", get(route))
        .route("/health", get(health))
        .layer(cors)
        .with_state(state)
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(e: &ApiError) -> Response {
    let status = StatusCode::from_u16(e.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    json_response(status, e.to_json())
}

async fn route(
    State(state): State<Arc<AppState>>,
    Query(q): Query<HashMap<String, String>>,
) -> Response {
    let params = match RouteParams::from_query(&q) {
        Ok(p) => p,
        Err(e) => return error_response(&e),
    };
    let Some(graph) = state.graph(params.mode).cloned() else {
        return error_response(&ApiError {
            status: 400,
            code: "mode_unavailable",
            message: format!("no graph loaded for mode {}", params.mode),
        });
    };
    let result = tokio::task::spawn_blocking(move || route_response(&graph, &params)).await;
    match result {
        Ok(Ok(resp)) => json_response(StatusCode::OK, resp.to_json()),
        Ok(Err(e)) => error_response(&e),
        Err(join) => error_response(&ApiError {
            status: 500,
            code: "internal",
            message: join.to_string(),
        }),
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    let graphs: serde_json::Map<String, serde_json::Value> = state
        .graphs
        .iter()
        .map(|(m, g)| {
            (
                m.as_str().to_string(),
                json!({ "vertices": g.vertex_count(), "edges": g.edge_count() }),
            )
        })
        .collect();
    json_response(
        StatusCode::OK,
        json!({ "status": "ok", "graphs": graphs }).to_string(),
    )
}

/// Binds `addr` and serves until the process exits.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    serve_on(state, listener).await
}

pub async fn serve_on(
    state: Arc<AppState>,
    listener: tokio::net::TcpListener,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}
