//! Read-only HTTP API over description sets: concept search and relation
//! cards with shared-span highlights.

mod index;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use accord_core::extraction::RelationType;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;
use tower_http::services::ServeDir;

pub use index::{Card, CardGroup, CardsResponse, DescriptionIndex, Highlights, IndexError};

pub const DEFAULT_K: usize = 3;

type Shared = Arc<DescriptionIndex>;

fn error(status: StatusCode, code: &str, detail: Option<String>) -> Response {
    let body = match detail {
        Some(d) => json!({ "error": code, "detail": d }),
        None => json!({ "error": code }),
    };
    (status, Json(body)).into_response()
}

async fn health(State(index): State<Shared>) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "concepts": index.len() }))
}

async fn concepts(State(index): State<Shared>, Query(params): Query<HashMap<String, String>>) -> Json<serde_json::Value> {
    let q = params.get("q").map(String::as_str).unwrap_or("");
    Json(json!({ "concepts": index.query_concepts(q) }))
}

fn parse_relations(raw: &str) -> Result<Vec<RelationType>, String> {
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let r: RelationType = part.parse().map_err(|_| part.to_string())?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

async fn cards(
    State(index): State<Shared>,
    Path(concept): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    let k = match params.get("k") {
        None => DEFAULT_K,
        Some(raw) => match raw.parse::<usize>() {
            Ok(k) if k >= 1 => k,
            _ => return error(StatusCode::BAD_REQUEST, "invalid_k", Some(raw.clone())),
        },
    };
    let relations = match params.get("relations").map(|r| parse_relations(r)) {
        None => None,
        Some(Ok(rs)) if rs.is_empty() => None,
        Some(Ok(rs)) => Some(rs),
        Some(Err(bad)) => return error(StatusCode::BAD_REQUEST, "unknown_relation", Some(bad)),
    };
    match index.get_cards(&concept, relations.as_deref(), k) {
        Some(resp) => Json(resp).into_response(),
        None => error(StatusCode::NOT_FOUND, "unknown_concept", None),
    }
}

/// API routes, plus static files from `static_dir` for every other path.
pub fn router(index: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/concepts", get(concepts))
        .route("/api/concepts/{concept}/cards", get(cards))
        .with_state(index);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process receives ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        log::info!("listening on http://{addr}");
    }
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
