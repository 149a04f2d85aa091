//! Read-only HTTP query endpoint over a frozen graph.

use std::collections::HashMap;
use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use energykg_core::{FrozenGraph, Parallelism};
use tokio::net::TcpListener;

use crate::commands::run_query;
use crate::{CliError, PipelineConfig};

pub const RESULTS_MEDIA_TYPE: &str = "application/sparql-results+json";
pub const QUERY_MEDIA_TYPE: &str = "application/sparql-query";
const FORM_MEDIA_TYPE: &str = "application/x-www-form-urlencoded";

/// Shared, immutable state for all requests.
pub struct QueryService {
    config: PipelineConfig,
    graph: FrozenGraph,
    par: Parallelism,
}

impl QueryService {
    pub fn new(config: PipelineConfig, graph: FrozenGraph, par: Parallelism) -> Self {
        QueryService { config, graph, par }
    }

    /// The JSON body `energykg query` would print for the same text.
    pub fn answer(&self, text: &str) -> Result<String, CliError> {
        Ok(run_query(&self.config, &self.graph, text, None, self.par)?.to_json())
    }
}

pub fn router(svc: Arc<QueryService>) -> Router {
    Router::new()
        .route("/query", get(get_query).post(post_query))
        .with_state(svc)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    svc: Arc<QueryService>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), CliError> {
    axum::serve(listener, router(svc))
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|e| CliError::Startup(e.to_string()))
}

fn plain(status: StatusCode, msg: impl Into<String>) -> Response {
    let mut body = msg.into();
    body.push('\n');
    (status, [(header::CONTENT_TYPE, "text/plain; charset=utf-8")], body).into_response()
}

async fn respond(svc: Arc<QueryService>, text: String) -> Response {
    match tokio::task::spawn_blocking(move || svc.answer(&text)).await {
        Ok(Ok(json)) => (StatusCode::OK, [(header::CONTENT_TYPE, RESULTS_MEDIA_TYPE)], json).into_response(),
        Ok(Err(e)) => plain(StatusCode::BAD_REQUEST, e.to_string()),
        Err(e) => {
            log::error!("query task failed: {e}");
            plain(StatusCode::INTERNAL_SERVER_ERROR, "internal error")
        }
    }
}

async fn get_query(State(svc): State<Arc<QueryService>>, Query(params): Query<HashMap<String, String>>) -> Response {
    match params.get("query") {
        Some(q) => respond(svc, q.clone()).await,
        None => plain(StatusCode::BAD_REQUEST, "missing query parameter"),
    }
}

async fn post_query(State(svc): State<Arc<QueryService>>, headers: HeaderMap, body: Bytes) -> Response {
    let media = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| v.split(';').next().unwrap_or("").trim().to_ascii_lowercase());
    let text = match media.as_deref() {
        Some(QUERY_MEDIA_TYPE) => match String::from_utf8(body.to_vec()) {
            Ok(t) => t,
            Err(_) => return plain(StatusCode::BAD_REQUEST, "query body is not UTF-8"),
        },
        Some(FORM_MEDIA_TYPE) => {
            let form: HashMap<String, String> = match serde_urlencoded::from_bytes(&body) {
                Ok(f) => f,
                Err(e) => return plain(StatusCode::BAD_REQUEST, format!("malformed form: {e}")),
            };
            match form.get("query") {
                Some(q) => q.clone(),
                None => return plain(StatusCode::BAD_REQUEST, "missing query field"),
            }
        }
        _ => {
            return plain(
                StatusCode::UNSUPPORTED_MEDIA_TYPE,
                format!("expected {QUERY_MEDIA_TYPE} or {FORM_MEDIA_TYPE}"),
            )
        }
    };
    respond(svc, text).await
}
