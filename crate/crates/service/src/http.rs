//! HTTP JSON API over one immutable snapshot.

use std::collections::HashMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{any, get};
use axum::{Json, Router};
use jbender_core::codeindex::IndexSnapshot;
use jbender_core::search::{SortMode, DEFAULT_ALPHA, DEFAULT_LIMIT};
use serde::Serialize;
use tower_http::services::ServeDir;

use crate::report::{
    developer_detail, developer_ranking, parse_sort, power_law_report, project_detail, project_ranking, search_page,
    ProjectOrder, RequestError,
};

const DEFAULT_TOP: usize = 10;

type Snapshot = Arc<IndexSnapshot>;
type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<RequestError> for ApiError {
    fn from(e: RequestError) -> Self {
        let status = match e {
            RequestError::UnknownProject(_) | RequestError::UnknownDeveloper(_) => StatusCode::NOT_FOUND,
            RequestError::Fit { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        #[derive(Serialize)]
        struct Body {
            error: String,
        }
        (self.status, Json(Body { error: self.message })).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn params(p: Params) -> Result<HashMap<String, String>, ApiError> {
    p.map(|Query(map)| map)
        .map_err(|e| ApiError::bad_request(e.body_text()))
}

fn number<T: std::str::FromStr>(map: &HashMap<String, String>, name: &str, default: T) -> Result<T, ApiError> {
    match map.get(name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::bad_request(format!("bad value `{v}` for `{name}`"))),
    }
}

async fn search_handler(State(s): State<Snapshot>, p: Params) -> ApiResult<crate::report::ApiResultPage> {
    let map = params(p)?;
    let q = map.get("q").map(String::as_str).unwrap_or("");
    let sort = match map.get("sort") {
        Some(v) => parse_sort(v)?,
        None => SortMode::default(),
    };
    let alpha = number(&map, "alpha", DEFAULT_ALPHA)?;
    let limit = number(&map, "limit", DEFAULT_LIMIT)?;
    Ok(Json(search_page(&s, q, sort, alpha, limit)?))
}

async fn project_handler(State(s): State<Snapshot>, Path(id): Path<String>) -> ApiResult<crate::report::ProjectDetail> {
    Ok(Json(project_detail(&s, &id)?))
}

async fn developer_handler(
    State(s): State<Snapshot>,
    Path(id): Path<String>,
) -> ApiResult<crate::report::DeveloperDetail> {
    Ok(Json(developer_detail(&s, &id)?))
}

async fn project_ranking_handler(
    State(s): State<Snapshot>,
    p: Params,
) -> ApiResult<crate::report::Ranking<crate::report::ProjectRankRow>> {
    let map = params(p)?;
    let top = number(&map, "top", DEFAULT_TOP)?;
    let by = match map.get("by") {
        Some(v) => ProjectOrder::parse(v)?,
        None => ProjectOrder::default(),
    };
    Ok(Json(project_ranking(&s, top, by)))
}

async fn developer_ranking_handler(
    State(s): State<Snapshot>,
    p: Params,
) -> ApiResult<crate::report::Ranking<crate::report::DeveloperRankRow>> {
    let map = params(p)?;
    let top = number(&map, "top", DEFAULT_TOP)?;
    Ok(Json(developer_ranking(&s, top)))
}

async fn powerlaw_handler(State(s): State<Snapshot>, p: Params) -> ApiResult<crate::report::PowerLawReport> {
    let map = params(p)?;
    let series = map
        .get("series")
        .ok_or_else(|| ApiError::bad_request("missing `series`"))?;
    Ok(Json(power_law_report(&s, series)?))
}

async fn not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        message: "no such endpoint".into(),
    }
}

/// Builds the API router. With `static_dir`, other paths serve files from it.
pub fn router(snapshot: Arc<IndexSnapshot>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/search", get(search_handler))
        .route("/api/projects/{id}", get(project_handler))
        .route("/api/developers/{id}", get(developer_handler))
        .route("/api/rankings/projects", get(project_ranking_handler))
        .route("/api/rankings/developers", get(developer_ranking_handler))
        .route("/api/stats/powerlaw", get(powerlaw_handler))
        .route("/api", any(not_found))
        .route("/api/{*rest}", any(not_found))
        .with_state(snapshot);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    }
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

/// Serves until interrupted or terminated.
pub fn serve(
    snapshot: IndexSnapshot,
    addr: SocketAddr,
    static_dir: Option<PathBuf>,
    log: &mut dyn Write,
) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        writeln!(
            log,
            "serving {} entities on http://{}",
            snapshot.doc_count,
            listener.local_addr()?
        )?;
        axum::serve(listener, router(Arc::new(snapshot), static_dir))
            .with_graceful_shutdown(shutdown_signal())
            .await?;
        Ok(())
    })
}
