//! HTTP/JSON interface to the coverage engine: stateless compute endpoints
//! and a small file-backed scenario store.
//!
//! | Method | Path | Body | Response |
//! |---|---|---|---|
//! | POST | `/api/field` | [`FieldRequest`] | [`FieldPayload`] |
//! | POST | `/api/sweep` | [`SweepRequest`] | [`SweepPayload`] |
//! | POST | `/api/optimize` | [`OptimizeRequest`] | 202 + [`JobTicket`] |
//! | GET | `/api/jobs/{token}` | | [`JobStatus`] |
//! | GET | `/api/scenarios` | | `{"scenarios": [ScenarioEntry]}` |
//! | GET | `/api/scenarios/{name}` | | [`StoredScenario`] |
//! | PUT | `/api/scenarios/{name}` | [`PutScenario`] | [`StoredScenario`] |
//!
//! Errors are `{code, message, field_path?}` with status 400 (parse or
//! validation), 404, 409 (revision mismatch), 413 (grid over
//! [`MAX_CELLS`]) or 500.

pub mod error;
pub mod jobs;
pub mod payload;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wallsense_core::placement::optimize_placement;

pub use error::{ApiError, ErrorBody};
pub use jobs::{JobRegistry, JobStatus, JobTicket};
pub use payload::*;
pub use store::{PutScenario, ScenarioEntry, ScenarioStore, StoredScenario};

pub struct AppState {
    pub store: ScenarioStore,
    pub jobs: JobRegistry,
}

impl AppState {
    pub fn new(store: ScenarioStore) -> Self {
        Self {
            store,
            jobs: JobRegistry::default(),
        }
    }
}

type Shared = Arc<AppState>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/field", post(post_field))
        .route("/api/sweep", post(post_sweep))
        .route("/api/optimize", post(post_optimize))
        .route("/api/jobs/{token}", get(get_job))
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/scenarios/{name}", get(get_scenario).put(put_scenario))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(Arc::new(state))
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, store_dir: PathBuf) -> std::io::Result<()> {
    let store = ScenarioStore::open(&store_dir)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!(
        "listening on http://{}, scenarios in {}",
        listener.local_addr()?,
        store_dir.display()
    );
    axum::serve(listener, router(AppState::new(store))).await
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "parse",
            format!(
                "invalid request body at line {}, column {}: {e}",
                e.line(),
                e.column()
            ),
        )
    })
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("computation aborted: {e}")))?
}

async fn post_field(body: Bytes) -> Result<Json<FieldPayload>, ApiError> {
    let req: FieldRequest = parse_body(&body)?;
    blocking(move || compute_field(&req)).await.map(Json)
}

async fn post_sweep(body: Bytes) -> Result<Json<SweepPayload>, ApiError> {
    let req: SweepRequest = parse_body(&body)?;
    blocking(move || compute_sweep(&req)).await.map(Json)
}

async fn post_optimize(State(state): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: OptimizeRequest = parse_body(&body)?;
    let (scenario, objective) = prepare_optimize(&req)?;
    let (token, job) = state.jobs.create();
    tokio::task::spawn_blocking(move || {
        let progress = |done: usize, total: usize| job.progress(done, total);
        let outcome = optimize_placement(&scenario, &objective, Some(&progress))
            .map(|r| OptimizePayload::from(&r))
            .map_err(|e| ApiError::from(e).body);
        job.finish(outcome);
    });
    Ok((StatusCode::ACCEPTED, Json(JobTicket { token })).into_response())
}

async fn get_job(
    State(state): State<Shared>,
    Path(token): Path<String>,
) -> Result<Json<JobStatus>, ApiError> {
    let job = state
        .jobs
        .get(&token)
        .ok_or_else(|| ApiError::not_found(format!("no job with token {token:?}")))?;
    Ok(Json(job.status()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioList {
    pub scenarios: Vec<ScenarioEntry>,
}

async fn list_scenarios(State(state): State<Shared>) -> Result<Json<ScenarioList>, ApiError> {
    Ok(Json(ScenarioList {
        scenarios: state.store.list().await?,
    }))
}

async fn get_scenario(
    State(state): State<Shared>,
    Path(name): Path<String>,
) -> Result<Json<StoredScenario>, ApiError> {
    Ok(Json(state.store.get(&name).await?))
}

async fn put_scenario(
    State(state): State<Shared>,
    Path(name): Path<String>,
    body: Bytes,
) -> Result<Json<StoredScenario>, ApiError> {
    let req: PutScenario = parse_body(&body)?;
    Ok(Json(state.store.put(&name, &req).await?))
}
