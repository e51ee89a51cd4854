//! HTTP facade over the engine.
//!
//! Every request reads one catalog snapshot up front and answers entirely
//! from it. Reloads build a new snapshot off to the side and publish it
//! with an atomic swap, so in-flight requests finish on the version they
//! started with. Successful responses are `{"snapshot_version", "data"}`;
//! errors are `{"code", "message", "detail"}`. Both carry the
//! `x-snapshot-version` header.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use arc_swap::ArcSwap;
use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use crate::analyzer::{audit_program, plan_program, whatif, CostModel, WhatifOptions};
use crate::audit::AuditPolicy;
use crate::catalog::{ingest_catalog, CatalogSnapshot};
use crate::error::{Error, ErrorClass};
use crate::ids::ProgramId;
use crate::model::{Credential, Program, Transcript};
use crate::planner::PlanConstraints;
use crate::rational::Rational;

pub const VERSION_HEADER: &str = "x-snapshot-version";

/// A published catalog snapshot and where it came from.
#[derive(Debug)]
pub struct SnapshotHandle {
    pub snapshot: CatalogSnapshot,
    pub loaded_at: DateTime<Utc>,
    pub source_path: String,
}

impl SnapshotHandle {
    pub fn new(snapshot: CatalogSnapshot, source_path: impl Into<String>) -> Self {
        SnapshotHandle {
            snapshot,
            loaded_at: Utc::now(),
            source_path: source_path.into(),
        }
    }

    pub fn version(&self) -> u64 {
        self.snapshot.version()
    }
}

pub struct AppState {
    current: ArcSwap<SnapshotHandle>,
    catalog_dir: Option<PathBuf>,
    reloading: AtomicBool,
    jobs: usize,
}

/// Held while a reload is in progress; a second reload is refused until it
/// drops.
pub struct ReloadGuard<'a>(&'a AtomicBool);

impl Drop for ReloadGuard<'_> {
    fn drop(&mut self) {
        self.0.store(false, Ordering::Release);
    }
}

impl AppState {
    pub fn new(snapshot: CatalogSnapshot, catalog_dir: Option<PathBuf>) -> Self {
        let source = catalog_dir
            .as_ref()
            .map(|d| d.display().to_string())
            .unwrap_or_default();
        AppState {
            current: ArcSwap::from_pointee(SnapshotHandle::new(snapshot, source)),
            catalog_dir,
            reloading: AtomicBool::new(false),
            jobs: 1,
        }
    }

    pub fn from_dir(dir: PathBuf) -> Result<Self, Error> {
        let snapshot = ingest_catalog(&dir)?;
        Ok(Self::new(snapshot, Some(dir)))
    }

    /// Worker threads used by what-if requests.
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn snapshot(&self) -> Arc<SnapshotHandle> {
        self.current.load_full()
    }

    pub fn try_begin_reload(&self) -> Option<ReloadGuard<'_>> {
        self.reloading
            .compare_exchange(false, true, Ordering::AcqRel, Ordering::Acquire)
            .ok()
            .map(|_| ReloadGuard(&self.reloading))
    }

    /// Publishes `snapshot` as the current version.
    pub fn publish(&self, snapshot: CatalogSnapshot, source_path: impl Into<String>) {
        self.current.store(Arc::new(SnapshotHandle::new(snapshot, source_path)));
    }
}

/// Error response body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    pub detail: Value,
    #[serde(skip)]
    pub status: u16,
    #[serde(skip)]
    pub snapshot_version: Option<u64>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            code: code.to_string(),
            message: message.into(),
            detail: Value::Null,
            status: status.as_u16(),
            snapshot_version: None,
        }
    }

    fn at(mut self, version: u64) -> Self {
        self.snapshot_version = Some(version);
        self
    }
}

pub fn status_for(class: ErrorClass) -> StatusCode {
    match class {
        ErrorClass::Validation => StatusCode::BAD_REQUEST,
        ErrorClass::NotFound => StatusCode::NOT_FOUND,
        ErrorClass::Engine => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError {
            code: e.code().to_string(),
            message: e.to_string(),
            detail: e.detail(),
            status: status_for(e.class()).as_u16(),
            snapshot_version: None,
        }
    }
}

fn version_header(v: u64) -> [(&'static str, HeaderValue); 1] {
    [(VERSION_HEADER, HeaderValue::from(v))]
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        match self.snapshot_version {
            Some(v) => (status, version_header(v), Json(&self)).into_response(),
            None => (status, Json(&self)).into_response(),
        }
    }
}

/// Success envelope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub snapshot_version: u64,
    pub data: T,
}

fn ok<T: Serialize>(version: u64, data: T) -> Response {
    (
        StatusCode::OK,
        version_header(version),
        Json(Envelope {
            snapshot_version: version,
            data,
        }),
    )
        .into_response()
}

fn parse_body<T: DeserializeOwned>(body: &[u8], version: u64) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()).at(version))
}

async fn blocking<T: Send + 'static>(
    version: u64,
    f: impl FnOnce() -> Result<T, Error> + Send + 'static,
) -> Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(result) => result.map_err(|e| ApiError::from(e).at(version)),
        Err(e) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()).at(version)),
    }
}

/// Program listing entry; the requirement tree is left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramSummary {
    pub id: ProgramId,
    pub institution_id: crate::ids::InstitutionId,
    pub credential: Credential,
    pub title: String,
    pub total_credit_hours: Rational,
}

impl From<&Program> for ProgramSummary {
    fn from(p: &Program) -> Self {
        ProgramSummary {
            id: p.id.clone(),
            institution_id: p.institution_id.clone(),
            credential: p.credential,
            title: p.title.clone(),
            total_credit_hours: p.total_credit_hours,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramsQuery {
    pub institution: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRequest {
    pub program_id: ProgramId,
    pub transcript: Transcript,
    #[serde(default)]
    pub policy: AuditPolicy,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatifRequest {
    pub transcript: Transcript,
    /// Defaults to every bachelor program in the snapshot.
    #[serde(default)]
    pub target_program_ids: Option<Vec<ProgramId>>,
    #[serde(default)]
    pub constraints: Option<PlanConstraints>,
    #[serde(default)]
    pub cost_model: Option<CostModel>,
    #[serde(default)]
    pub policy: Option<AuditPolicy>,
}

impl WhatifRequest {
    pub fn targets(&self, snapshot: &CatalogSnapshot) -> Vec<ProgramId> {
        match &self.target_program_ids {
            Some(ids) => ids.clone(),
            None => snapshot.bachelor_programs().map(|p| p.id.clone()).collect(),
        }
    }

    pub fn options(&self) -> WhatifOptions {
        WhatifOptions {
            cost_model: self.cost_model.clone().unwrap_or_default(),
            constraints: self.constraints.clone().unwrap_or_default(),
            policy: self.policy.unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanRequest {
    pub program_id: ProgramId,
    pub transcript: Transcript,
    #[serde(default)]
    pub constraints: PlanConstraints,
    #[serde(default)]
    pub policy: AuditPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReloadInfo {
    pub loaded_at: DateTime<Utc>,
    pub source_path: String,
}

type Shared = Arc<AppState>;

async fn institutions(State(state): State<Shared>) -> Response {
    let h = state.snapshot();
    let list: Vec<_> = h.snapshot.institutions().cloned().collect();
    ok(h.version(), list)
}

async fn programs(State(state): State<Shared>, query: Result<Query<ProgramsQuery>, QueryRejection>) -> Response {
    let h = state.snapshot();
    let institution = match query {
        Ok(Query(q)) => q.institution,
        Err(e) => {
            return ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.body_text())
                .at(h.version())
                .into_response()
        }
    };
    let list: Vec<ProgramSummary> = match &institution {
        Some(id) => {
            if h.snapshot.institution(id).is_none() {
                let err: ApiError =
                    Error::from(crate::error::CatalogError::UnknownInstitution(id.as_str().into())).into();
                return err.at(h.version()).into_response();
            }
            h.snapshot.programs_at(id).map(ProgramSummary::from).collect()
        }
        None => h.snapshot.programs().map(ProgramSummary::from).collect(),
    };
    ok(h.version(), list)
}

async fn program(State(state): State<Shared>, Path(id): Path<String>) -> Response {
    let h = state.snapshot();
    match h.snapshot.program(&id) {
        Ok(p) => ok(h.version(), p),
        Err(e) => ApiError::from(Error::from(e)).at(h.version()).into_response(),
    }
}

async fn audit_route(State(state): State<Shared>, body: Bytes) -> Response {
    let h = state.snapshot();
    let v = h.version();
    let run = async {
        let req: AuditRequest = parse_body(&body, v)?;
        blocking(v, move || {
            audit_program(&req.transcript, &req.program_id, &h.snapshot, &req.policy)
        })
        .await
    };
    match run.await {
        Ok(data) => ok(v, data),
        Err(e) => e.into_response(),
    }
}

async fn whatif_route(State(state): State<Shared>, body: Bytes) -> Response {
    let h = state.snapshot();
    let v = h.version();
    let jobs = state.jobs;
    let run = async {
        let req: WhatifRequest = parse_body(&body, v)?;
        blocking(v, move || {
            let targets = req.targets(&h.snapshot);
            whatif(&req.transcript, &targets, &h.snapshot, &req.options(), jobs)
        })
        .await
    };
    match run.await {
        Ok(data) => ok(v, data),
        Err(e) => e.into_response(),
    }
}

async fn plan_route(State(state): State<Shared>, body: Bytes) -> Response {
    let h = state.snapshot();
    let v = h.version();
    let run = async {
        let req: PlanRequest = parse_body(&body, v)?;
        blocking(v, move || {
            plan_program(
                &req.transcript,
                &req.program_id,
                &h.snapshot,
                &req.constraints,
                &req.policy,
            )
        })
        .await
    };
    match run.await {
        Ok(data) => ok(v, data),
        Err(e) => e.into_response(),
    }
}

async fn reload(State(state): State<Shared>) -> Response {
    let current = state.snapshot().version();
    let Some(dir) = state.catalog_dir.clone() else {
        return ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "no_catalog_dir",
            "the service was not started from a catalog directory",
        )
        .at(current)
        .into_response();
    };
    let Some(guard) = state.try_begin_reload() else {
        return ApiError::new(
            StatusCode::CONFLICT,
            "reload_in_progress",
            "a reload is already running",
        )
        .at(current)
        .into_response();
    };
    let loaded = tokio::task::spawn_blocking({
        let dir = dir.clone();
        move || ingest_catalog(&dir)
    })
    .await;
    let response = match loaded {
        Ok(Ok(snapshot)) => {
            state.publish(snapshot, dir.display().to_string());
            let h = state.snapshot();
            ok(
                h.version(),
                ReloadInfo {
                    loaded_at: h.loaded_at,
                    source_path: h.source_path.clone(),
                },
            )
        }
        Ok(Err(e)) => {
            let mut err = ApiError::from(Error::from(e)).at(current);
            err.status = StatusCode::INTERNAL_SERVER_ERROR.as_u16();
            err.into_response()
        }
        Err(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
            .at(current)
            .into_response(),
    };
    drop(guard);
    response
}

async fn not_found(State(state): State<Shared>) -> Response {
    ApiError::new(StatusCode::NOT_FOUND, "no_route", "no such route")
        .at(state.snapshot().version())
        .into_response()
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/v1/institutions", get(institutions))
        .route("/v1/programs", get(programs))
        .route("/v1/programs/{id}", get(program))
        .route("/v1/audit", post(audit_route))
        .route("/v1/whatif", post(whatif_route))
        .route("/v1/plan", post(plan_route))
        .route("/v1/admin/reload", post(reload))
        .fallback(not_found)
        .layer(CorsLayer::permissive())
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(state: Shared, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!(
        "listening on {} (catalog version {})",
        listener.local_addr()?,
        state.snapshot().version()
    );
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Error body for a library error, as the service would send it.
pub fn error_body(e: &Error) -> Value {
    json!({"code": e.code(), "message": e.to_string(), "detail": e.detail()})
}
