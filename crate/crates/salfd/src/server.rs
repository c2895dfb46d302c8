//! HTTP API for interactive demonstrations.
//!
//! | method | path | body / query | response |
//! |---|---|---|---|
//! | POST | `/sessions` | | `{"id": n}` |
//! | POST | `/sessions/{id}/place` | placement | verification outcome |
//! | GET | `/sessions/{id}/plan` | `?reversed=true` | plan document |
//! | GET | `/sessions/{id}/trace` | | per-step reports |
//! | GET | `/sessions/{id}/state` | | grid snapshot |
//! | DELETE | `/sessions/{id}` | | 204 |

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use salfd_core::{reverse_plan, Error, LiveSession, PipelineConfig, StepReport};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::{Mutex, RwLock};

use crate::planfile::{self, PlacementDoc, PlanFile, PlanFileError};

type Shared = Arc<Mutex<LiveSession>>;

#[derive(Clone)]
pub struct AppState {
    cfg: Arc<PipelineConfig>,
    sessions: Arc<RwLock<HashMap<u64, Shared>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(cfg: PipelineConfig) -> Self {
        AppState { cfg: Arc::new(cfg), sessions: Arc::default(), next_id: Arc::new(AtomicU64::new(1)) }
    }

    async fn session(&self, id: u64) -> Result<Shared, ApiError> {
        self.sessions.read().await.get(&id).cloned().ok_or(ApiError::NotFound(id))
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(u64),
    Infeasible(Error),
    BadRequest(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::NotFound(id) => {
                (StatusCode::NOT_FOUND, json!({"error": "not-found", "message": format!("no session {id}")}))
            }
            ApiError::Infeasible(e) => {
                let (verdict, cells) = match &e {
                    Error::Infeasible { verdict, .. } => (verdict.kind(), verdict.cells().to_vec()),
                    _ => ("Invalid", Vec::new()),
                };
                let cells: Vec<[i32; 3]> = cells.into_iter().map(Into::into).collect();
                (
                    StatusCode::UNPROCESSABLE_ENTITY,
                    json!({"error": "infeasible", "verdict": verdict, "cells": cells, "message": e.to_string()}),
                )
            }
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, json!({"error": "bad-request", "message": m})),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": "internal", "message": m})),
        };
        (status, Json(body)).into_response()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", delete(delete_session))
        .route("/sessions/{id}/place", post(place))
        .route("/sessions/{id}/plan", get(plan))
        .route("/sessions/{id}/trace", get(trace))
        .route("/sessions/{id}/state", get(snapshot))
        .with_state(state)
}

pub async fn serve(cfg: PipelineConfig, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(cfg))).await
}

#[derive(Serialize)]
struct Created {
    id: u64,
}

async fn create_session(State(app): State<AppState>) -> Result<(StatusCode, Json<Created>), ApiError> {
    let session = LiveSession::new((*app.cfg).clone()).map_err(|e| ApiError::Internal(e.to_string()))?;
    let id = app.next_id.fetch_add(1, Ordering::Relaxed);
    app.sessions.write().await.insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(Created { id })))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<u64>) -> Result<StatusCode, ApiError> {
    app.sessions.write().await.remove(&id).ok_or(ApiError::NotFound(id))?;
    Ok(StatusCode::NO_CONTENT)
}

async fn place(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    Json(doc): Json<PlacementDoc>,
) -> Result<Json<StepReport>, ApiError> {
    let session = app.session(id).await?;
    let b = doc.to_placement(&app.cfg.catalog, 1).map_err(|e| match e {
        PlanFileError::Field { field, message, .. } => ApiError::BadRequest(format!("{field}: {message}")),
        other => ApiError::BadRequest(other.to_string()),
    })?;
    let mut s = session.lock().await;
    match s.place(b) {
        Ok(report) => Ok(Json(report.clone())),
        Err(e @ Error::Infeasible { .. }) | Err(e @ Error::UnknownBrick(_)) => Err(ApiError::Infeasible(e)),
        Err(e) => Err(ApiError::Internal(e.to_string())),
    }
}

#[derive(Deserialize)]
struct PlanQuery {
    #[serde(default)]
    reversed: bool,
}

async fn plan(
    State(app): State<AppState>,
    Path(id): Path<u64>,
    Query(q): Query<PlanQuery>,
) -> Result<Response, ApiError> {
    let session = app.session(id).await?;
    let plan = session.lock().await.learner().plan();
    let plan = if q.reversed { reverse_plan(&plan).map_err(|e| ApiError::Internal(e.to_string()))? } else { plan };
    let file = PlanFile { bounds: app.cfg.bounds, plan };
    let text = planfile::serialize(&file, &app.cfg.catalog).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(([(axum::http::header::CONTENT_TYPE, "application/json")], text).into_response())
}

async fn trace(State(app): State<AppState>, Path(id): Path<u64>) -> Result<Json<Vec<StepReport>>, ApiError> {
    let session = app.session(id).await?;
    let steps = session.lock().await.learner().steps().to_vec();
    Ok(Json(steps))
}

/// Grid snapshot for rendering: one entry per occupied cell of the
/// demonstrated and learned structures.
#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct StateSnapshot {
    pub bounds: [u16; 3],
    pub demonstrated: Vec<PlacementDoc>,
    pub learned: Vec<PlacementDoc>,
    pub cells: Vec<CellView>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CellView {
    pub position: [i32; 3],
    pub color: String,
    /// Index into `demonstrated`.
    pub brick: usize,
}

async fn snapshot(State(app): State<AppState>, Path(id): Path<u64>) -> Result<Json<StateSnapshot>, ApiError> {
    let session = app.session(id).await?;
    let s = session.lock().await;
    let cat = &app.cfg.catalog;
    let docs = |bricks: &[salfd_core::BrickPlacement]| -> Result<Vec<PlacementDoc>, ApiError> {
        bricks
            .iter()
            .map(|b| PlacementDoc::from_placement(b, cat))
            .collect::<Result<_, _>>()
            .map_err(|e| ApiError::Internal(e.to_string()))
    };
    let demo = s.demonstrated();
    let cells = demo
        .grid()
        .iter()
        .map(|(c, &i)| CellView { position: (*c).into(), color: demo.placements()[i].color.name().into(), brick: i })
        .collect();
    Ok(Json(StateSnapshot {
        bounds: app.cfg.bounds.into(),
        demonstrated: docs(demo.placements())?,
        learned: docs(s.learner().assembly().placements())?,
        cells,
    }))
}
