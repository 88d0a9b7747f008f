//! HTTP routes.
//!
//! | method | path                              | body / query        | reply              |
//! |--------|-----------------------------------|---------------------|--------------------|
//! | POST   | `/sessions`                       | [`CreateSession`]   | [`SessionRecord`]  |
//! | GET    | `/sessions`                       |                     | [`SessionSummary`]s |
//! | GET    | `/sessions/{id}`                  |                     | [`SessionRecord`]  |
//! | POST   | `/sessions/{id}/outcomes`         | [`OutcomeRequest`]  | [`Recommendation`] |
//! | GET    | `/sessions/{id}/posterior`        | `points=N`          | [`PosteriorSample`] |
//! | GET    | `/sessions/{id}/recommendation`   |                     | [`Recommendation`] |
//! | POST   | `/sessions/{id}/close`            |                     | [`SessionRecord`]  |
//! | GET    | `/sessions/{id}/export`           |                     | [`Transcript`]     |
//!
//! Errors carry an [`ErrorBody`](crate::api::ErrorBody): 404 for unknown
//! ids, 422 for validation failures, 409 for a wrong step number or a
//! closed session.

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use serde::Deserialize;
use uuid::Uuid;

use crate::api::{
    CreateSession, OutcomeRequest, PosteriorSample, Recommendation, SessionRecord, SessionSummary, Transcript,
};
use crate::error::{Result, ServiceError};
use crate::store::Store;

pub const DEFAULT_POINTS: usize = 200;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/outcomes", post(outcome))
        .route("/sessions/{id}/posterior", get(posterior))
        .route("/sessions/{id}/recommendation", get(recommendation))
        .route("/sessions/{id}/close", post(close))
        .route("/sessions/{id}/export", get(export))
        .with_state(store)
}

fn body<T>(payload: std::result::Result<Json<T>, JsonRejection>) -> Result<T> {
    payload.map(|Json(v)| v).map_err(|e| ServiceError::invalid("body", e.body_text()))
}

async fn create(
    State(store): State<Arc<Store>>,
    payload: std::result::Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionRecord>)> {
    let req = body(payload)?;
    let rec = SessionRecord::create(Uuid::new_v4().to_string(), req, Utc::now())?;
    store.save(&rec)?;
    Ok((StatusCode::CREATED, Json(rec)))
}

async fn list(State(store): State<Arc<Store>>) -> Result<Json<Vec<SessionSummary>>> {
    Ok(Json(store.list()?.iter().map(SessionSummary::from).collect()))
}

async fn show(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<SessionRecord>> {
    Ok(Json(store.load(&id)?))
}

async fn outcome(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    payload: std::result::Result<Json<OutcomeRequest>, JsonRejection>,
) -> Result<Json<Recommendation>> {
    if !store.exists(&id) {
        return Err(ServiceError::NotFound(id));
    }
    let req = body(payload)?;
    let lock = store.lock(&id);
    let _guard = lock.lock().await;
    let mut rec = store.load(&id)?;
    let out = rec.apply(&req, Utc::now())?;
    store.save(&rec)?;
    Ok(Json(out))
}

#[derive(Debug, Deserialize)]
struct PointsQuery {
    points: Option<usize>,
}

async fn posterior(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    query: std::result::Result<Query<PointsQuery>, QueryRejection>,
) -> Result<Json<PosteriorSample>> {
    let rec = store.load(&id)?;
    let Query(q) = query.map_err(|e| ServiceError::invalid("points", e.body_text()))?;
    Ok(Json(rec.posterior(q.points.unwrap_or(DEFAULT_POINTS))?))
}

async fn recommendation(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<Recommendation>> {
    Ok(Json(store.load(&id)?.recommendation))
}

async fn close(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<SessionRecord>> {
    let lock = store.lock(&id);
    let _guard = lock.lock().await;
    let mut rec = store.load(&id)?;
    rec.close(Utc::now());
    store.save(&rec)?;
    Ok(Json(rec))
}

async fn export(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<Transcript>> {
    Ok(Json(store.load(&id)?.transcript()))
}

/// Serves the API on `addr` until interrupted.
pub async fn serve(addr: std::net::SocketAddr, store: Arc<Store>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
