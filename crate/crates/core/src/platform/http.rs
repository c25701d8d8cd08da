//! JSON API over the service.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/api/session` | none |
//! | GET | `/api/session/{id}/state` | |
//! | POST | `/api/session/{id}/action` | `{"kind":"continue"}` or `{"kind":"move","action":0,"round":1}` |
//! | POST | `/api/session/{id}/preference` | `{"option":0}` or `{"chosen":"010"}` |
//! | POST | `/api/session/{id}/survey` | any JSON |
//! | GET | `/api/admin/export/{trials,preferences,summary}` | |
//! | POST | `/api/admin/sweep` | none |
//! | GET | `/api/health` | |

use super::service::{ActionRequest, ExportKind, PreferenceRequest, Service};
use super::PlatformError;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::Duration;

pub type Shared = Arc<Mutex<Service>>;

impl PlatformError {
    pub fn status(&self) -> StatusCode {
        match self {
            PlatformError::UnknownSession(_) => StatusCode::NOT_FOUND,
            PlatformError::SessionClosed(_)
            | PlatformError::WrongStage { .. }
            | PlatformError::DuplicateSubmission { .. }
            | PlatformError::NoOpenRound => StatusCode::CONFLICT,
            PlatformError::InvalidChoice(_) => StatusCode::UNPROCESSABLE_ENTITY,
            PlatformError::RoomFull(_) | PlatformError::ServiceNotReady => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for PlatformError {
    fn into_response(self) -> Response {
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}

fn lock(shared: &Shared) -> std::sync::MutexGuard<'_, Service> {
    // a panicked handler leaves the service consistent: state only changes
    // through whole events
    shared.lock().unwrap_or_else(|e| e.into_inner())
}

pub fn router(shared: Shared) -> Router {
    Router::new()
        .route("/api/session", post(create))
        .route("/api/session/{id}/state", get(state))
        .route("/api/session/{id}/action", post(action))
        .route("/api/session/{id}/preference", post(preference))
        .route("/api/session/{id}/survey", post(survey))
        .route("/api/admin/export/{kind}", get(export))
        .route("/api/admin/sweep", post(sweep))
        .route("/api/health", get(health))
        .with_state(shared)
}

async fn create(State(s): State<Shared>) -> Result<impl IntoResponse, PlatformError> {
    Ok((StatusCode::CREATED, Json(lock(&s).create_session()?)))
}

async fn state(State(s): State<Shared>, Path(id): Path<String>) -> Result<impl IntoResponse, PlatformError> {
    Ok(Json(lock(&s).get_state(&id)?))
}

async fn action(
    State(s): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<ActionRequest>,
) -> Result<impl IntoResponse, PlatformError> {
    Ok(Json(lock(&s).submit_action(&id, req)?))
}

async fn preference(
    State(s): State<Shared>,
    Path(id): Path<String>,
    Json(req): Json<PreferenceRequest>,
) -> Result<impl IntoResponse, PlatformError> {
    let mut svc = lock(&s);
    svc.submit_preference(&id, req)?;
    Ok(Json(svc.get_state(&id)?))
}

async fn survey(
    State(s): State<Shared>,
    Path(id): Path<String>,
    Json(answers): Json<Value>,
) -> Result<impl IntoResponse, PlatformError> {
    let mut svc = lock(&s);
    svc.submit_survey(&id, answers)?;
    Ok(Json(svc.get_state(&id)?))
}

async fn export(State(s): State<Shared>, Path(kind): Path<String>) -> Response {
    let Ok(kind) = kind.parse::<ExportKind>() else {
        return (StatusCode::NOT_FOUND, Json(json!({ "error": format!("unknown export `{kind}`") }))).into_response();
    };
    let content_type = match kind {
        ExportKind::Summary => "application/json",
        _ => "application/x-ndjson",
    };
    ([(header::CONTENT_TYPE, content_type)], lock(&s).export(kind)).into_response()
}

async fn sweep(State(s): State<Shared>) -> Result<impl IntoResponse, PlatformError> {
    Ok(Json(json!({ "abandoned": lock(&s).sweep()? })))
}

async fn health(State(s): State<Shared>) -> impl IntoResponse {
    let svc = lock(&s);
    let status = if svc.is_ready() { StatusCode::OK } else { StatusCode::SERVICE_UNAVAILABLE };
    let body = json!({
        "ready": svc.is_ready(),
        "sessions": svc.state().sessions.len(),
        "events": svc.events().len(),
    });
    (status, Json(body))
}

/// Serves until Ctrl-C, sweeping idle sessions every `sweep_every`.
pub async fn serve(service: Service, addr: SocketAddr, sweep_every: Duration) -> Result<(), PlatformError> {
    let shared: Shared = Arc::new(Mutex::new(service));
    let sweeper = shared.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(sweep_every);
        loop {
            tick.tick().await;
            if let Err(e) = lock(&sweeper).sweep() {
                eprintln!("sweep failed: {e}");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(shared))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
