//! HTTP/JSON front end for interactive evolution sessions.
//!
//! Sessions, calibration trials and judgments are kept in memory and
//! mirrored to JSONL files in the data directory, so a restarted service
//! replays its way back to the same state. Writes to one session are
//! serialized through that session's lock.
//!
//! Validation failures answer 422, unmet preconditions 409, unknown
//! resources 404. Error bodies are `{"error": kind, "message": text}`.

mod config;
mod error;
mod routes;
mod store;

use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;

pub use config::ServiceConfig;
pub use error::ApiError;
pub use routes::{PAGE_SIZE, PREVIEW_POINTS};
pub use store::Store;

/// Builds the router over an opened store.
pub fn app(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(routes::create_session).get(routes::list_sessions))
        .route("/sessions/{id}", get(routes::get_session))
        .route("/sessions/{id}/generation/{n}", get(routes::get_generation))
        .route("/sessions/{id}/grades", post(routes::post_grade))
        .route("/sessions/{id}/evolve", post(routes::post_evolve))
        .route("/sessions/{id}/comparisons", post(routes::post_comparison))
        .route("/sessions/{id}/metrics", get(routes::get_metrics))
        .route("/trace", post(routes::post_trace))
        .route("/decode", post(routes::post_decode))
        .route("/calibration/trials", post(routes::post_trial))
        .route("/calibration/judgments", post(routes::post_judgment))
        .route("/calibration/fit", post(routes::post_fit))
        .route("/harness/target-run", post(routes::post_target_run))
        .with_state(Arc::new(store))
}

/// Opens the data directory and serves until interrupted.
pub async fn serve(config: ServiceConfig) -> Result<(), String> {
    let listen = config.listen.clone();
    let store = Store::open(config)?;
    let listener = tokio::net::TcpListener::bind(&listen)
        .await
        .map_err(|e| format!("cannot listen on {listen}: {e}"))?;
    eprintln!("listening on {listen}");
    axum::serve(listener, app(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| e.to_string())
}
