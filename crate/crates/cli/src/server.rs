//! Stateless HTTP JSON service over the same commands as the CLI.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cbe_core::exec::Exec;
use serde::Deserialize;
use serde_json::json;
use tokio::sync::Semaphore;
use tower_http::services::ServeDir;

use crate::error::AppError;
use crate::ops::{simulation_load, Command};
use crate::params::Params;
use crate::report::{render, run, VERSION};

pub const BIND_ENV: &str = "CBE_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub static_dir: PathBuf,
    /// Largest number of simulated trials one /simulate request may ask for.
    pub max_trials: u64,
    /// Threads per simulation request.
    pub workers: usize,
    /// Simulation requests allowed to run at once; the rest wait.
    pub max_concurrent_simulations: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            static_dir: PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/static")),
            max_trials: 5_000_000,
            workers: 2,
            max_concurrent_simulations: 2,
        }
    }
}

struct AppState {
    config: ServerConfig,
    simulations: Semaphore,
}

#[derive(Debug, Deserialize)]
struct RenderQuery {
    #[serde(default)]
    raw: bool,
}

fn error_response(e: &AppError) -> Response {
    let status = StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::BAD_REQUEST);
    (status, Json(e.to_json())).into_response()
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "version": VERSION }))
}

async fn api(
    State(state): State<Arc<AppState>>,
    Path(op): Path<String>,
    Query(q): Query<RenderQuery>,
    body: Bytes,
) -> Response {
    let Ok(cmd) = op.parse::<Command>() else {
        let body = json!({ "code": "not_found", "message": format!("unknown endpoint '{op}'") });
        return (StatusCode::NOT_FOUND, Json(body)).into_response();
    };
    let params = match Params::from_json(&body) {
        Ok(p) => p,
        Err(e) => return error_response(&e),
    };
    if params.output.is_some() {
        return error_response(&AppError::Schema {
            code: "schema.unknown_field",
            message: "unknown field `output`: the service does not write files".into(),
        });
    }

    let _permit = if cmd == Command::Simulate {
        match simulation_load(&params) {
            Ok(load) if load > state.config.max_trials => {
                return error_response(&AppError::Budget(format!(
                    "request asks for {load} simulated trials; the service allows {}",
                    state.config.max_trials
                )))
            }
            Ok(_) => {}
            Err(e) => return error_response(&e),
        }
        match state.simulations.acquire().await {
            Ok(p) => Some(p),
            Err(_) => return StatusCode::SERVICE_UNAVAILABLE.into_response(),
        }
    } else {
        None
    };

    let exec = Exec::Threads(state.config.workers.max(1));
    let job = tokio::task::spawn_blocking(move || run(cmd, &params, exec).map(|(r, _)| render(&r, q.raw)));
    match job.await {
        Ok(Ok(text)) => ([(header::CONTENT_TYPE, "application/json")], text).into_response(),
        Ok(Err(e)) => error_response(&e),
        Err(_) => {
            let body = json!({ "code": "internal", "message": "worker failed" });
            (StatusCode::INTERNAL_SERVER_ERROR, Json(body)).into_response()
        }
    }
}

pub fn router(config: ServerConfig) -> Router {
    let static_dir = ServeDir::new(&config.static_dir);
    let state = Arc::new(AppState {
        simulations: Semaphore::new(config.max_concurrent_simulations.max(1)),
        config,
    });
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/{op}", post(api))
        .with_state(state)
        .fallback_service(static_dir)
}

pub async fn serve(bind: &str, config: ServerConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
