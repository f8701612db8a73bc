//! HTTP front end: `POST /graphql` and `GET /healthz`.
//!
//! Each request carries `Authorization: Bearer <HS256 JWT>`; the token's role
//! selects the policy verdicts the engine applies before the response is
//! serialized.

mod config;

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use datamin_core::{bearer_token, extract_role, AuthConfig, Engine, EngineError};
use datamin_reduce::RandomSource;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

pub use config::{load_engine, DataSpec, ServiceConfig, StartupError};

/// Shared, read-only request context.
pub struct AppState {
    engine: Engine,
    auth: AuthConfig,
    seed: u64,
    fixed_rng: bool,
    requests: AtomicU64,
}

impl AppState {
    pub fn new(engine: Engine, auth: AuthConfig, seed: u64, fixed_rng: bool) -> Self {
        AppState {
            engine,
            auth,
            seed,
            fixed_rng,
            requests: AtomicU64::new(0),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    fn request_rng(&self) -> RandomSource {
        let n = self.requests.fetch_add(1, Ordering::Relaxed);
        if self.fixed_rng {
            RandomSource::from_seed(self.seed)
        } else {
            RandomSource::from_seed(n ^ self.seed)
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/graphql", post(graphql))
        .route("/healthz", get(healthz))
        .with_state(state)
}

/// A server spawned on the current tokio runtime.
pub struct RunningService {
    pub addr: SocketAddr,
    pub task: JoinHandle<std::io::Result<()>>,
}

/// Loads and validates everything in `config`, binds, and starts serving
/// in a background task.
pub async fn start(config: ServiceConfig) -> Result<RunningService, StartupError> {
    let engine = load_engine(&config.schema_path, &config.policy_path, &config.data)?;
    let bind_err = |e: std::io::Error| StartupError {
        diagnostics: vec![format!("{}: {e}", config.listen)],
    };
    let listener = TcpListener::bind(config.listen).await.map_err(bind_err)?;
    let addr = listener.local_addr().map_err(bind_err)?;
    let state = Arc::new(AppState::new(engine, config.auth, config.seed, config.fixed_rng));
    Ok(RunningService {
        addr,
        task: tokio::spawn(serve(listener, state)),
    })
}

/// Serves until the listener fails or the task is dropped.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> std::io::Result<()> {
    axum::serve(listener, router(state)).await
}

async fn healthz() -> &'static str {
    "ok"
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    let body = json!({ "errors": [{ "message": message.into() }] }).to_string();
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn now() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs() as i64)
}

async fn graphql(State(state): State<Arc<AppState>>, headers: HeaderMap, body: Bytes) -> Response {
    let started = Instant::now();

    let authorization = match headers.get(header::AUTHORIZATION).map(|h| h.to_str()) {
        None => None,
        Some(Ok(h)) => Some(h),
        Some(Err(_)) => return error(StatusCode::UNAUTHORIZED, "authorization header is not ASCII"),
    };
    let role = match bearer_token(authorization).and_then(|t| extract_role(t, &state.auth, now())) {
        Ok(role) => role,
        Err(e) => {
            tracing::info!(status = 401, reason = %e, "rejected");
            return error(StatusCode::UNAUTHORIZED, e.to_string());
        }
    };

    let query = match serde_json::from_slice::<Value>(&body) {
        Ok(Value::Object(mut obj)) => match obj.remove("query") {
            Some(Value::String(q)) => q,
            _ => return error(StatusCode::BAD_REQUEST, "body needs a string member `query`"),
        },
        Ok(_) => return error(StatusCode::BAD_REQUEST, "body must be a JSON object"),
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("body is not JSON: {e}")),
    };

    let mut rng = state.request_rng();
    match state.engine.execute(&query, &role, &mut rng) {
        Ok(doc) => {
            let body = doc.to_json();
            tracing::info!(
                status = 200,
                role = %role,
                bytes = body.len(),
                micros = started.elapsed().as_micros() as u64,
                "query"
            );
            (StatusCode::OK, [(header::CONTENT_TYPE, "application/json")], body).into_response()
        }
        Err(EngineError::Query(e)) => {
            tracing::info!(status = 400, role = %role, "query rejected");
            error(StatusCode::BAD_REQUEST, e.to_string())
        }
        Err(EngineError::Execution(e)) => {
            tracing::error!(status = 500, role = %role, field = %format!("{}.{}", e.type_name, e.field), "execution failed");
            error(
                StatusCode::INTERNAL_SERVER_ERROR,
                format!("internal error at {}.{}", e.type_name, e.field),
            )
        }
    }
}
