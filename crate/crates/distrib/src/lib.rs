//! HTTP front end for [`burau4::distrib::Coordinator`] and a blocking worker
//! transport that talks to it.
//!
//! Endpoints, all JSON:
//!
//! - `POST /v1/lease` `{worker_id}`
//! - `POST /v1/submit` a [`Submission`]
//! - `GET /v1/status`
//! - `GET /v1/hits` verified hits in cursor order
//!
//! When `BURAU4_TOKEN` is set on the server, every request must carry
//! `Authorization: Bearer <token>`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::Notify;

use burau4::distrib::{
    Clock, Coordinator, CoordinatorConfig, DistribError, LeaseRequest, LeaseResponse, Submission,
    SubmitResponse, SystemClock, Transport,
};
use burau4::search::HitRecord;

pub const TOKEN_ENV: &str = "BURAU4_TOKEN";

pub fn token_from_env() -> Option<String> {
    std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty())
}

#[derive(Clone)]
struct AppState {
    coordinator: Arc<Mutex<Coordinator>>,
    clock: Arc<dyn Clock>,
    token: Option<String>,
    drained: Arc<Notify>,
}

struct ApiError(StatusCode, DistribError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<DistribError> for ApiError {
    fn from(e: DistribError) -> Self {
        let code = match e {
            DistribError::Conflict(_) => StatusCode::CONFLICT,
            DistribError::ParamsMismatch { .. } => StatusCode::BAD_REQUEST,
            DistribError::UnknownUnit(_) => StatusCode::NOT_FOUND,
            DistribError::Rejected { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(code, e)
    }
}

fn authorize(state: &AppState, headers: &HeaderMap) -> Result<(), ApiError> {
    let Some(token) = &state.token else {
        return Ok(());
    };
    let given = headers
        .get("authorization")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if given == Some(token.as_str()) {
        Ok(())
    } else {
        Err(ApiError(
            StatusCode::UNAUTHORIZED,
            DistribError::Transport("missing or wrong token".into()),
        ))
    }
}

async fn lease(
    State(st): State<AppState>,
    headers: HeaderMap,
    Json(req): Json<LeaseRequest>,
) -> Result<Json<LeaseResponse>, ApiError> {
    authorize(&st, &headers)?;
    let now = st.clock.now();
    Ok(Json(st.coordinator.lock().unwrap().lease(&req.worker_id, now)))
}

async fn submit(
    State(st): State<AppState>,
    headers: HeaderMap,
    Json(s): Json<Submission>,
) -> Result<Json<SubmitResponse>, ApiError> {
    authorize(&st, &headers)?;
    let now = st.clock.now();
    let c = st.coordinator.clone();
    // re-verification may run a scan; keep it off the reactor
    let (outcome, drained) = tokio::task::spawn_blocking(move || {
        let mut c = c.lock().unwrap();
        let r = c.submit(s, now);
        (r, c.is_drained())
    })
    .await
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, DistribError::Transport(e.to_string())))?;
    if drained {
        st.drained.notify_waiters();
    }
    Ok(Json(SubmitResponse { outcome: outcome? }))
}

async fn status(State(st): State<AppState>, headers: HeaderMap) -> Result<Response, ApiError> {
    authorize(&st, &headers)?;
    let now = st.clock.now();
    Ok(Json(st.coordinator.lock().unwrap().status(now)).into_response())
}

async fn hits(State(st): State<AppState>, headers: HeaderMap) -> Result<Json<Vec<HitRecord>>, ApiError> {
    authorize(&st, &headers)?;
    let all = st.coordinator.lock().unwrap().hits();
    Ok(Json(all.into_iter().filter(|h| h.is_verified_hit()).collect()))
}

#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub bind: SocketAddr,
    pub coordinator: CoordinatorConfig,
    pub ledger: Option<PathBuf>,
    pub token: Option<String>,
    /// Return once every unit has an accepted entry.
    pub exit_when_drained: bool,
}

/// A coordinator bound to a socket, not yet serving.
pub struct Server {
    listener: tokio::net::TcpListener,
    state: AppState,
    exit_when_drained: bool,
}

impl Server {
    pub async fn bind(config: ServeConfig) -> Result<Self, DistribError> {
        let mut c = Coordinator::new(config.coordinator)?;
        if let Some(path) = &config.ledger {
            c = c.with_ledger(path)?;
        }
        let listener = tokio::net::TcpListener::bind(config.bind).await?;
        Ok(Server {
            listener,
            state: AppState {
                coordinator: Arc::new(Mutex::new(c)),
                clock: Arc::new(SystemClock),
                token: config.token,
                drained: Arc::new(Notify::new()),
            },
            exit_when_drained: config.exit_when_drained,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener")
    }

    pub fn coordinator(&self) -> Arc<Mutex<Coordinator>> {
        self.state.coordinator.clone()
    }

    pub async fn run(self) -> Result<(), DistribError> {
        let st = self.state.clone();
        let app = router(self.state);
        let exit = self.exit_when_drained;
        let shutdown = async move {
            if exit {
                loop {
                    let wait = st.drained.notified();
                    if st.coordinator.lock().unwrap().is_drained() {
                        break;
                    }
                    wait.await;
                }
                // let in-flight responses finish
                tokio::time::sleep(Duration::from_millis(100)).await;
            } else {
                let _ = tokio::signal::ctrl_c().await;
            }
        };
        axum::serve(self.listener, app)
            .with_graceful_shutdown(shutdown)
            .await
            .map_err(|e| DistribError::Transport(e.to_string()))
    }
}

fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/lease", post(lease))
        .route("/v1/submit", post(submit))
        .route("/v1/status", get(status))
        .route("/v1/hits", get(hits))
        .with_state(state)
}

/// Run a coordinator until interrupted, or until drained if so configured.
pub fn serve_blocking(config: ServeConfig) -> Result<(), DistribError> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move { Server::bind(config).await?.run().await })
}

/// Blocking HTTP transport for [`burau4::distrib::worker_loop`].
pub struct HttpTransport {
    base: String,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(base: &str, token: Option<String>) -> Self {
        HttpTransport {
            base: base.trim_end_matches('/').to_string(),
            token,
            agent: ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build(),
        }
    }

    fn request(&self, method: &str, path: &str) -> ureq::Request {
        let r = self.agent.request(method, &format!("{}{path}", self.base));
        match &self.token {
            Some(t) => r.set("Authorization", &format!("Bearer {t}")),
            None => r,
        }
    }

    fn decode<T: serde::de::DeserializeOwned>(
        res: Result<ureq::Response, ureq::Error>,
    ) -> Result<T, DistribError> {
        match res {
            Ok(r) => r.into_json().map_err(|e| DistribError::Transport(e.to_string())),
            Err(ureq::Error::Status(code, r)) => {
                let body = r.into_string().unwrap_or_default();
                Err(serde_json::from_str::<DistribError>(&body)
                    .unwrap_or_else(|_| DistribError::Transport(format!("HTTP {code}: {body}"))))
            }
            Err(e) => Err(DistribError::Transport(e.to_string())),
        }
    }

    pub fn status(&self) -> Result<serde_json::Value, DistribError> {
        Self::decode(self.request("GET", "/v1/status").call())
    }

    pub fn hits(&self) -> Result<Vec<HitRecord>, DistribError> {
        Self::decode(self.request("GET", "/v1/hits").call())
    }
}

impl Transport for HttpTransport {
    fn lease(&mut self, req: &LeaseRequest) -> Result<LeaseResponse, DistribError> {
        Self::decode(self.request("POST", "/v1/lease").send_json(req))
    }

    fn submit(&mut self, s: &Submission) -> Result<SubmitResponse, DistribError> {
        Self::decode(self.request("POST", "/v1/submit").send_json(s))
    }
}
