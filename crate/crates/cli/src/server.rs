//! HTTP and websocket transport over the scene store and playback sessions.
//!
//! | method | path | body / query | response |
//! |---|---|---|---|
//! | GET | `/scenes` | | `[SceneEntry]` ordered by id |
//! | GET | `/scenes/{id}/summary` | | `SceneSummary` |
//! | GET | `/scenes/{id}/frames/{n}` | `overlays=emotion,socialization,collectivity\|all`, `highlight=3:yellow,7:red` | `FramePayload` |
//! | POST | `/sessions` | `{"scene_id": ..}` | `PlaybackSession` (201) |
//! | GET | `/sessions/{id}` | | `PlaybackSession` |
//! | DELETE | `/sessions/{id}` | | 204 |
//! | POST | `/sessions/{id}/control` | `ControlCommand` | `PlaybackSession` |
//! | GET (ws) | `/sessions/{id}/feed` | same query as frames | stream of `FramePayload` |
//!
//! Errors are `{"error": kind, "message": text}` with a matching status code.
//! The feed also accepts `ControlCommand` text messages from the client.

use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use crowdlens_core::classify::DensityLevel;
use crowdlens_core::service::{
    ControlCommand, OverlayConfig, PlaybackSession, PlaybackState, SceneStore, ServiceError,
    SessionManager,
};
use crowdlens_core::trajectory::Frame;
use serde::{Deserialize, Serialize};

/// Poll interval of a feed whose session is not playing.
const IDLE_POLL: Duration = Duration::from_millis(50);

#[derive(Clone, Default)]
pub struct AppState {
    pub store: Arc<SceneStore>,
    pub sessions: Arc<SessionManager>,
}

impl AppState {
    pub fn new(store: SceneStore) -> Self {
        Self {
            store: Arc::new(store),
            sessions: Arc::new(SessionManager::new()),
        }
    }
}

#[derive(Debug)]
pub enum ApiError {
    Service(ServiceError),
    BadRequest(String),
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::Service(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, message) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "BadRequest", m),
            ApiError::Service(e) => {
                let (status, kind) = match &e {
                    ServiceError::StoreUnavailable => {
                        (StatusCode::SERVICE_UNAVAILABLE, "StoreUnavailable")
                    }
                    ServiceError::UnknownScene(_) => (StatusCode::NOT_FOUND, "UnknownScene"),
                    ServiceError::FrameOutOfRange { .. } => {
                        (StatusCode::NOT_FOUND, "FrameOutOfRange")
                    }
                    ServiceError::UnknownSession(_) => (StatusCode::NOT_FOUND, "UnknownSession"),
                    ServiceError::InvalidRate(_) => (StatusCode::BAD_REQUEST, "InvalidRate"),
                    ServiceError::InvalidOverlay(_) => (StatusCode::BAD_REQUEST, "InvalidOverlay"),
                };
                (status, kind, e.to_string())
            }
        };
        let body = ErrorBody {
            error: kind.to_string(),
            message,
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// One row of the scene list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneEntry {
    pub scene_id: String,
    pub country: String,
    pub fps: u32,
    pub pedestrian_count: usize,
    pub frame_range: (Frame, Frame),
    /// Label declared by the tracking file, if any.
    pub density_label: Option<DensityLevel>,
    /// Label computed from the pedestrian count.
    pub density: DensityLevel,
}

#[derive(Debug, Default, Deserialize)]
pub struct OverlayQuery {
    pub overlays: Option<String>,
    pub highlight: Option<String>,
}

impl OverlayQuery {
    fn config(&self) -> Result<OverlayConfig, ServiceError> {
        OverlayConfig::from_query(self.overlays.as_deref(), self.highlight.as_deref())
    }
}

#[derive(Debug, Deserialize)]
struct NewSession {
    scene_id: String,
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::BadRequest(format!("invalid JSON body: {e}")))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/scenes", get(list_scenes))
        .route("/scenes/{id}/summary", get(scene_summary))
        .route("/scenes/{id}/frames/{n}", get(frame))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/control", post(control_session))
        .route("/sessions/{id}/feed", get(feed))
        .with_state(state)
}

async fn list_scenes(State(st): State<AppState>) -> ApiResult<Json<Vec<SceneEntry>>> {
    let entries = st
        .store
        .list_scenes()?
        .into_iter()
        .map(|m| {
            let scene = st.store.scene(&m.scene_id)?;
            Ok(SceneEntry {
                frame_range: scene.frame_range(),
                density: scene.summary.density,
                scene_id: m.scene_id,
                country: m.country,
                fps: m.fps,
                pedestrian_count: m.pedestrian_count,
                density_label: m.density_label,
            })
        })
        .collect::<Result<Vec<_>, ServiceError>>()?;
    Ok(Json(entries))
}

async fn scene_summary(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let scene = st.store.scene(&id)?;
    Ok(Json(&scene.summary).into_response())
}

async fn frame(
    State(st): State<AppState>,
    Path((id, n)): Path<(String, String)>,
    Query(q): Query<OverlayQuery>,
) -> ApiResult<Response> {
    let frame: i64 = n
        .parse()
        .map_err(|_| ApiError::BadRequest(format!("frame {n:?} is not an integer")))?;
    let payload = st.store.get_frame_payload(&id, frame, &q.config()?)?;
    Ok(Json(payload).into_response())
}

async fn create_session(
    State(st): State<AppState>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<PlaybackSession>)> {
    let req: NewSession = parse_body(&body)?;
    let s = st.sessions.create(&st.store, &req.scene_id)?;
    Ok((StatusCode::CREATED, Json(s)))
}

async fn get_session(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<PlaybackSession>> {
    Ok(Json(st.sessions.tick(&id, Instant::now())?))
}

async fn delete_session(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    st.sessions
        .remove(&id)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or(ApiError::Service(ServiceError::UnknownSession(id)))
}

async fn control_session(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<PlaybackSession>> {
    let cmd: ControlCommand = parse_body(&body)?;
    Ok(Json(st.sessions.control(&id, cmd)?))
}

async fn feed(
    State(st): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<OverlayQuery>,
    ws: WebSocketUpgrade,
) -> ApiResult<Response> {
    st.sessions.get(&id)?;
    let overlay = q.config()?;
    Ok(ws.on_upgrade(move |socket| run_feed(socket, st, id, overlay)))
}

fn frame_period(s: &PlaybackSession) -> Duration {
    if s.state == PlaybackState::Playing {
        Duration::from_secs_f64(1.0 / (f64::from(s.fps) * s.rate.factor()))
    } else {
        IDLE_POLL
    }
}

async fn send_json(socket: &mut WebSocket, value: &impl Serialize) -> bool {
    let text = serde_json::to_string(value).expect("payload serializes");
    socket.send(Message::Text(text.into())).await.is_ok()
}

/// Emits the payload of the session's cursor whenever it moves, polling once
/// per frame period. A slow client sees skipped frames rather than a backlog.
async fn run_feed(mut socket: WebSocket, st: AppState, id: String, overlay: OverlayConfig) {
    let mut last_sent: Option<Frame> = None;
    while let Ok(s) = st.sessions.tick(&id, Instant::now()) {
        if last_sent != Some(s.cursor_frame) {
            let sent =
                match st
                    .store
                    .get_frame_payload(&s.scene_id, i64::from(s.cursor_frame), &overlay)
                {
                    Ok(p) => send_json(&mut socket, &p).await,
                    Err(e) => {
                        let _ = send_json(
                            &mut socket,
                            &ErrorBody {
                                error: "Service".into(),
                                message: e.to_string(),
                            },
                        )
                        .await;
                        false
                    }
                };
            if !sent {
                break;
            }
            last_sent = Some(s.cursor_frame);
        }
        tokio::select! {
            msg = socket.recv() => match msg {
                Some(Ok(Message::Text(text))) => {
                    let result = serde_json::from_str::<ControlCommand>(&text)
                        .map_err(|e| ErrorBody { error: "BadRequest".into(), message: e.to_string() })
                        .and_then(|cmd| {
                            st.sessions.control(&id, cmd).map_err(|e| ErrorBody {
                                error: "Service".into(),
                                message: e.to_string(),
                            })
                        });
                    if let Err(body) = result {
                        if !send_json(&mut socket, &body).await {
                            break;
                        }
                    }
                }
                Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
                Some(Ok(_)) => {}
            },
            _ = tokio::time::sleep(frame_period(&s)) => {}
        }
    }
}
