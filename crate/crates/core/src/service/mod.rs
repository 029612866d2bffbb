//! Playback service domain: the ingested scene store, frame payloads with
//! feature overlays, and playback sessions. Transport lives in the CLI crate.

mod payload;
mod session;
mod store;

pub use payload::{EmotionOverlay, FramePayload, HighlightColor, OverlayConfig, PedestrianRecord};
pub use session::{
    advance_session, apply_control, ControlCommand, PlaybackRate, PlaybackSession, PlaybackState,
    SessionManager,
};
pub use store::{IndexedScene, SceneStore};

use thiserror::Error;

use crate::trajectory::Frame;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ServiceError {
    #[error("scene store is not initialized")]
    StoreUnavailable,
    #[error("unknown scene {0:?}")]
    UnknownScene(String),
    #[error("frame {frame} outside scene range [{lo}, {hi}]")]
    FrameOutOfRange { frame: i64, lo: Frame, hi: Frame },
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("playback rate {0} not in {{0.5, 1, 2, 4}}")]
    InvalidRate(f64),
    #[error("invalid overlay spec: {0}")]
    InvalidOverlay(String),
}
