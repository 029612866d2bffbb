use std::collections::HashMap;
use std::time::{Duration, Instant};

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use super::{SceneStore, ServiceError};
use crate::trajectory::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum PlaybackRate {
    Half,
    One,
    Two,
    Four,
}

impl PlaybackRate {
    pub fn factor(self) -> f64 {
        match self {
            PlaybackRate::Half => 0.5,
            PlaybackRate::One => 1.0,
            PlaybackRate::Two => 2.0,
            PlaybackRate::Four => 4.0,
        }
    }
}

impl TryFrom<f64> for PlaybackRate {
    type Error = ServiceError;

    fn try_from(v: f64) -> Result<Self, ServiceError> {
        match v {
            0.5 => Ok(PlaybackRate::Half),
            1.0 => Ok(PlaybackRate::One),
            2.0 => Ok(PlaybackRate::Two),
            4.0 => Ok(PlaybackRate::Four),
            other => Err(ServiceError::InvalidRate(other)),
        }
    }
}

impl From<PlaybackRate> for f64 {
    fn from(r: PlaybackRate) -> f64 {
        r.factor()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaybackState {
    Playing,
    Paused,
    Stopped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaybackSession {
    pub session_id: String,
    pub scene_id: String,
    pub cursor_frame: Frame,
    pub rate: PlaybackRate,
    pub state: PlaybackState,
    pub fps: u32,
    pub frame_range: (Frame, Frame),
}

impl PlaybackSession {
    pub fn new(
        session_id: impl Into<String>,
        scene_id: impl Into<String>,
        fps: u32,
        frame_range: (Frame, Frame),
    ) -> Self {
        Self {
            session_id: session_id.into(),
            scene_id: scene_id.into(),
            cursor_frame: frame_range.0,
            rate: PlaybackRate::One,
            state: PlaybackState::Paused,
            fps,
            frame_range,
        }
    }

    fn clamp(&self, frame: i64) -> Frame {
        let (lo, hi) = self.frame_range;
        frame.clamp(i64::from(lo), i64::from(hi)) as Frame
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum ControlCommand {
    Play,
    Pause,
    /// Halts playback and returns the cursor to the first frame.
    Stop,
    Rate {
        value: f64,
    },
    Seek {
        frame: i64,
    },
    Rewind {
        frames: u32,
    },
}

/// Moves a playing session forward by `round(wall_dt · fps · rate)` frames.
/// Reaching the last frame stops playback.
pub fn advance_session(s: &PlaybackSession, wall_dt: f64) -> PlaybackSession {
    let mut next = s.clone();
    if s.state != PlaybackState::Playing || wall_dt.is_nan() || wall_dt <= 0.0 {
        return next;
    }
    let step = (wall_dt * f64::from(s.fps) * s.rate.factor()).round() as i64;
    next.cursor_frame = s.clamp(i64::from(s.cursor_frame) + step);
    if next.cursor_frame >= s.frame_range.1 {
        next.state = PlaybackState::Stopped;
    }
    next
}

pub fn apply_control(
    s: &PlaybackSession,
    cmd: ControlCommand,
) -> Result<PlaybackSession, ServiceError> {
    let mut next = s.clone();
    match cmd {
        ControlCommand::Play => {
            if s.state == PlaybackState::Stopped && s.cursor_frame >= s.frame_range.1 {
                next.cursor_frame = s.frame_range.0;
            }
            next.state = PlaybackState::Playing;
        }
        ControlCommand::Pause => {
            if s.state == PlaybackState::Playing {
                next.state = PlaybackState::Paused;
            }
        }
        ControlCommand::Stop => {
            next.state = PlaybackState::Stopped;
            next.cursor_frame = s.frame_range.0;
        }
        ControlCommand::Rate { value } => next.rate = PlaybackRate::try_from(value)?,
        ControlCommand::Seek { frame } => next.cursor_frame = s.clamp(frame),
        ControlCommand::Rewind { frames } => {
            next.cursor_frame = s.clamp(i64::from(s.cursor_frame) - i64::from(frames))
        }
    }
    Ok(next)
}

struct Entry {
    session: PlaybackSession,
    /// Wall-clock time already converted into frames.
    anchor: Instant,
}

impl Entry {
    /// Credits the time elapsed since `anchor` to a playing session. Only the
    /// time worth the frames actually advanced is consumed, so frequent
    /// polling does not round progress away.
    fn catch_up(&mut self, now: Instant) {
        let s = &self.session;
        if s.state != PlaybackState::Playing {
            self.anchor = now;
            return;
        }
        let Some(dt) = now.checked_duration_since(self.anchor) else {
            return;
        };
        let next = advance_session(s, dt.as_secs_f64());
        let moved = next.cursor_frame - s.cursor_frame;
        if next.state != PlaybackState::Playing {
            self.anchor = now;
        } else if moved > 0 {
            let per_frame = 1.0 / (f64::from(s.fps) * s.rate.factor());
            self.anchor += Duration::from_secs_f64(f64::from(moved) * per_frame);
        }
        self.session = next;
    }
}

/// Independent playback sessions keyed by an opaque id. Playing sessions
/// advance with the wall clock whenever they are read through [`Self::tick`].
#[derive(Default)]
pub struct SessionManager {
    sessions: Mutex<HashMap<String, Entry>>,
}

impl std::fmt::Debug for SessionManager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionManager")
            .field("sessions", &self.len())
            .finish()
    }
}

impl SessionManager {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create(
        &self,
        store: &SceneStore,
        scene_id: &str,
    ) -> Result<PlaybackSession, ServiceError> {
        let scene = store.scene(scene_id)?;
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = PlaybackSession::new(
            id.clone(),
            scene_id,
            scene.metadata.fps,
            scene.frame_range(),
        );
        self.sessions.lock().insert(
            id,
            Entry {
                session: session.clone(),
                anchor: Instant::now(),
            },
        );
        Ok(session)
    }

    /// The stored session, without advancing it.
    pub fn get(&self, id: &str) -> Result<PlaybackSession, ServiceError> {
        self.sessions
            .lock()
            .get(id)
            .map(|e| e.session.clone())
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    fn update(
        &self,
        id: &str,
        f: impl FnOnce(&mut Entry) -> Result<(), ServiceError>,
    ) -> Result<PlaybackSession, ServiceError> {
        let mut map = self.sessions.lock();
        let entry = map
            .get_mut(id)
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))?;
        f(entry)?;
        Ok(entry.session.clone())
    }

    /// Brings a playing session up to `now`.
    pub fn tick(&self, id: &str, now: Instant) -> Result<PlaybackSession, ServiceError> {
        self.update(id, |e| {
            e.catch_up(now);
            Ok(())
        })
    }

    pub fn control(&self, id: &str, cmd: ControlCommand) -> Result<PlaybackSession, ServiceError> {
        self.control_at(id, cmd, Instant::now())
    }

    /// Credits elapsed time first, then applies `cmd`; the clock restarts at `now`.
    pub fn control_at(
        &self,
        id: &str,
        cmd: ControlCommand,
        now: Instant,
    ) -> Result<PlaybackSession, ServiceError> {
        self.update(id, |e| {
            e.catch_up(now);
            e.session = apply_control(&e.session, cmd)?;
            e.anchor = now;
            Ok(())
        })
    }

    /// Advances by an explicit wall-clock interval, ignoring the session clock.
    pub fn advance(&self, id: &str, wall_dt: f64) -> Result<PlaybackSession, ServiceError> {
        self.update(id, |e| {
            e.session = advance_session(&e.session, wall_dt);
            Ok(())
        })
    }

    pub fn remove(&self, id: &str) -> Option<PlaybackSession> {
        self.sessions.lock().remove(id).map(|e| e.session)
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
