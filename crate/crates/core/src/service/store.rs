use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use super::{EmotionOverlay, FramePayload, OverlayConfig, PedestrianRecord, ServiceError};
use crate::classify::{classify_animation, AnimationState};
use crate::summary::SceneSummary;
use crate::trajectory::{CoordinateSpace, Frame, SceneMetadata};

/// A scene summary plus a frame → (pedestrian, frame-feature) index.
#[derive(Debug)]
pub struct IndexedScene {
    pub metadata: SceneMetadata,
    pub summary: SceneSummary,
    frames: Vec<Vec<(usize, usize)>>,
}

impl IndexedScene {
    pub fn from_summary(summary: SceneSummary) -> Self {
        let (lo, hi) = summary.frame_range;
        let mut frames = vec![Vec::new(); (hi - lo) as usize + 1];
        for (pi, p) in summary.pedestrians.iter().enumerate() {
            for (fi, f) in p.frames.iter().enumerate() {
                frames[(f.frame - lo) as usize].push((pi, fi));
            }
        }
        for slot in &mut frames {
            slot.sort_by_key(|&(pi, _)| summary.pedestrians[pi].pedestrian_id);
        }
        let metadata = SceneMetadata {
            scene_id: summary.scene_id.clone(),
            country: summary.country.clone(),
            fps: summary.fps,
            density_label: summary.density_label,
            pedestrian_count: summary.pedestrian_count,
            coords: CoordinateSpace::World,
            homography: None,
        };
        Self {
            metadata,
            summary,
            frames,
        }
    }

    pub fn frame_range(&self) -> (Frame, Frame) {
        self.summary.frame_range
    }

    pub fn payload(
        &self,
        frame: i64,
        overlay: &OverlayConfig,
    ) -> Result<FramePayload, ServiceError> {
        let (lo, hi) = self.frame_range();
        if frame < i64::from(lo) || frame > i64::from(hi) {
            return Err(ServiceError::FrameOutOfRange { frame, lo, hi });
        }
        let slot = &self.frames[(frame - i64::from(lo)) as usize];
        let pedestrians = slot
            .iter()
            .map(|&(pi, fi)| {
                let p = &self.summary.pedestrians[pi];
                let f = &p.frames[fi];
                PedestrianRecord {
                    pedestrian_id: p.pedestrian_id,
                    position: f.position,
                    animation: classify_animation(f.speed).unwrap_or(AnimationState::Idle),
                    emotion: overlay.show_emotion.then_some(EmotionOverlay {
                        scores: p.emotions,
                        dominant: p.dominant_emotion,
                    }),
                    socialization: overlay.show_socialization.then_some(p.vector.socialization),
                    collectivity: overlay.show_collectivity.then_some(f.collectivity),
                    highlight: overlay.highlight.get(&p.pedestrian_id).copied(),
                }
            })
            .collect();
        Ok(FramePayload {
            scene_id: self.summary.scene_id.clone(),
            frame: frame as Frame,
            pedestrians,
        })
    }
}

/// Read-only scene store, installed once after ingest.
#[derive(Debug, Default)]
pub struct SceneStore {
    scenes: OnceLock<BTreeMap<String, Arc<IndexedScene>>>,
}

impl SceneStore {
    /// A store that answers `StoreUnavailable` until [`SceneStore::install`] runs.
    pub fn pending() -> Self {
        Self::default()
    }

    pub fn from_summaries(summaries: impl IntoIterator<Item = SceneSummary>) -> Self {
        let store = Self::pending();
        store.install(summaries);
        store
    }

    /// Installs the scenes; later calls are ignored.
    pub fn install(&self, summaries: impl IntoIterator<Item = SceneSummary>) {
        let map = summaries
            .into_iter()
            .map(|s| (s.scene_id.clone(), Arc::new(IndexedScene::from_summary(s))))
            .collect();
        let _ = self.scenes.set(map);
    }

    fn scenes(&self) -> Result<&BTreeMap<String, Arc<IndexedScene>>, ServiceError> {
        self.scenes.get().ok_or(ServiceError::StoreUnavailable)
    }

    /// Scene metadata ordered by scene id.
    pub fn list_scenes(&self) -> Result<Vec<SceneMetadata>, ServiceError> {
        Ok(self
            .scenes()?
            .values()
            .map(|s| s.metadata.clone())
            .collect())
    }

    pub fn scene(&self, scene_id: &str) -> Result<Arc<IndexedScene>, ServiceError> {
        self.scenes()?
            .get(scene_id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownScene(scene_id.to_string()))
    }

    pub fn get_frame_payload(
        &self,
        scene_id: &str,
        frame: i64,
        overlay: &OverlayConfig,
    ) -> Result<FramePayload, ServiceError> {
        self.scene(scene_id)?.payload(frame, overlay)
    }
}
