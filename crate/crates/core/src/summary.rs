//! Serializable per-scene report.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{ParameterLedger, PedestrianAnalysis, SceneAnalysis};
use crate::classify::{AnimationState, DensityLevel, PedestrianScores};
use crate::features::{FeatureVector, FrameFeatures};
use crate::personality::{Emotion, EmotionScores, OceanScores, TraitScores};
use crate::trajectory::{Frame, PedestrianId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SummaryError {
    #[error("scene {scene_id}: no analysis for pedestrians {missing:?}")]
    IncompleteAnalyses {
        scene_id: String,
        missing: Vec<PedestrianId>,
    },
    #[error("summary JSON: {0}")]
    Json(String),
}

/// Consecutive frames sharing one animation state, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnimationSpan {
    pub start: Frame,
    pub end: Frame,
    pub state: AnimationState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PedestrianSummary {
    pub pedestrian_id: PedestrianId,
    pub vector: FeatureVector,
    pub ocean: OceanScores,
    pub emotions: EmotionScores,
    pub dominant_emotion: Emotion,
    pub animation_timeline: Vec<AnimationSpan>,
    pub frames: Vec<FrameFeatures>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSummary {
    pub scene_id: String,
    pub country: String,
    pub fps: u32,
    pub frame_range: (Frame, Frame),
    pub pedestrian_count: usize,
    pub density: DensityLevel,
    /// Ground-truth label from the input file, if any.
    pub density_label: Option<DensityLevel>,
    pub parameters: ParameterLedger,
    pub ledger_fingerprint: String,
    pub pedestrians: Vec<PedestrianSummary>,
}

fn timeline(frames: &[FrameFeatures], states: &[AnimationState]) -> Vec<AnimationSpan> {
    let mut spans: Vec<AnimationSpan> = Vec::new();
    for (f, &state) in frames.iter().zip(states) {
        match spans.last_mut() {
            Some(last) if last.state == state && last.end + 1 == f.frame => last.end = f.frame,
            _ => spans.push(AnimationSpan {
                start: f.frame,
                end: f.frame,
                state,
            }),
        }
    }
    spans
}

fn pedestrian_summary(p: &PedestrianAnalysis) -> PedestrianSummary {
    PedestrianSummary {
        pedestrian_id: p.pedestrian_id,
        vector: p.vector,
        ocean: p.ocean,
        emotions: p.emotions,
        dominant_emotion: p.emotions.dominant(),
        animation_timeline: timeline(&p.frames, &p.animation),
        frames: p.frames.clone(),
    }
}

/// Builds the report; every pedestrian of the scene must have an analysis.
pub fn summarize_scene(analysis: &SceneAnalysis) -> Result<SceneSummary, SummaryError> {
    let scene = &analysis.scene;
    let missing: Vec<PedestrianId> = scene
        .pedestrian_ids()
        .filter(|id| analysis.pedestrian(*id).is_none())
        .collect();
    if !missing.is_empty() || analysis.pedestrians.is_empty() {
        return Err(SummaryError::IncompleteAnalyses {
            scene_id: scene.metadata.scene_id.clone(),
            missing,
        });
    }
    Ok(SceneSummary {
        scene_id: scene.metadata.scene_id.clone(),
        country: scene.metadata.country.clone(),
        fps: scene.metadata.fps,
        frame_range: scene.frame_range,
        pedestrian_count: scene.metadata.pedestrian_count,
        density: analysis.density,
        density_label: scene.metadata.density_label,
        ledger_fingerprint: analysis.ledger.fingerprint(),
        parameters: analysis.ledger.clone(),
        pedestrians: analysis
            .pedestrians
            .iter()
            .map(pedestrian_summary)
            .collect(),
    })
}

impl SceneSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SummaryError> {
        serde_json::from_str(text).map_err(|e| SummaryError::Json(e.to_string()))
    }

    pub fn pedestrian(&self, id: PedestrianId) -> Option<&PedestrianSummary> {
        self.pedestrians.iter().find(|p| p.pedestrian_id == id)
    }
}

impl PedestrianScores for SceneSummary {
    fn trait_scores(&self, id: PedestrianId) -> Option<TraitScores> {
        self.pedestrian(id).map(|p| TraitScores {
            ocean: Some(p.ocean),
            emotions: Some(p.emotions),
            socialization: Some(p.vector.socialization),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze_scene, AnalysisConfig};
    use crate::trajectory::{SceneMetadata, TrackedScene, Trajectory, TrajectorySample};

    fn scene() -> TrackedScene {
        let walk = Trajectory::new(
            1,
            (0..6)
                .map(|f| TrajectorySample::new(f, 0.05 * f as f64, 0.0))
                .collect(),
        );
        // idle for three frames, then runs
        let mut pts = vec![TrajectorySample::new(0, 5.0, 5.0); 1];
        pts.extend((1..3).map(|f| TrajectorySample::new(f, 5.0, 5.0)));
        pts.extend((3..6).map(|f| TrajectorySample::new(f, 5.0 + 0.1 * (f - 2) as f64, 5.0)));
        TrackedScene::new(
            SceneMetadata::new("sum"),
            vec![walk, Trajectory::new(2, pts)],
        )
        .unwrap()
    }

    #[test]
    fn timeline_run_length() {
        let a = analyze_scene(&scene(), &AnalysisConfig::default()).unwrap();
        let s = summarize_scene(&a).unwrap();
        let p2 = s.pedestrian(2).unwrap();
        assert_eq!(
            p2.animation_timeline,
            vec![
                AnimationSpan {
                    start: 0,
                    end: 2,
                    state: AnimationState::Idle
                },
                AnimationSpan {
                    start: 3,
                    end: 5,
                    state: AnimationState::Run
                },
            ]
        );
        assert_eq!(s.pedestrian(1).unwrap().animation_timeline.len(), 1);
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let cfg = AnalysisConfig::default();
        let a = summarize_scene(&analyze_scene(&scene(), &cfg).unwrap())
            .unwrap()
            .to_json();
        let b = summarize_scene(&analyze_scene(&scene(), &cfg).unwrap())
            .unwrap()
            .to_json();
        assert_eq!(a, b);
        let back = SceneSummary::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a);
    }

    #[test]
    fn missing_analyses_rejected() {
        let mut a = analyze_scene(&scene(), &AnalysisConfig::default()).unwrap();
        a.pedestrians.retain(|p| p.pedestrian_id != 2);
        assert_eq!(
            summarize_scene(&a),
            Err(SummaryError::IncompleteAnalyses {
                scene_id: "sum".into(),
                missing: vec![2]
            })
        );
        a.pedestrians.clear();
        assert!(summarize_scene(&a).is_err());
    }
}
