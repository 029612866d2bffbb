//! Discrete labels: avatar animation state, crowd density level, and answers
//! to highlighted-pedestrian questions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::PTS_M_PER_FRAME;
use crate::personality::{compare_pedestrians, Comparison, ComparisonBands, Trait, TraitScores};
use crate::trajectory::PedestrianId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("speed must be non-negative, got {0}")]
    NegativeSpeed(f64),
    #[error("pedestrian {0} missing from the analyzed scene")]
    PedestrianMissing(PedestrianId),
    #[error("annotation highlights pedestrian {0} twice")]
    SamePedestrian(PedestrianId),
    #[error("unknown question key {0:?}")]
    UnknownQuestion(String),
    #[error("trait {0:?} unavailable")]
    TraitUnavailable(Trait),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnimationState {
    Idle,
    Walk,
    Run,
}

/// Idle at exactly zero, Run from the preferred transition speed up, Walk between.
pub fn classify_animation(speed: f64) -> Result<AnimationState, ClassifyError> {
    if speed.is_nan() || speed < 0.0 {
        return Err(ClassifyError::NegativeSpeed(speed));
    }
    Ok(if speed == 0.0 {
        AnimationState::Idle
    } else if speed < PTS_M_PER_FRAME {
        AnimationState::Walk
    } else {
        AnimationState::Run
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DensityLevel {
    Low,
    Medium,
    High,
}

/// Upper bounds (inclusive) of the Low and Medium bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DensityCutpoints {
    /// Pedestrian counts.
    Count { low_max: usize, medium_max: usize },
    /// Pedestrians per square meter of the scene's position extent.
    PerArea { low_max: f64, medium_max: f64 },
}

impl Default for DensityCutpoints {
    fn default() -> Self {
        DensityCutpoints::Count {
            low_max: 20,
            medium_max: 30,
        }
    }
}

pub fn classify_density(pedestrian_count: usize) -> DensityLevel {
    match pedestrian_count {
        0..=20 => DensityLevel::Low,
        21..=30 => DensityLevel::Medium,
        _ => DensityLevel::High,
    }
}

impl DensityCutpoints {
    /// `area_m2` is only consulted in per-area mode; a non-positive area counts as High.
    pub fn classify(&self, pedestrian_count: usize, area_m2: f64) -> DensityLevel {
        match *self {
            DensityCutpoints::Count {
                low_max,
                medium_max,
            } => {
                if pedestrian_count <= low_max {
                    DensityLevel::Low
                } else if pedestrian_count <= medium_max {
                    DensityLevel::Medium
                } else {
                    DensityLevel::High
                }
            }
            DensityCutpoints::PerArea {
                low_max,
                medium_max,
            } => {
                if pedestrian_count == 0 {
                    return DensityLevel::Low;
                }
                if area_m2.is_nan() || area_m2 <= 0.0 {
                    return DensityLevel::High;
                }
                let rho = pedestrian_count as f64 / area_m2;
                if rho <= low_max {
                    DensityLevel::Low
                } else if rho <= medium_max {
                    DensityLevel::Medium
                } else {
                    DensityLevel::High
                }
            }
        }
    }
}

/// Fixed mapping from the survey question keys to the trait each one asks about.
pub const QUESTION_TRAITS: [(&str, Trait); 7] = [
    ("Q1", Trait::N),
    ("Q2", Trait::Anger),
    ("Q3", Trait::O),
    ("Q4", Trait::Fear),
    ("Q5", Trait::Happiness),
    ("Q6", Trait::E),
    ("Q7", Trait::Socialization),
];

/// Resolves `Q1`..`Q7` or a trait name.
pub fn question_trait(key: &str) -> Result<Trait, ClassifyError> {
    QUESTION_TRAITS
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(key))
        .map(|&(_, t)| t)
        .or_else(|| Trait::from_name(key))
        .ok_or_else(|| ClassifyError::UnknownQuestion(key.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighlightAnnotation {
    pub scene_id: String,
    pub yellow_id: PedestrianId,
    pub red_id: PedestrianId,
    pub question_key: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    Yellow,
    Red,
    Both,
    Neither,
    Tie,
}

impl Answer {
    pub fn swapped(self) -> Answer {
        match self {
            Answer::Yellow => Answer::Red,
            Answer::Red => Answer::Yellow,
            other => other,
        }
    }
}

/// Anything that can hand out per-pedestrian trait scores.
pub trait PedestrianScores {
    fn trait_scores(&self, id: PedestrianId) -> Option<TraitScores>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionAnswer {
    pub scene_id: String,
    pub question_key: String,
    pub trait_key: Trait,
    pub answer: Answer,
    pub yellow_id: PedestrianId,
    pub red_id: PedestrianId,
    pub yellow_score: f64,
    pub red_score: f64,
}

pub fn answer_question(
    annotation: &HighlightAnnotation,
    analyses: &impl PedestrianScores,
    bands: &ComparisonBands,
) -> Result<QuestionAnswer, ClassifyError> {
    if annotation.yellow_id == annotation.red_id {
        return Err(ClassifyError::SamePedestrian(annotation.yellow_id));
    }
    let t = question_trait(&annotation.question_key)?;
    let fetch = |id| {
        analyses
            .trait_scores(id)
            .ok_or(ClassifyError::PedestrianMissing(id))
    };
    let yellow = fetch(annotation.yellow_id)?;
    let red = fetch(annotation.red_id)?;
    let cmp = compare_pedestrians(&yellow, &red, t, bands)
        .map_err(|e| ClassifyError::TraitUnavailable(e.0))?;
    let answer = match cmp {
        Comparison::A => Answer::Yellow,
        Comparison::B => Answer::Red,
        Comparison::Both => Answer::Both,
        Comparison::Neither => Answer::Neither,
        Comparison::Tie => Answer::Tie,
    };
    Ok(QuestionAnswer {
        scene_id: annotation.scene_id.clone(),
        question_key: annotation.question_key.clone(),
        trait_key: t,
        answer,
        yellow_id: annotation.yellow_id,
        red_id: annotation.red_id,
        yellow_score: yellow.get(t).unwrap_or(f64::NAN),
        red_score: red.get(t).unwrap_or(f64::NAN),
    })
}
