use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Emotion, EmotionScores, Factor, OceanScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Trait {
    O,
    C,
    E,
    A,
    N,
    Fear,
    Happiness,
    Sadness,
    Anger,
    Socialization,
}

impl Trait {
    pub fn from_name(name: &str) -> Option<Trait> {
        Some(match name.to_ascii_lowercase().as_str() {
            "o" | "openness" => Trait::O,
            "c" | "conscientiousness" => Trait::C,
            "e" | "extraversion" | "extroversion" => Trait::E,
            "a" | "agreeableness" => Trait::A,
            "n" | "neuroticism" => Trait::N,
            "fear" => Trait::Fear,
            "happiness" => Trait::Happiness,
            "sadness" => Trait::Sadness,
            "anger" => Trait::Anger,
            "socialization" | "sociable" => Trait::Socialization,
            _ => return None,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("trait {0:?} is not available for this pedestrian")]
pub struct TraitUnavailable(pub Trait);

/// The scores a pedestrian can be compared on.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TraitScores {
    pub ocean: Option<OceanScores>,
    pub emotions: Option<EmotionScores>,
    pub socialization: Option<f64>,
}

impl TraitScores {
    pub fn get(&self, t: Trait) -> Option<f64> {
        let factor = |f: Factor| self.ocean.map(|o| o.get(f));
        let emotion = |e: Emotion| self.emotions.map(|s| s.get(e));
        match t {
            Trait::O => factor(Factor::O),
            Trait::C => factor(Factor::C),
            Trait::E => factor(Factor::E),
            Trait::A => factor(Factor::A),
            Trait::N => factor(Factor::N),
            Trait::Fear => emotion(Emotion::Fear),
            Trait::Happiness => emotion(Emotion::Happiness),
            Trait::Sadness => emotion(Emotion::Sadness),
            Trait::Anger => emotion(Emotion::Anger),
            Trait::Socialization => self.socialization,
        }
        .filter(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparison {
    A,
    B,
    Both,
    Neither,
    Tie,
}

impl Comparison {
    pub fn swapped(self) -> Comparison {
        match self {
            Comparison::A => Comparison::B,
            Comparison::B => Comparison::A,
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBands {
    /// Differences below this are a tie.
    pub tie: f64,
    /// Both scores at or above this → `Both`.
    pub both_at_least: f64,
    /// Both scores at or below this → `Neither`.
    pub neither_at_most: f64,
}

impl Default for ComparisonBands {
    fn default() -> Self {
        Self {
            tie: 0.05,
            both_at_least: 0.75,
            neither_at_most: 0.25,
        }
    }
}

impl ComparisonBands {
    pub fn judge(&self, a: f64, b: f64) -> Comparison {
        if a >= self.both_at_least && b >= self.both_at_least {
            Comparison::Both
        } else if a <= self.neither_at_most && b <= self.neither_at_most {
            Comparison::Neither
        } else if (a - b).abs() < self.tie {
            Comparison::Tie
        } else if a > b {
            Comparison::A
        } else {
            Comparison::B
        }
    }
}

pub fn compare_pedestrians(
    a: &TraitScores,
    b: &TraitScores,
    t: Trait,
    bands: &ComparisonBands,
) -> Result<Comparison, TraitUnavailable> {
    let va = a.get(t).ok_or(TraitUnavailable(t))?;
    let vb = b.get(t).ok_or(TraitUnavailable(t))?;
    Ok(bands.judge(va, vb))
}
