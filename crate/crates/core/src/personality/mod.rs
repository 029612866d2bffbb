//! Personality (OCEAN) and emotion (OCC) scores derived from feature vectors.

mod compare;
mod emotion;
mod expr;
mod registry;
mod social;

pub use compare::{
    compare_pedestrians, Comparison, ComparisonBands, Trait, TraitScores, TraitUnavailable,
};
pub use emotion::{emotion_contribution, emotions_from_ocean, EmotionMappingTable, Polarity};
pub use expr::{Expr, ExprError, Variable, RECIPROCAL_EPS};
pub use registry::{
    default_registry, evaluate_item, min_max_normalize, ocean_from_items, ItemEquation, ItemSpec,
    RegistryError,
};
pub use social::{socialization_level, SocialScores, SocialSurrogateParams};

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Factor {
    O,
    C,
    E,
    A,
    N,
}

impl Factor {
    pub const ALL: [Factor; 5] = [Factor::O, Factor::C, Factor::E, Factor::A, Factor::N];

    pub fn name(self) -> &'static str {
        match self {
            Factor::O => "Openness",
            Factor::C => "Conscientiousness",
            Factor::E => "Extraversion",
            Factor::A => "Agreeableness",
            Factor::N => "Neuroticism",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct OceanScores {
    pub O: f64,
    pub C: f64,
    pub E: f64,
    pub A: f64,
    pub N: f64,
}

impl OceanScores {
    pub const NEUTRAL: OceanScores = OceanScores {
        O: 0.5,
        C: 0.5,
        E: 0.5,
        A: 0.5,
        N: 0.5,
    };

    pub fn get(&self, f: Factor) -> f64 {
        match f {
            Factor::O => self.O,
            Factor::C => self.C,
            Factor::E => self.E,
            Factor::A => self.A,
            Factor::N => self.N,
        }
    }

    pub fn set(&mut self, f: Factor, v: f64) {
        match f {
            Factor::O => self.O = v,
            Factor::C => self.C = v,
            Factor::E => self.E = v,
            Factor::A => self.A = v,
            Factor::N => self.N = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Emotion {
    Fear,
    Happiness,
    Sadness,
    Anger,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [
        Emotion::Fear,
        Emotion::Happiness,
        Emotion::Sadness,
        Emotion::Anger,
    ];

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionScores {
    pub fear: f64,
    pub happiness: f64,
    pub sadness: f64,
    pub anger: f64,
}

impl EmotionScores {
    pub fn get(&self, e: Emotion) -> f64 {
        match e {
            Emotion::Fear => self.fear,
            Emotion::Happiness => self.happiness,
            Emotion::Sadness => self.sadness,
            Emotion::Anger => self.anger,
        }
    }

    /// Strongest emotion; ties resolve in `Emotion::ALL` order.
    pub fn dominant(&self) -> Emotion {
        let mut best = Emotion::Fear;
        for e in Emotion::ALL {
            if self.get(e) > self.get(best) {
                best = e;
            }
        }
        best
    }
}
