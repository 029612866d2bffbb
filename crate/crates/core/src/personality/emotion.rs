//! Sign table from OCEAN factors to the four OCC emotions, and the scalar
//! combination rule built on it.
//!
//! For each emotion: `raw = Σ_f sign(f, polarity(v_f)) · 2|v_f − 0.5|` and
//! `score = clamp(0.5 + raw / 10, 0, 1)`. A factor is positive when its value
//! is at least 0.5.

use serde::{Deserialize, Serialize};

use super::{Emotion, EmotionScores, Factor, OceanScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn of(value: f64) -> Polarity {
        if value >= 0.5 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

/// Rows: O+, O−, C+, C−, E+, E−, A+, A−, N+, N−. Columns: Fear, Happiness, Sadness, Anger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionMappingTable {
    rows: [[i8; 4]; 10],
}

impl Default for EmotionMappingTable {
    fn default() -> Self {
        Self {
            rows: [
                [0, 0, 0, -1],   // O+
                [0, 0, 0, 1],    // O-
                [-1, 0, 0, 0],   // C+
                [1, 0, 0, 0],    // C-
                [-1, 1, -1, -1], // E+
                [1, 0, 0, 0],    // E-
                [0, 0, 0, -1],   // A+
                [0, 0, 0, 1],    // A-
                [1, -1, 1, 1],   // N+
                [-1, 1, -1, -1], // N-
            ],
        }
    }
}

impl EmotionMappingTable {
    pub fn entry(&self, factor: Factor, polarity: Polarity, emotion: Emotion) -> i8 {
        let row = 2 * factor.index()
            + match polarity {
                Polarity::Positive => 0,
                Polarity::Negative => 1,
            };
        self.rows[row][emotion.index()]
    }

    pub fn row(&self, factor: Factor, polarity: Polarity) -> [i8; 4] {
        Emotion::ALL.map(|e| self.entry(factor, polarity, e))
    }
}

pub fn emotion_contribution(
    table: &EmotionMappingTable,
    factor: Factor,
    polarity: Polarity,
    emotion: Emotion,
) -> i8 {
    table.entry(factor, polarity, emotion)
}

pub fn emotions_from_ocean(o: &OceanScores, table: &EmotionMappingTable) -> EmotionScores {
    let score = |e: Emotion| {
        let raw: f64 = Factor::ALL
            .iter()
            .map(|&f| {
                let v = o.get(f);
                f64::from(table.entry(f, Polarity::of(v), e)) * 2.0 * (v - 0.5).abs()
            })
            .sum();
        (0.5 + raw / 10.0).clamp(0.0, 1.0)
    };
    EmotionScores {
        fear: score(Emotion::Fear),
        happiness: score(Emotion::Happiness),
        sadness: score(Emotion::Sadness),
        anger: score(Emotion::Anger),
    }
}
