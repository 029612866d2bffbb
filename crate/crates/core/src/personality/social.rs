use serde::{Deserialize, Serialize};

use crate::features::ALONE_DISTANCE;

/// Socialization ϑ and its complement, isolation φ = 1 − ϑ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocialScores {
    socialization: f64,
}

impl SocialScores {
    /// `socialization` is clamped into `[0, 1]`.
    pub fn new(socialization: f64) -> Self {
        Self {
            socialization: socialization.clamp(0.0, 1.0),
        }
    }

    pub fn socialization(&self) -> f64 {
        self.socialization
    }

    pub fn isolation(&self) -> f64 {
        1.0 - self.socialization
    }
}

/// Weights of the logistic socialization model.
///
/// Stands in for a trained network with the same three inputs: collectivity,
/// mean distance to others and neighbors in the social space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SocialSurrogateParams {
    pub weight_collectivity: f64,
    pub weight_proximity: f64,
    pub weight_neighbors: f64,
    pub bias: f64,
    pub d_max: f64,
    pub n_cap: u32,
}

impl Default for SocialSurrogateParams {
    fn default() -> Self {
        Self {
            weight_collectivity: 2.0,
            weight_proximity: 2.0,
            weight_neighbors: 2.0,
            bias: -3.0,
            d_max: ALONE_DISTANCE,
            n_cap: 10,
        }
    }
}

impl SocialSurrogateParams {
    pub fn validate(&self) -> Result<(), String> {
        let weights = [
            self.weight_collectivity,
            self.weight_proximity,
            self.weight_neighbors,
            self.bias,
        ];
        if !weights.iter().all(|w| w.is_finite()) {
            return Err("surrogate weights must be finite".into());
        }
        if !(self.d_max.is_finite() && self.d_max > 0.0) {
            return Err("d_max must be positive".into());
        }
        if self.n_cap < 1 {
            return Err("n_cap must be at least 1".into());
        }
        Ok(())
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// ϑ = logistic(w_c·ϕ + w_d·(1 − min(d̄, d_max)/d_max) + w_n·min(n, n_cap)/n_cap + bias).
///
/// Inputs are clamped: ϕ to `[0, 1]`, distance to `[0, d_max]`.
pub fn socialization_level(
    collectivity: f64,
    mean_distance: f64,
    neighbors: f64,
    p: &SocialSurrogateParams,
) -> SocialScores {
    let phi = if collectivity.is_nan() {
        0.0
    } else {
        collectivity.clamp(0.0, 1.0)
    };
    let dist = if mean_distance.is_nan() {
        p.d_max
    } else {
        mean_distance.clamp(0.0, p.d_max)
    };
    let cap = f64::from(p.n_cap);
    let nbrs = if neighbors.is_nan() {
        0.0
    } else {
        neighbors.clamp(0.0, cap)
    };
    let z = p.weight_collectivity * phi
        + p.weight_proximity * (1.0 - dist / p.d_max)
        + p.weight_neighbors * nbrs / cap
        + p.bias;
    SocialScores::new(logistic(z))
}
