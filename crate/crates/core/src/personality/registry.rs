//! Item equations and their aggregation into OCEAN factor scores.
//!
//! Each item maps a [`FeatureVector`] to a raw score. Per scene, every item's
//! raw column is min-max normalized across pedestrians (a constant column
//! becomes 0.5), and each factor is the mean of its normalized items.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{Expr, ExprError};
use super::{Factor, OceanScores};
use crate::features::FeatureVector;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("no item equation for factor {0}")]
    EmptyRegistryFactor(Factor),
    #[error("item {item_id}: {source}")]
    BadExpression {
        item_id: u32,
        #[source]
        source: ExprError,
    },
    #[error("duplicate item id {0}")]
    DuplicateItem(u32),
    #[error("registry file: {0}")]
    Json(String),
    #[error("no pedestrians to score")]
    NoPedestrians,
}

/// Registry file entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemSpec {
    pub item_id: u32,
    pub factor: Factor,
    #[serde(default)]
    pub description: String,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemEquation {
    pub item_id: u32,
    pub factor: Factor,
    pub description: String,
    expression: Expr,
    source: String,
}

impl ItemEquation {
    pub fn new(
        item_id: u32,
        factor: Factor,
        description: impl Into<String>,
        expression: &str,
    ) -> Result<Self, RegistryError> {
        let parsed = Expr::parse(expression)
            .map_err(|source| RegistryError::BadExpression { item_id, source })?;
        Ok(Self {
            item_id,
            factor,
            description: description.into(),
            expression: parsed,
            source: expression.to_string(),
        })
    }

    pub fn from_spec(spec: &ItemSpec) -> Result<Self, RegistryError> {
        Self::new(
            spec.item_id,
            spec.factor,
            spec.description.clone(),
            &spec.expression,
        )
    }

    pub fn to_spec(&self) -> ItemSpec {
        ItemSpec {
            item_id: self.item_id,
            factor: self.factor,
            description: self.description.clone(),
            expression: self.source.clone(),
        }
    }

    pub fn expression(&self) -> &Expr {
        &self.expression
    }

    /// Parses a JSON registry and checks that every factor has at least one item.
    pub fn load_registry(json: &str) -> Result<Vec<ItemEquation>, RegistryError> {
        let specs: Vec<ItemSpec> =
            serde_json::from_str(json).map_err(|e| RegistryError::Json(e.to_string()))?;
        let items = specs
            .iter()
            .map(ItemEquation::from_spec)
            .collect::<Result<Vec<_>, _>>()?;
        let mut ids: Vec<u32> = items.iter().map(|i| i.item_id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(RegistryError::DuplicateItem(w[0]));
        }
        check_coverage(&items)?;
        Ok(items)
    }
}

fn check_coverage(registry: &[ItemEquation]) -> Result<(), RegistryError> {
    for f in Factor::ALL {
        if !registry.iter().any(|i| i.factor == f) {
            return Err(RegistryError::EmptyRegistryFactor(f));
        }
    }
    Ok(())
}

/// One surrogate item per factor, following the geometric reading of each trait:
/// openness ~ direction changes, conscientiousness ~ fast and straight walking,
/// extraversion ~ socialization, agreeableness ~ collectivity, neuroticism ~
/// isolated and not collective.
pub fn default_registry() -> Vec<ItemEquation> {
    let items = [
        (101, Factor::O, "changes direction while walking", "alpha"),
        (
            1,
            Factor::C,
            "walks fast and straight toward a goal",
            "s + recip(alpha)",
        ),
        (
            301,
            Factor::E,
            "seeks the company of others",
            "socialization",
        ),
        (
            401,
            Factor::A,
            "moves along with the others",
            "collectivity",
        ),
        (
            501,
            Factor::N,
            "keeps apart and moves unlike the others",
            "(isolation + (1 - collectivity)) / 2",
        ),
    ];
    items
        .into_iter()
        .map(|(id, f, d, e)| ItemEquation::new(id, f, d, e).expect("built-in expression parses"))
        .collect()
}

pub fn evaluate_item(eq: &ItemEquation, v: &FeatureVector) -> f64 {
    eq.expression.eval(v)
}

/// Min-max normalization into `[0, 1]`; a constant column maps to 0.5.
pub fn min_max_normalize(column: &[f64]) -> Vec<f64> {
    let (lo, hi) = column
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let scale = 1f64.max(lo.abs()).max(hi.abs());
    if range.is_nan() || range <= 1e-12 * scale {
        return vec![0.5; column.len()];
    }
    column
        .iter()
        .map(|v| ((v - lo) / range).clamp(0.0, 1.0))
        .collect()
}

pub fn ocean_from_items(
    vectors: &[FeatureVector],
    registry: &[ItemEquation],
) -> Result<Vec<OceanScores>, RegistryError> {
    check_coverage(registry)?;
    if vectors.is_empty() {
        return Err(RegistryError::NoPedestrians);
    }
    let mut sums = vec![[0.0f64; 5]; vectors.len()];
    let mut counts = [0usize; 5];
    for item in registry {
        let raw: Vec<f64> = vectors.iter().map(|v| evaluate_item(item, v)).collect();
        let f = item.factor.index();
        counts[f] += 1;
        for (acc, n) in sums.iter_mut().zip(min_max_normalize(&raw)) {
            acc[f] += n;
        }
    }
    Ok(sums
        .into_iter()
        .map(|acc| {
            let mut o = OceanScores::NEUTRAL;
            for f in Factor::ALL {
                o.set(f, acc[f.index()] / counts[f.index()] as f64);
            }
            o
        })
        .collect())
}
