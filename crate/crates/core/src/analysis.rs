//! End-to-end scene analysis: gap filling, per-frame features, social scores,
//! feature vectors, OCEAN, emotions and animation states.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classify::{
    classify_animation, AnimationState, DensityCutpoints, DensityLevel, PedestrianScores,
};
use crate::features::{
    aggregate_feature_vector, extract_frame_features, CollectivityParams, FeatureError,
    FeatureVector, FrameFeatures, ALONE_DISTANCE, PTS_M_PER_FRAME, SOCIAL_SPACE_RADIUS,
};
use crate::personality::{
    default_registry, emotions_from_ocean, ocean_from_items, socialization_level, ComparisonBands,
    EmotionMappingTable, EmotionScores, ItemEquation, ItemSpec, OceanScores, RegistryError,
    SocialScores, SocialSurrogateParams, TraitScores, RECIPROCAL_EPS,
};
use crate::trajectory::{PedestrianId, TrackedScene, TrajectoryError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub collectivity: CollectivityParams,
    pub social: SocialSurrogateParams,
    pub registry: Vec<ItemEquation>,
    pub emotion_table: EmotionMappingTable,
    pub bands: ComparisonBands,
    pub density: DensityCutpoints,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            collectivity: CollectivityParams::default(),
            social: SocialSurrogateParams::default(),
            registry: default_registry(),
            emotion_table: EmotionMappingTable::default(),
            bands: ComparisonBands::default(),
            density: DensityCutpoints::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), AnalysisError> {
        self.collectivity.validate()?;
        self.social
            .validate()
            .map_err(AnalysisError::InvalidConfig)?;
        let b = &self.bands;
        if !(b.tie >= 0.0 && b.neither_at_most < b.both_at_least) {
            return Err(AnalysisError::InvalidConfig(
                "comparison bands out of order".into(),
            ));
        }
        Ok(())
    }

    pub fn ledger(&self) -> ParameterLedger {
        ParameterLedger {
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            collectivity: self.collectivity,
            social: self.social,
            registry: self.registry.iter().map(ItemEquation::to_spec).collect(),
            emotion_table: self.emotion_table.clone(),
            comparison: self.bands,
            density: self.density,
            social_space_radius_m: SOCIAL_SPACE_RADIUS,
            alone_distance_m: ALONE_DISTANCE,
            pts_m_per_frame: PTS_M_PER_FRAME,
            reciprocal_eps: RECIPROCAL_EPS,
        }
    }
}

/// Every constant and parameter that influenced an analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterLedger {
    pub engine_version: String,
    pub collectivity: CollectivityParams,
    pub social: SocialSurrogateParams,
    pub registry: Vec<ItemSpec>,
    pub emotion_table: EmotionMappingTable,
    pub comparison: ComparisonBands,
    pub density: DensityCutpoints,
    pub social_space_radius_m: f64,
    pub alone_distance_m: f64,
    pub pts_m_per_frame: f64,
    pub reciprocal_eps: f64,
}

impl ParameterLedger {
    /// Hex SHA-256 of the ledger's compact JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("ledger serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Flat `key=value` pairs, in a fixed order, for file headers.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("engine_version".to_string(), self.engine_version.clone()),
            ("gamma".into(), self.collectivity.gamma.to_string()),
            ("beta".into(), self.collectivity.beta.to_string()),
            ("w1".into(), self.collectivity.w1.to_string()),
            ("w2".into(), self.collectivity.w2.to_string()),
            (
                "social.weight_collectivity".into(),
                self.social.weight_collectivity.to_string(),
            ),
            (
                "social.weight_proximity".into(),
                self.social.weight_proximity.to_string(),
            ),
            (
                "social.weight_neighbors".into(),
                self.social.weight_neighbors.to_string(),
            ),
            ("social.bias".into(), self.social.bias.to_string()),
            ("social.d_max".into(), self.social.d_max.to_string()),
            ("social.n_cap".into(), self.social.n_cap.to_string()),
            ("comparison.tie".into(), self.comparison.tie.to_string()),
            (
                "comparison.both_at_least".into(),
                self.comparison.both_at_least.to_string(),
            ),
            (
                "comparison.neither_at_most".into(),
                self.comparison.neither_at_most.to_string(),
            ),
            (
                "density".into(),
                serde_json::to_string(&self.density).expect("serializes"),
            ),
            (
                "social_space_radius_m".into(),
                self.social_space_radius_m.to_string(),
            ),
            ("alone_distance_m".into(), self.alone_distance_m.to_string()),
            ("pts_m_per_frame".into(), self.pts_m_per_frame.to_string()),
            ("reciprocal_eps".into(), self.reciprocal_eps.to_string()),
        ];
        for item in &self.registry {
            out.push((
                format!("item.{}.{:?}", item.item_id, item.factor),
                item.expression.clone(),
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PedestrianAnalysis {
    pub pedestrian_id: PedestrianId,
    pub frames: Vec<FrameFeatures>,
    pub animation: Vec<AnimationState>,
    pub social: SocialScores,
    pub vector: FeatureVector,
    pub ocean: OceanScores,
    pub emotions: EmotionScores,
}

impl PedestrianAnalysis {
    pub fn trait_scores(&self) -> TraitScores {
        TraitScores {
            ocean: Some(self.ocean),
            emotions: Some(self.emotions),
            socialization: Some(self.vector.socialization),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneAnalysis {
    /// Gap-filled world-space scene the features were computed on.
    pub scene: TrackedScene,
    pub pedestrians: Vec<PedestrianAnalysis>,
    pub density: DensityLevel,
    pub ledger: ParameterLedger,
}

impl SceneAnalysis {
    pub fn pedestrian(&self, id: PedestrianId) -> Option<&PedestrianAnalysis> {
        self.pedestrians
            .binary_search_by_key(&id, |p| p.pedestrian_id)
            .ok()
            .map(|i| &self.pedestrians[i])
    }
}

impl PedestrianScores for SceneAnalysis {
    fn trait_scores(&self, id: PedestrianId) -> Option<TraitScores> {
        self.pedestrian(id).map(PedestrianAnalysis::trait_scores)
    }
}

/// Area of the axis-aligned bounding box of all positions, m².
pub fn position_extent_area(scene: &TrackedScene) -> f64 {
    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in scene.trajectories.iter().flat_map(|t| &t.samples) {
        lo_x = lo_x.min(s.position.x);
        hi_x = hi_x.max(s.position.x);
        lo_y = lo_y.min(s.position.y);
        hi_y = hi_y.max(s.position.y);
    }
    ((hi_x - lo_x) * (hi_y - lo_y)).max(0.0)
}

/// Per-frame socialization averaged over the pedestrian's frames.
pub fn social_scores(frames: &[FrameFeatures], p: &SocialSurrogateParams) -> SocialScores {
    if frames.is_empty() {
        return socialization_level(0.0, p.d_max, 0.0, p);
    }
    let total: f64 = frames
        .iter()
        .map(|f| {
            socialization_level(
                f.collectivity,
                f.mean_distance,
                f.social_neighbors as f64,
                p,
            )
            .socialization()
        })
        .sum();
    SocialScores::new(total / frames.len() as f64)
}

pub fn analyze_scene(
    scene: &TrackedScene,
    config: &AnalysisConfig,
) -> Result<SceneAnalysis, AnalysisError> {
    config.validate()?;
    let scene = scene.clone().into_world()?.fill_gaps()?;
    let features = extract_frame_features(&scene, &config.collectivity)?;

    let mut grouped: BTreeMap<PedestrianId, Vec<FrameFeatures>> = BTreeMap::new();
    for f in features {
        grouped.entry(f.pedestrian_id).or_default().push(f);
    }

    let mut partial = Vec::with_capacity(grouped.len());
    for (id, frames) in grouped {
        let social = social_scores(&frames, &config.social);
        let vector = aggregate_feature_vector(id, &frames, social)?;
        let animation = frames
            .iter()
            .map(|f| classify_animation(f.speed).expect("speeds are non-negative"))
            .collect();
        partial.push((id, frames, animation, social, vector));
    }

    let vectors: Vec<FeatureVector> = partial.iter().map(|p| p.4).collect();
    let ocean = ocean_from_items(&vectors, &config.registry)?;

    let pedestrians = partial
        .into_iter()
        .zip(ocean)
        .map(
            |((pedestrian_id, frames, animation, social, vector), ocean)| PedestrianAnalysis {
                pedestrian_id,
                frames,
                animation,
                social,
                vector,
                emotions: emotions_from_ocean(&ocean, &config.emotion_table),
                ocean,
            },
        )
        .collect();

    let density = config.density.classify(
        scene.metadata.pedestrian_count,
        position_extent_area(&scene),
    );
    Ok(SceneAnalysis {
        scene,
        pedestrians,
        density,
        ledger: config.ledger(),
    })
}
