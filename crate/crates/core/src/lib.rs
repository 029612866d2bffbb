//! Crowd trajectory analytics.
//!
//! Tracking files are parsed into [`trajectory::TrackedScene`]s, per-frame
//! geometry is extracted ([`features`]), and each pedestrian is scored on
//! socialization, the five OCEAN factors and four OCC emotions
//! ([`personality`]). [`analysis::analyze_scene`] runs the whole pipeline and
//! [`summary::summarize_scene`] turns the result into a JSON report.
//! [`service`] holds the playback-side model: an ingested scene store, frame
//! payloads with overlays and playback sessions.

pub mod analysis;
pub mod classify;
pub mod dataset;
pub mod features;
pub mod personality;
pub mod service;
pub mod summary;
pub mod synthetic;
pub mod trajectory;

pub use analysis::{analyze_scene, AnalysisConfig, AnalysisError, ParameterLedger, SceneAnalysis};
pub use classify::{AnimationState, DensityLevel};
pub use features::{CollectivityParams, FeatureVector, FrameFeatures};
pub use personality::{EmotionScores, OceanScores, SocialScores, SocialSurrogateParams};
pub use summary::{summarize_scene, SceneSummary};
pub use trajectory::{TrackedScene, Trajectory, TrajectorySample};
