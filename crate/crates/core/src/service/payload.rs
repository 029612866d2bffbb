use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::classify::AnimationState;
use crate::personality::{Emotion, EmotionScores};
use crate::trajectory::{Frame, PedestrianId, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HighlightColor {
    Yellow,
    Red,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OverlayConfig {
    #[serde(default)]
    pub show_emotion: bool,
    #[serde(default)]
    pub show_socialization: bool,
    #[serde(default)]
    pub show_collectivity: bool,
    #[serde(default)]
    pub highlight: BTreeMap<PedestrianId, HighlightColor>,
}

impl OverlayConfig {
    /// Parses the query form: `overlays=emotion,socialization,collectivity`
    /// and `highlight=3:yellow,7:red`.
    pub fn from_query(
        overlays: Option<&str>,
        highlight: Option<&str>,
    ) -> Result<Self, ServiceError> {
        let mut cfg = OverlayConfig::default();
        for name in overlays
            .unwrap_or("")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            match name {
                "emotion" => cfg.show_emotion = true,
                "socialization" => cfg.show_socialization = true,
                "collectivity" => cfg.show_collectivity = true,
                "all" => {
                    cfg.show_emotion = true;
                    cfg.show_socialization = true;
                    cfg.show_collectivity = true;
                }
                other => {
                    return Err(ServiceError::InvalidOverlay(format!(
                        "unknown overlay {other:?}"
                    )))
                }
            }
        }
        for pair in highlight
            .unwrap_or("")
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let (id, color) = pair.split_once(':').ok_or_else(|| {
                ServiceError::InvalidOverlay(format!("expected id:color, got {pair:?}"))
            })?;
            let id: PedestrianId = id
                .trim()
                .parse()
                .map_err(|_| ServiceError::InvalidOverlay(format!("bad pedestrian id {id:?}")))?;
            let color = match color.trim() {
                "yellow" => HighlightColor::Yellow,
                "red" => HighlightColor::Red,
                "none" => HighlightColor::None,
                other => {
                    return Err(ServiceError::InvalidOverlay(format!(
                        "color {other:?} not in palette"
                    )))
                }
            };
            cfg.highlight.insert(id, color);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionOverlay {
    #[serde(flatten)]
    pub scores: EmotionScores,
    pub dominant: Emotion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PedestrianRecord {
    pub pedestrian_id: PedestrianId,
    pub position: Point2,
    pub animation: AnimationState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion: Option<EmotionOverlay>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub socialization: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collectivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub highlight: Option<HighlightColor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePayload {
    pub scene_id: String,
    pub frame: Frame,
    pub pedestrians: Vec<PedestrianRecord>,
}
