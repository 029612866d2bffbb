//! Metadata of the six crowd videos used for the perception study.

use crate::classify::DensityLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VideoInfo {
    pub id: &'static str,
    pub country: &'static str,
    pub pedestrians: usize,
    pub density: DensityLevel,
}

pub const CULTURAL_CROWDS_VIDEOS: [VideoInfo; 6] = [
    VideoInfo {
        id: "AE-01",
        country: "Unit. Arab Emirates",
        pedestrians: 12,
        density: DensityLevel::Low,
    },
    VideoInfo {
        id: "AT-03",
        country: "Austria",
        pedestrians: 10,
        density: DensityLevel::Low,
    },
    VideoInfo {
        id: "BR-01",
        country: "Brazil",
        pedestrians: 16,
        density: DensityLevel::Low,
    },
    VideoInfo {
        id: "BR-15",
        country: "Brazil",
        pedestrians: 15,
        density: DensityLevel::Low,
    },
    VideoInfo {
        id: "BR-25",
        country: "Brazil",
        pedestrians: 25,
        density: DensityLevel::Medium,
    },
    VideoInfo {
        id: "BR-34",
        country: "Brazil",
        pedestrians: 34,
        density: DensityLevel::High,
    },
];

pub fn video(id: &str) -> Option<&'static VideoInfo> {
    CULTURAL_CROWDS_VIDEOS.iter().find(|v| v.id == id)
}
