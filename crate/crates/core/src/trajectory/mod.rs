//! Tracking data model: scenes, trajectories and the image-to-world transform.
//!
//! A [`TrackedScene`] is immutable once built. Every constructor path goes
//! through [`TrackedScene::new`], which sorts trajectories by pedestrian id,
//! rejects duplicate frames and non-finite positions, and derives the frame
//! range and pedestrian count.

mod format;

pub use format::{parse_tracking_file, write_csv, write_json, TrackFormat};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::DensityLevel;

pub type PedestrianId = u32;
pub type Frame = u32;

/// Default capture rate of the source videos.
pub const DEFAULT_FPS: u32 = 24;

/// Minimum |det| for a homography to count as invertible.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("frames of pedestrian {0} are not strictly increasing")]
    NonMonotonicFrames(PedestrianId),
    #[error("non-finite position at line {0}")]
    NonFinitePosition(usize),
    #[error("scene contains no trajectories")]
    EmptyScene,
    #[error("declared pedestrian count {declared} but found {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("homography is singular")]
    SingularTransform,
    #[error("pedestrian {pedestrian} at frame {frame} maps to a point at infinity")]
    PointAtInfinity {
        pedestrian: PedestrianId,
        frame: Frame,
    },
    #[error("scene is in image coordinates but carries no homography")]
    MissingTransform,
    #[error("pedestrian {0} has fewer than two samples")]
    TooFewSamples(PedestrianId),
    #[error("pedestrian {pedestrian} lost for {missing} frames (limit {limit})")]
    TrackLost {
        pedestrian: PedestrianId,
        missing: u32,
        limit: u32,
    },
}

pub type Result<T, E = TrajectoryError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Whether positions are tracked pixels or already in meters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateSpace {
    Image,
    #[default]
    World,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMetadata {
    pub scene_id: String,
    pub country: String,
    pub fps: u32,
    /// Ground-truth density label, when the dataset provides one.
    pub density_label: Option<DensityLevel>,
    pub pedestrian_count: usize,
    pub coords: CoordinateSpace,
    pub homography: Option<CoordinateTransform>,
}

impl SceneMetadata {
    pub fn new(scene_id: impl Into<String>) -> Self {
        Self {
            scene_id: scene_id.into(),
            country: String::new(),
            fps: DEFAULT_FPS,
            density_label: None,
            pedestrian_count: 0,
            coords: CoordinateSpace::World,
            homography: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub frame: Frame,
    pub position: Point2,
}

impl TrajectorySample {
    pub const fn new(frame: Frame, x: f64, y: f64) -> Self {
        Self {
            frame,
            position: Point2::new(x, y),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub pedestrian_id: PedestrianId,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn new(pedestrian_id: PedestrianId, samples: Vec<TrajectorySample>) -> Self {
        Self {
            pedestrian_id,
            samples,
        }
    }

    /// Sample at `frame`, found by binary search (samples are frame-sorted).
    pub fn sample_at(&self, frame: Frame) -> Option<&TrajectorySample> {
        self.index_of(frame).map(|i| &self.samples[i])
    }

    pub fn index_of(&self, frame: Frame) -> Option<usize> {
        self.samples.binary_search_by_key(&frame, |s| s.frame).ok()
    }

    pub fn first_frame(&self) -> Option<Frame> {
        self.samples.first().map(|s| s.frame)
    }

    pub fn last_frame(&self) -> Option<Frame> {
        self.samples.last().map(|s| s.frame)
    }

    fn validate(&self) -> Result<()> {
        if self.samples.windows(2).any(|w| w[0].frame >= w[1].frame) {
            return Err(TrajectoryError::NonMonotonicFrames(self.pedestrian_id));
        }
        Ok(())
    }
}

/// Row-major 3×3 homography mapping image pixels to world meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 9]", into = "[f64; 9]")]
pub struct CoordinateTransform {
    matrix: [f64; 9],
}

impl TryFrom<[f64; 9]> for CoordinateTransform {
    type Error = TrajectoryError;

    fn try_from(matrix: [f64; 9]) -> Result<Self> {
        Self::new(matrix)
    }
}

impl From<CoordinateTransform> for [f64; 9] {
    fn from(t: CoordinateTransform) -> Self {
        t.matrix
    }
}

impl CoordinateTransform {
    pub fn new(matrix: [f64; 9]) -> Result<Self> {
        let t = Self { matrix };
        if !matrix.iter().all(|v| v.is_finite()) || t.determinant().abs() <= SINGULAR_EPS {
            return Err(TrajectoryError::SingularTransform);
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        Self {
            matrix: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        }
    }

    pub fn scale(sx: f64, sy: f64) -> Result<Self> {
        Self::new([sx, 0.0, 0.0, 0.0, sy, 0.0, 0.0, 0.0, 1.0])
    }

    pub fn matrix(&self) -> &[f64; 9] {
        &self.matrix
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.matrix;
        m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6])
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = &self.matrix;
        let det = self.determinant();
        if det.abs() <= SINGULAR_EPS {
            return Err(TrajectoryError::SingularTransform);
        }
        let adj = [
            m[4] * m[8] - m[5] * m[7],
            m[2] * m[7] - m[1] * m[8],
            m[1] * m[5] - m[2] * m[4],
            m[5] * m[6] - m[3] * m[8],
            m[0] * m[8] - m[2] * m[6],
            m[2] * m[3] - m[0] * m[5],
            m[3] * m[7] - m[4] * m[6],
            m[1] * m[6] - m[0] * m[7],
            m[0] * m[4] - m[1] * m[3],
        ];
        Self::new(adj.map(|v| v / det))
    }

    /// Maps a point through the homography; `None` when w ≈ 0.
    pub fn map(&self, p: Point2) -> Option<Point2> {
        let m = &self.matrix;
        let x = m[0] * p.x + m[1] * p.y + m[2];
        let y = m[3] * p.x + m[4] * p.y + m[5];
        let w = m[6] * p.x + m[7] * p.y + m[8];
        if w.abs() <= SINGULAR_EPS {
            return None;
        }
        Some(Point2::new(x / w, y / w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedScene {
    pub metadata: SceneMetadata,
    pub trajectories: Vec<Trajectory>,
    pub frame_range: (Frame, Frame),
}

impl TrackedScene {
    /// Validates and normalizes: samples sorted by frame, trajectories by id.
    pub fn new(mut metadata: SceneMetadata, mut trajectories: Vec<Trajectory>) -> Result<Self> {
        if metadata.fps == 0 {
            return Err(TrajectoryError::MalformedHeader(
                "fps must be positive".into(),
            ));
        }
        trajectories.retain(|t| !t.samples.is_empty());
        if trajectories.is_empty() {
            return Err(TrajectoryError::EmptyScene);
        }
        trajectories.sort_by_key(|t| t.pedestrian_id);
        if let Some(w) = trajectories
            .windows(2)
            .find(|w| w[0].pedestrian_id == w[1].pedestrian_id)
        {
            return Err(TrajectoryError::MalformedHeader(format!(
                "pedestrian {} listed twice",
                w[0].pedestrian_id
            )));
        }
        let mut lo = Frame::MAX;
        let mut hi = Frame::MIN;
        for t in &mut trajectories {
            t.samples.sort_by_key(|s| s.frame);
            t.validate()?;
            if let Some(bad) = t.samples.iter().position(|s| !s.position.is_finite()) {
                return Err(TrajectoryError::NonFinitePosition(bad));
            }
            lo = lo.min(t.samples[0].frame);
            hi = hi.max(t.samples[t.samples.len() - 1].frame);
        }
        metadata.pedestrian_count = trajectories.len();
        Ok(Self {
            metadata,
            trajectories,
            frame_range: (lo, hi),
        })
    }

    pub fn scene_id(&self) -> &str {
        &self.metadata.scene_id
    }

    pub fn fps(&self) -> u32 {
        self.metadata.fps
    }

    pub fn trajectory(&self, id: PedestrianId) -> Option<&Trajectory> {
        self.trajectories
            .binary_search_by_key(&id, |t| t.pedestrian_id)
            .ok()
            .map(|i| &self.trajectories[i])
    }

    pub fn pedestrian_ids(&self) -> impl Iterator<Item = PedestrianId> + '_ {
        self.trajectories.iter().map(|t| t.pedestrian_id)
    }

    /// Pedestrians with a sample at `frame`, in id order.
    pub fn present_at(&self, frame: Frame) -> impl Iterator<Item = (PedestrianId, Point2)> + '_ {
        self.trajectories
            .iter()
            .filter_map(move |t| t.sample_at(frame).map(|s| (t.pedestrian_id, s.position)))
    }

    /// Converts an image-space scene to world meters using its own homography.
    /// World-space scenes are returned unchanged.
    pub fn into_world(self) -> Result<Self> {
        match self.metadata.coords {
            CoordinateSpace::World => Ok(self),
            CoordinateSpace::Image => {
                let t = self
                    .metadata
                    .homography
                    .ok_or(TrajectoryError::MissingTransform)?;
                let mut out = apply_transform(&self, &t)?;
                out.metadata.coords = CoordinateSpace::World;
                Ok(out)
            }
        }
    }

    /// Fills dropped frames of every trajectory; gaps longer than 2·fps fail.
    pub fn fill_gaps(&self) -> Result<Self> {
        let limit = 2 * self.metadata.fps;
        let trajectories = self
            .trajectories
            .iter()
            .map(|t| {
                if t.samples.len() < 2 {
                    Ok(t.clone())
                } else {
                    fill_gaps_within(t, limit)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        TrackedScene::new(self.metadata.clone(), trajectories)
    }
}

/// Maps every position through `t`; metadata is left untouched.
pub fn apply_transform(scene: &TrackedScene, t: &CoordinateTransform) -> Result<TrackedScene> {
    if t.determinant().abs() <= SINGULAR_EPS {
        return Err(TrajectoryError::SingularTransform);
    }
    let trajectories = scene
        .trajectories
        .iter()
        .map(|traj| {
            let samples = traj
                .samples
                .iter()
                .map(|s| {
                    t.map(s.position)
                        .map(|position| TrajectorySample {
                            frame: s.frame,
                            position,
                        })
                        .ok_or(TrajectoryError::PointAtInfinity {
                            pedestrian: traj.pedestrian_id,
                            frame: s.frame,
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Trajectory::new(traj.pedestrian_id, samples))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrackedScene {
        metadata: scene.metadata.clone(),
        trajectories,
        frame_range: scene.frame_range,
    })
}

/// Linearly interpolates every missing integer frame between the first and last sample.
pub fn fill_gaps(traj: &Trajectory) -> Result<Trajectory> {
    fill_gaps_within(traj, u32::MAX)
}

/// Like [`fill_gaps`], but a run of more than `max_missing` absent frames is
/// reported as [`TrajectoryError::TrackLost`].
pub fn fill_gaps_within(traj: &Trajectory, max_missing: u32) -> Result<Trajectory> {
    if traj.samples.len() < 2 {
        return Err(TrajectoryError::TooFewSamples(traj.pedestrian_id));
    }
    traj.validate()?;
    let span = (traj.samples[traj.samples.len() - 1].frame - traj.samples[0].frame) as usize + 1;
    let mut samples = Vec::with_capacity(span);
    for pair in traj.samples.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        samples.push(a);
        let step = b.frame - a.frame;
        if step > 1 {
            let missing = step - 1;
            if missing > max_missing {
                return Err(TrajectoryError::TrackLost {
                    pedestrian: traj.pedestrian_id,
                    missing,
                    limit: max_missing,
                });
            }
            for k in 1..step {
                let t = f64::from(k) / f64::from(step);
                samples.push(TrajectorySample {
                    frame: a.frame + k,
                    position: a.position.lerp(b.position, t),
                });
            }
        }
    }
    samples.push(traj.samples[traj.samples.len() - 1]);
    Ok(Trajectory::new(traj.pedestrian_id, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn traj(id: PedestrianId, pts: &[(Frame, f64, f64)]) -> Trajectory {
        Trajectory::new(
            id,
            pts.iter()
                .map(|&(f, x, y)| TrajectorySample::new(f, x, y))
                .collect(),
        )
    }

    fn scene_of(trajs: Vec<Trajectory>) -> TrackedScene {
        TrackedScene::new(SceneMetadata::new("t"), trajs).unwrap()
    }

    #[test]
    fn identity_transform_keeps_positions() {
        let s = scene_of(vec![traj(1, &[(0, 3.5, -2.0), (1, 4.0, 1.0)])]);
        let out = apply_transform(&s, &CoordinateTransform::identity()).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn pure_scale_maps_pixels_to_meters() {
        let s = scene_of(vec![traj(1, &[(0, 100.0, 40.0), (1, 120.0, 40.0)])]);
        let t = CoordinateTransform::scale(0.05, 0.05).unwrap();
        let out = apply_transform(&s, &t).unwrap();
        let p = out.trajectories[0].samples[0].position;
        assert_abs_diff_eq!(p.x, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 2.0, epsilon = 1e-12);
        assert_eq!(out.metadata, s.metadata);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = [1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0];
        assert_eq!(
            CoordinateTransform::new(m),
            Err(TrajectoryError::SingularTransform)
        );
    }

    #[test]
    fn point_at_infinity_reported() {
        // w = x - 1, so x = 1 maps to infinity
        let t = CoordinateTransform::new([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0]).unwrap();
        let s = scene_of(vec![traj(7, &[(0, 0.0, 0.0), (1, 1.0, 0.0)])]);
        assert_eq!(
            apply_transform(&s, &t),
            Err(TrajectoryError::PointAtInfinity {
                pedestrian: 7,
                frame: 1
            })
        );
    }

    #[test]
    fn inverse_round_trip() {
        let t =
            CoordinateTransform::new([0.9, 0.1, 3.0, -0.2, 1.1, -4.0, 1e-4, 2e-4, 1.0]).unwrap();
        let s = scene_of(vec![traj(1, &[(0, 10.0, 20.0), (1, 640.0, 480.0)])]);
        let back =
            apply_transform(&apply_transform(&s, &t).unwrap(), &t.inverse().unwrap()).unwrap();
        for (a, b) in s.trajectories[0]
            .samples
            .iter()
            .zip(&back.trajectories[0].samples)
        {
            assert_abs_diff_eq!(a.position.x, b.position.x, epsilon = 1e-9);
            assert_abs_diff_eq!(a.position.y, b.position.y, epsilon = 1e-9);
        }
    }

    #[test]
    fn gap_midpoint_interpolated() {
        let out = fill_gaps(&traj(1, &[(0, 0.0, 0.0), (2, 2.0, 0.0)])).unwrap();
        assert_eq!(out.samples.len(), 3);
        assert_eq!(out.samples[1], TrajectorySample::new(1, 1.0, 0.0));
    }

    #[test]
    fn contiguous_track_unchanged() {
        let t = traj(1, &[(0, 0.0, 0.0), (1, 1.0, 0.5), (2, 2.0, 1.0)]);
        assert_eq!(fill_gaps(&t).unwrap(), t);
    }

    #[test]
    fn long_gap_linear() {
        let out = fill_gaps(&traj(1, &[(0, 0.0, 0.0), (4, 4.0, 8.0)])).unwrap();
        assert_eq!(out.samples.len(), 5);
        assert_abs_diff_eq!(out.samples[3].position.x, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.samples[3].position.y, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn fill_gaps_needs_two_samples() {
        assert_eq!(
            fill_gaps(&traj(4, &[(0, 0.0, 0.0)])),
            Err(TrajectoryError::TooFewSamples(4))
        );
    }

    #[test]
    fn track_lost_beyond_two_seconds() {
        let mut meta = SceneMetadata::new("lost");
        meta.fps = 2;
        let s = TrackedScene::new(meta, vec![traj(9, &[(0, 0.0, 0.0), (6, 1.0, 0.0)])]).unwrap();
        assert_eq!(
            s.fill_gaps(),
            Err(TrajectoryError::TrackLost {
                pedestrian: 9,
                missing: 5,
                limit: 4
            })
        );
    }

    #[test]
    fn duplicate_frame_rejected() {
        let err = TrackedScene::new(
            SceneMetadata::new("d"),
            vec![traj(3, &[(5, 0.0, 0.0), (5, 1.0, 0.0)])],
        )
        .unwrap_err();
        assert_eq!(err, TrajectoryError::NonMonotonicFrames(3));
    }

    #[test]
    fn scene_sorts_and_counts() {
        let s = scene_of(vec![
            traj(2, &[(3, 0.0, 0.0), (1, 1.0, 0.0)]),
            traj(1, &[(0, 0.0, 0.0), (1, 1.0, 0.0)]),
        ]);
        assert_eq!(s.metadata.pedestrian_count, 2);
        assert_eq!(s.frame_range, (0, 3));
        assert_eq!(s.trajectories[0].pedestrian_id, 1);
        assert_eq!(s.trajectories[1].samples[0].frame, 1);
        assert_eq!(s.present_at(3).count(), 1);
    }

    #[test]
    fn image_scene_without_homography_fails() {
        let mut meta = SceneMetadata::new("img");
        meta.coords = CoordinateSpace::Image;
        let s = TrackedScene::new(meta, vec![traj(1, &[(0, 1.0, 1.0)])]).unwrap();
        assert_eq!(s.into_world(), Err(TrajectoryError::MissingTransform));
    }
}
