//! Per-frame geometry of each pedestrian and its per-pedestrian averages.
//!
//! Speeds are in meters/frame. Headings are measured against the reference
//! direction (1, 0) in degrees, `(-180, 180]`; the angular variation is the
//! shortest-arc change of heading between consecutive frames, `[0, 180]`.
//!
//! Collectivity of pedestrian `i` at a frame with `n` people present:
//!
//! ```text
//! ϖ(i,j) = w1·|s_i − s_j| / PTS + w2·Δheading(i,j) / 180
//! ϕ_i    = clamp( 1/(n−1) · Σ_{j≠i} γ·exp(−β·ϖ(i,j)²), 0, 1 )
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::personality::SocialScores;
use crate::trajectory::{Frame, PedestrianId, Point2, TrackedScene, Trajectory};

/// Social-space radius (Hall's proxemics), meters.
pub const SOCIAL_SPACE_RADIUS: f64 = 3.6;
/// Mean distance reported for a pedestrian alone in the frame, meters.
pub const ALONE_DISTANCE: f64 = 10.0;
/// Preferred transition speed between walking and running, meters/frame.
pub const PTS_M_PER_FRAME: f64 = 0.08;
/// Displacements at or below this length leave the heading undefined.
pub const ZERO_DISPLACEMENT: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("pedestrian {pedestrian} has no sample at frame {frame} or the one before it")]
    FrameAbsent {
        pedestrian: PedestrianId,
        frame: Frame,
    },
    #[error("pedestrian {pedestrian} is not present at frame {frame}")]
    PedestrianAbsent {
        pedestrian: PedestrianId,
        frame: Frame,
    },
    #[error("pedestrian {0} has fewer than two samples")]
    TooFewSamples(PedestrianId),
    #[error("features belong to different frames ({0} vs {1})")]
    FrameMismatch(Frame, Frame),
    #[error("pedestrian {0} has no frames to aggregate")]
    NoFrames(PedestrianId),
    #[error("invalid collectivity parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectivityParams {
    pub gamma: f64,
    pub beta: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Default for CollectivityParams {
    fn default() -> Self {
        // β = 4·ln 2 halves the kernel at ϖ = 0.5
        Self {
            gamma: 1.0,
            beta: 2.77,
            w1: 0.5,
            w2: 0.5,
        }
    }
}

impl CollectivityParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma, self.beta, self.w1, self.w2];
        if !all.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(FeatureError::InvalidParams(
                "gamma, beta, w1 and w2 must be finite and strictly positive".into(),
            ));
        }
        if (self.w1 + self.w2 - 1.0).abs() > 1e-9 {
            return Err(FeatureError::InvalidParams(format!(
                "w1 + w2 must equal 1 (got {})",
                self.w1 + self.w2
            )));
        }
        Ok(())
    }

    /// Kernel `γ·exp(−β·ϖ²)`.
    pub fn kernel(&self, dissimilarity: f64) -> f64 {
        self.gamma * (-self.beta * dissimilarity * dissimilarity).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameFeatures {
    pub pedestrian_id: PedestrianId,
    pub frame: Frame,
    pub position: Point2,
    pub speed: f64,
    pub heading: f64,
    pub angular_variation: f64,
    pub mean_distance: f64,
    pub social_neighbors: usize,
    pub collectivity: f64,
}

/// Per-pedestrian averages over all frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub x: Point2,
    pub s: f64,
    pub alpha: f64,
    pub isolation: f64,
    pub socialization: f64,
    pub collectivity: f64,
}

/// Speed, heading and heading change of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub speed: f64,
    /// `None` while the pedestrian has not moved yet.
    pub heading: Option<f64>,
    pub angular_variation: f64,
}

impl Kinematics {
    pub fn heading_or_zero(&self) -> f64 {
        self.heading.unwrap_or(0.0)
    }
}

/// Wraps any angle difference to its shortest arc, in `[0, 180]`.
pub fn angle_between(a_deg: f64, b_deg: f64) -> f64 {
    let d = (a_deg - b_deg).abs() % 360.0;
    if d > 180.0 {
        360.0 - d
    } else {
        d
    }
}

fn heading_of(dx: f64, dy: f64) -> f64 {
    let h = dy.atan2(dx).to_degrees();
    if h <= -180.0 {
        h + 360.0
    } else {
        h
    }
}

/// Displacement into sample `idx`; the first sample borrows the second's.
fn displacement(traj: &Trajectory, idx: usize) -> Result<(f64, f64)> {
    let s = &traj.samples;
    if s.len() < 2 {
        return Err(FeatureError::TooFewSamples(traj.pedestrian_id));
    }
    let i = idx.max(1);
    if s[i].frame != s[i - 1].frame + 1 {
        return Err(FeatureError::FrameAbsent {
            pedestrian: traj.pedestrian_id,
            frame: s[i].frame,
        });
    }
    Ok((
        s[i].position.x - s[i - 1].position.x,
        s[i].position.y - s[i - 1].position.y,
    ))
}

fn sample_index(traj: &Trajectory, frame: Frame) -> Result<usize> {
    traj.index_of(frame).ok_or(FeatureError::FrameAbsent {
        pedestrian: traj.pedestrian_id,
        frame,
    })
}

/// Euclidean displacement from the previous frame. The first frame copies
/// the value of the second.
pub fn compute_speed(traj: &Trajectory, frame: Frame) -> Result<f64> {
    let idx = sample_index(traj, frame)?;
    let (dx, dy) = displacement(traj, idx)?;
    Ok(dx.hypot(dy))
}

/// Heading and angular variation at `frame`, replaying the track from its start
/// so that zero-displacement frames can carry the previous heading.
pub fn compute_heading_and_variation(traj: &Trajectory, frame: Frame) -> Result<(f64, f64)> {
    let idx = sample_index(traj, frame)?;
    let prefix = Trajectory::new(
        traj.pedestrian_id,
        traj.samples[..=idx.max(1).min(traj.samples.len() - 1)].to_vec(),
    );
    let series = kinematics(&prefix)?;
    let k = series[idx];
    Ok((k.heading_or_zero(), k.angular_variation))
}

/// Kinematics of every sample. Tracks must be gap-free; a single-sample
/// track is stationary.
pub fn kinematics(traj: &Trajectory) -> Result<Vec<Kinematics>> {
    if traj.samples.len() < 2 {
        return Ok(vec![
            Kinematics {
                speed: 0.0,
                heading: None,
                angular_variation: 0.0,
            };
            traj.samples.len()
        ]);
    }
    let mut out = Vec::with_capacity(traj.samples.len());
    let mut prev: Option<f64> = None;
    for idx in 0..traj.samples.len() {
        let (dx, dy) = displacement(traj, idx)?;
        let speed = dx.hypot(dy);
        let (heading, angular_variation) = if speed <= ZERO_DISPLACEMENT {
            (prev, 0.0)
        } else {
            let h = heading_of(dx, dy);
            (Some(h), prev.map_or(0.0, |p| angle_between(h, p)))
        };
        prev = heading;
        out.push(Kinematics {
            speed,
            heading,
            angular_variation,
        });
    }
    Ok(out)
}

/// Mean distance to everyone else present at `frame` and the number of
/// them inside the social space. Alone → `(ALONE_DISTANCE, 0)`.
pub fn distance_stats(
    scene: &TrackedScene,
    ped: PedestrianId,
    frame: Frame,
) -> Result<(f64, usize)> {
    let me = scene
        .trajectory(ped)
        .and_then(|t| t.sample_at(frame))
        .ok_or(FeatureError::PedestrianAbsent {
            pedestrian: ped,
            frame,
        })?
        .position;
    let dists: Vec<f64> = scene
        .present_at(frame)
        .filter(|(id, _)| *id != ped)
        .map(|(_, p)| me.distance(p))
        .collect();
    if dists.is_empty() {
        return Ok((ALONE_DISTANCE, 0));
    }
    let mean = dists.iter().sum::<f64>() / dists.len() as f64;
    let near = dists.iter().filter(|&&d| d <= SOCIAL_SPACE_RADIUS).count();
    Ok((mean, near))
}

/// Motion dissimilarity ϖ of two pedestrians from speed and heading.
pub fn motion_dissimilarity(
    speed_a: f64,
    heading_a: f64,
    speed_b: f64,
    heading_b: f64,
    p: &CollectivityParams,
) -> f64 {
    p.w1 * (speed_a - speed_b).abs() / PTS_M_PER_FRAME
        + p.w2 * angle_between(heading_a, heading_b) / 180.0
}

pub fn pair_similarity(
    a: &FrameFeatures,
    b: &FrameFeatures,
    p: &CollectivityParams,
) -> Result<f64> {
    if a.frame != b.frame {
        return Err(FeatureError::FrameMismatch(a.frame, b.frame));
    }
    Ok(motion_dissimilarity(
        a.speed, a.heading, b.speed, b.heading, p,
    ))
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Collectivity of one pedestrian at one frame.
pub fn collectivity(
    scene: &TrackedScene,
    ped: PedestrianId,
    frame: Frame,
    p: &CollectivityParams,
) -> Result<f64> {
    let mine = scene
        .trajectory(ped)
        .filter(|t| t.sample_at(frame).is_some())
        .ok_or(FeatureError::PedestrianAbsent {
            pedestrian: ped,
            frame,
        })?;
    let motion = |t: &Trajectory| -> Result<(f64, f64)> {
        let k = kinematics(t)?;
        let idx = sample_index(t, frame)?;
        Ok((k[idx].speed, k[idx].heading_or_zero()))
    };
    let (s_i, h_i) = motion(mine)?;
    let mut total = 0.0;
    let mut others = 0usize;
    for t in &scene.trajectories {
        if t.pedestrian_id == ped || t.sample_at(frame).is_none() {
            continue;
        }
        let (s_j, h_j) = motion(t)?;
        total += p.kernel(motion_dissimilarity(s_i, h_i, s_j, h_j, p));
        others += 1;
    }
    if others == 0 {
        return Ok(0.0);
    }
    Ok(clamp_unit(total / others as f64))
}

struct Present {
    id: PedestrianId,
    position: Point2,
    speed: f64,
    heading: f64,
    variation: f64,
}

/// All per-frame features of a gap-free scene, ordered by (pedestrian, frame).
pub fn extract_frame_features(
    scene: &TrackedScene,
    p: &CollectivityParams,
) -> Result<Vec<FrameFeatures>> {
    p.validate()?;
    let series = scene
        .trajectories
        .iter()
        .map(kinematics)
        .collect::<Result<Vec<_>>>()?;

    let (lo, hi) = scene.frame_range;
    let per_frame: Vec<Vec<FrameFeatures>> = (lo..=hi)
        .into_par_iter()
        .map(|frame| {
            let present: Vec<Present> = scene
                .trajectories
                .iter()
                .zip(&series)
                .filter_map(|(t, k)| {
                    t.index_of(frame).map(|i| Present {
                        id: t.pedestrian_id,
                        position: t.samples[i].position,
                        speed: k[i].speed,
                        heading: k[i].heading_or_zero(),
                        variation: k[i].angular_variation,
                    })
                })
                .collect();
            frame_features(frame, &present, p)
        })
        .collect();

    let mut all: Vec<FrameFeatures> = per_frame.into_iter().flatten().collect();
    all.sort_by_key(|f| (f.pedestrian_id, f.frame));
    Ok(all)
}

fn frame_features(frame: Frame, present: &[Present], p: &CollectivityParams) -> Vec<FrameFeatures> {
    let n = present.len();
    let mut kernel_sum = vec![0.0; n];
    let mut dist_sum = vec![0.0; n];
    let mut near = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&present[i], &present[j]);
            let k = p.kernel(motion_dissimilarity(
                a.speed, a.heading, b.speed, b.heading, p,
            ));
            kernel_sum[i] += k;
            kernel_sum[j] += k;
            let d = a.position.distance(b.position);
            dist_sum[i] += d;
            dist_sum[j] += d;
            if d <= SOCIAL_SPACE_RADIUS {
                near[i] += 1;
                near[j] += 1;
            }
        }
    }
    present
        .iter()
        .enumerate()
        .map(|(i, me)| {
            let others = (n - 1) as f64;
            let (mean_distance, collectivity) = if n > 1 {
                (dist_sum[i] / others, clamp_unit(kernel_sum[i] / others))
            } else {
                (ALONE_DISTANCE, 0.0)
            };
            FrameFeatures {
                pedestrian_id: me.id,
                frame,
                position: me.position,
                speed: me.speed,
                heading: me.heading,
                angular_variation: me.variation,
                mean_distance,
                social_neighbors: near[i],
                collectivity,
            }
        })
        .collect()
}

/// Arithmetic means over a pedestrian's frames; social scores are passed through.
pub fn aggregate_feature_vector(
    ped: PedestrianId,
    frames: &[FrameFeatures],
    social: SocialScores,
) -> Result<FeatureVector> {
    if frames.is_empty() {
        return Err(FeatureError::NoFrames(ped));
    }
    let n = frames.len() as f64;
    let mean = |f: fn(&FrameFeatures) -> f64| frames.iter().map(f).sum::<f64>() / n;
    Ok(FeatureVector {
        x: Point2::new(mean(|f| f.position.x), mean(|f| f.position.y)),
        s: mean(|f| f.speed),
        alpha: mean(|f| f.angular_variation),
        isolation: social.isolation(),
        socialization: social.socialization(),
        collectivity: mean(|f| f.collectivity),
    })
}
