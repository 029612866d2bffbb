//! Deterministic synthetic scenes.
//!
//! `p01`..`p03` reconstruct the three highlighted-pedestrian clips from their
//! verbal descriptions (the original tracks are not published). The random
//! generators back property tests, benchmarks and the demo dataset.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::HighlightAnnotation;
use crate::dataset::VideoInfo;
use crate::trajectory::{
    Frame, PedestrianId, SceneMetadata, TrackedScene, Trajectory, TrajectorySample,
};

/// Highlighted pedestrians share these ids in every scenario.
pub const YELLOW: PedestrianId = 2;
pub const RED: PedestrianId = 9;

const SCENARIO_FRAMES: Frame = 120;

fn path(id: PedestrianId, frames: Frame, at: impl Fn(f64) -> (f64, f64)) -> Trajectory {
    Trajectory::new(
        id,
        (0..frames)
            .map(|f| {
                let (x, y) = at(f64::from(f));
                TrajectorySample::new(f, x, y)
            })
            .collect(),
    )
}

fn scenario(id: &str, trajectories: Vec<Trajectory>) -> TrackedScene {
    let mut meta = SceneMetadata::new(id);
    meta.country = "synthetic".into();
    TrackedScene::new(meta, trajectories).expect("scenario scene is valid")
}

/// Group member drifting along +x with a gentle lateral meander.
fn meandering_member(id: PedestrianId, origin: (f64, f64), speed: f64, phase: f64) -> Trajectory {
    path(id, SCENARIO_FRAMES, move |t| {
        (
            origin.0 + speed * t,
            origin.1 + 0.1 * (TAU * t / 96.0 + phase).sin(),
        )
    })
}

const GROUP_OFFSETS: [(f64, f64); 4] = [(0.0, 0.0), (0.7, 0.3), (0.2, -0.7), (-0.6, 0.4)];

/// Yellow walks inside a slow group; red cuts straight through it, faster and
/// across the group's direction of travel.
pub fn p01() -> TrackedScene {
    let mut t: Vec<Trajectory> = GROUP_OFFSETS
        .iter()
        .enumerate()
        .map(|(i, &(dx, dy))| {
            meandering_member(i as PedestrianId + 1, (6.0 + dx, dy), 0.015, i as f64)
        })
        .collect();
    t.push(path(RED, SCENARIO_FRAMES, |f| (7.2, -5.0 + 0.06 * f)));
    scenario("P01", t)
}

/// Yellow weaves back and forth through a group, interacting with it; red
/// walks slowly on its own, far from everyone.
pub fn p02() -> TrackedScene {
    let center = |f: f64| (2.0 + 0.015 * f, 0.0);
    let mut t: Vec<Trajectory> = [1u32, 3, 4]
        .iter()
        .zip([(0.5, 0.0), (-0.4, 0.5), (-0.3, -0.5)])
        .map(|(&id, (dx, dy))| meandering_member(id, (2.0 + dx, dy), 0.015, f64::from(id)))
        .collect();
    t.push(path(YELLOW, SCENARIO_FRAMES, move |f| {
        let (cx, cy) = center(f);
        (cx, cy + 0.15 * (TAU * f / 36.0).sin())
    }));
    t.push(path(RED, SCENARIO_FRAMES, |f| (12.0 - 0.015 * f, 6.0)));
    scenario("P02", t)
}

/// Yellow walks with a group; red walks alone against the flow of everyone else.
pub fn p03() -> TrackedScene {
    let mut t: Vec<Trajectory> = GROUP_OFFSETS
        .iter()
        .enumerate()
        .map(|(i, &(dx, dy))| meandering_member(i as PedestrianId + 1, (dx, dy), 0.03, i as f64))
        .collect();
    t.push(meandering_member(5, (1.0, -4.0), 0.035, 0.3));
    t.push(meandering_member(6, (-2.0, -4.5), 0.035, 2.1));
    t.push(path(RED, SCENARIO_FRAMES, |f| (6.5 - 0.03 * f, 2.5)));
    scenario("P03", t)
}

pub fn scenario_scenes() -> Vec<TrackedScene> {
    vec![p01(), p02(), p03()]
}

/// The seven highlighted-pedestrian questions over the three scenarios.
pub fn scenario_annotations() -> Vec<HighlightAnnotation> {
    [
        ("P01", "Q1"),
        ("P01", "Q2"),
        ("P02", "Q3"),
        ("P02", "Q4"),
        ("P03", "Q5"),
        ("P03", "Q6"),
        ("P03", "Q7"),
    ]
    .into_iter()
    .map(|(scene, q)| HighlightAnnotation {
        scene_id: scene.into(),
        yellow_id: YELLOW,
        red_id: RED,
        question_key: q.into(),
    })
    .collect()
}

/// `n` pedestrians wandering in a 20 m × 15 m area over `frames` frames. Each
/// one enters and leaves at random times, changes heading as a random walk
/// and sometimes pauses. Tracks are gap-free.
pub fn random_scene(scene_id: &str, n: usize, frames: Frame, seed: u64) -> TrackedScene {
    assert!(n > 0 && frames >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trajectories = (0..n)
        .map(|i| {
            let len = rng.gen_range(2..=frames);
            let start = rng.gen_range(0..=frames - len);
            let mut x = rng.gen_range(0.0..20.0);
            let mut y = rng.gen_range(0.0..15.0);
            let mut heading: f64 = rng.gen_range(-180.0..180.0);
            let speed = rng.gen_range(0.005..0.1);
            let samples = (start..start + len)
                .map(|f| {
                    let s = TrajectorySample::new(f, x, y);
                    heading += rng.gen_range(-15.0..15.0);
                    if !rng.gen_bool(0.1) {
                        x += speed * heading.to_radians().cos();
                        y += speed * heading.to_radians().sin();
                    }
                    s
                })
                .collect();
            Trajectory::new(i as PedestrianId + 1, samples)
        })
        .collect();
    let mut meta = SceneMetadata::new(scene_id);
    meta.country = "synthetic".into();
    TrackedScene::new(meta, trajectories).expect("random scene is valid")
}

/// A random scene carrying one video's metadata and pedestrian count.
pub fn video_scene(video: &VideoInfo, frames: Frame, seed: u64) -> TrackedScene {
    let mut scene = random_scene(video.id, video.pedestrians, frames, seed);
    scene.metadata.country = video.country.into();
    scene.metadata.density_label = Some(video.density);
    scene
}
