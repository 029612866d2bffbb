//! Canonical tracking file formats.
//!
//! CSV: `#`-prefixed `key=value` header lines, then a `frame,id,x,y` column
//! line, then one row per sample. Recognized keys are `scene_id`, `country`,
//! `fps`, `density_label`, `coords` (`image` or `world`), `homography`
//! (nine comma-separated row-major values) and `pedestrians` (declared count,
//! checked against the parsed trajectories).
//!
//! ```text
//! # scene_id=AE-01
//! # fps=24
//! # coords=world
//! frame,id,x,y
//! 0,1,0.0,0.0
//! 1,1,0.04,0.0
//! ```
//!
//! JSON mirrors the same fields with the rows under `"rows"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    CoordinateSpace, CoordinateTransform, Frame, PedestrianId, Result, SceneMetadata, TrackedScene,
    Trajectory, TrajectoryError, TrajectorySample,
};
use crate::classify::DensityLevel;

const COLUMNS: [&str; 4] = ["frame", "id", "x", "y"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackFormat {
    Csv,
    Json,
}

impl TrackFormat {
    /// Guess from a file extension; anything other than `.json` is CSV.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TrackFormat::Json,
            _ => TrackFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Row {
    frame: Frame,
    id: PedestrianId,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonScene {
    scene_id: String,
    #[serde(default)]
    country: String,
    #[serde(default = "default_fps")]
    fps: u32,
    #[serde(default)]
    density_label: Option<DensityLevel>,
    #[serde(default)]
    coords: CoordinateSpace,
    #[serde(default)]
    homography: Option<CoordinateTransform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pedestrians: Option<usize>,
    rows: Vec<Row>,
}

fn default_fps() -> u32 {
    super::DEFAULT_FPS
}

pub fn parse_tracking_file(bytes: &[u8], format: TrackFormat) -> Result<TrackedScene> {
    let text = std::str::from_utf8(bytes).map_err(|_| TrajectoryError::InvalidUtf8)?;
    match format {
        TrackFormat::Csv => parse_csv(text),
        TrackFormat::Json => parse_json(text),
    }
}

fn parse_density(v: &str) -> Result<DensityLevel> {
    match v.to_ascii_lowercase().as_str() {
        "low" => Ok(DensityLevel::Low),
        "medium" => Ok(DensityLevel::Medium),
        "high" => Ok(DensityLevel::High),
        other => Err(TrajectoryError::MalformedHeader(format!(
            "unknown density_label {other:?}"
        ))),
    }
}

fn parse_csv(text: &str) -> Result<TrackedScene> {
    let mut meta = SceneMetadata::new("");
    let mut declared = None;
    let mut body_start = None;
    let mut offset = 0;
    let mut line_no = 0;

    for line in text.split_inclusive('\n') {
        line_no += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            offset += line.len();
            continue;
        }
        let Some(kv) = trimmed.strip_prefix('#') else {
            let cols: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if cols != COLUMNS {
                return Err(TrajectoryError::MalformedHeader(format!(
                    "expected column line `frame,id,x,y`, found {trimmed:?}"
                )));
            }
            body_start = Some((offset, line_no));
            break;
        };
        let (key, value) = kv.split_once('=').ok_or_else(|| {
            TrajectoryError::MalformedHeader(format!("not key=value: {trimmed:?}"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad =
            |what: &str| TrajectoryError::MalformedHeader(format!("invalid {what}: {value:?}"));
        match key {
            "scene_id" => meta.scene_id = value.to_string(),
            "country" => meta.country = value.to_string(),
            "fps" => {
                meta.fps = value
                    .parse()
                    .ok()
                    .filter(|&f: &u32| f > 0)
                    .ok_or_else(|| bad("fps"))?
            }
            "density_label" => meta.density_label = Some(parse_density(value)?),
            "coords" => {
                meta.coords = match value {
                    "image" => CoordinateSpace::Image,
                    "world" => CoordinateSpace::World,
                    _ => return Err(bad("coords")),
                }
            }
            "homography" => {
                let vals = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("homography"))?;
                let arr: [f64; 9] = vals.try_into().map_err(|_| bad("homography"))?;
                meta.homography = Some(CoordinateTransform::new(arr)?);
            }
            "pedestrians" => {
                declared = Some(value.parse::<usize>().map_err(|_| bad("pedestrians"))?)
            }
            other => {
                return Err(TrajectoryError::MalformedHeader(format!(
                    "unknown key {other:?}"
                )))
            }
        }
        offset += line.len();
    }

    let (start, header_line) = body_start.ok_or_else(|| {
        TrajectoryError::MalformedHeader("missing `frame,id,x,y` column line".into())
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[start..]);

    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<Row>().enumerate() {
        let line = header_line + 1 + i;
        let row = rec.map_err(|e| TrajectoryError::MalformedRow {
            line: e
                .position()
                .map_or(line, |p| header_line + p.line() as usize - 1),
            reason: e.to_string(),
        })?;
        rows.push((line, row));
    }
    build_scene(meta, rows, declared)
}

fn parse_json(text: &str) -> Result<TrackedScene> {
    let js: JsonScene =
        serde_json::from_str(text).map_err(|e| TrajectoryError::MalformedHeader(e.to_string()))?;
    let meta = SceneMetadata {
        scene_id: js.scene_id,
        country: js.country,
        fps: js.fps,
        density_label: js.density_label,
        pedestrian_count: 0,
        coords: js.coords,
        homography: js.homography,
    };
    let rows = js
        .rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| (i + 1, r))
        .collect();
    build_scene(meta, rows, js.pedestrians)
}

fn build_scene(
    meta: SceneMetadata,
    rows: Vec<(usize, Row)>,
    declared: Option<usize>,
) -> Result<TrackedScene> {
    let mut grouped: BTreeMap<PedestrianId, Vec<TrajectorySample>> = BTreeMap::new();
    for (line, r) in rows {
        if !(r.x.is_finite() && r.y.is_finite()) {
            return Err(TrajectoryError::NonFinitePosition(line));
        }
        grouped
            .entry(r.id)
            .or_default()
            .push(TrajectorySample::new(r.frame, r.x, r.y));
    }
    let trajectories = grouped
        .into_iter()
        .map(|(id, samples)| Trajectory::new(id, samples))
        .collect();
    let scene = TrackedScene::new(meta, trajectories)?;
    if let Some(declared) = declared {
        if declared != scene.metadata.pedestrian_count {
            return Err(TrajectoryError::CountMismatch {
                declared,
                found: scene.metadata.pedestrian_count,
            });
        }
    }
    Ok(scene)
}

fn density_name(d: DensityLevel) -> &'static str {
    match d {
        DensityLevel::Low => "Low",
        DensityLevel::Medium => "Medium",
        DensityLevel::High => "High",
    }
}

/// Writes the canonical CSV form; rows ordered by (id, frame).
pub fn write_csv(scene: &TrackedScene) -> String {
    let m = &scene.metadata;
    let mut out = String::new();
    let _ = writeln!(out, "# scene_id={}", m.scene_id);
    if !m.country.is_empty() {
        let _ = writeln!(out, "# country={}", m.country);
    }
    let _ = writeln!(out, "# fps={}", m.fps);
    if let Some(d) = m.density_label {
        let _ = writeln!(out, "# density_label={}", density_name(d));
    }
    let _ = writeln!(
        out,
        "# coords={}",
        match m.coords {
            CoordinateSpace::Image => "image",
            CoordinateSpace::World => "world",
        }
    );
    if let Some(h) = &m.homography {
        let vals: Vec<String> = h.matrix().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "# homography={}", vals.join(","));
    }
    let _ = writeln!(out, "# pedestrians={}", m.pedestrian_count);
    out.push_str("frame,id,x,y\n");
    for t in &scene.trajectories {
        for s in &t.samples {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.frame, t.pedestrian_id, s.position.x, s.position.y
            );
        }
    }
    out
}

pub fn write_json(scene: &TrackedScene) -> String {
    let m = &scene.metadata;
    let js = JsonScene {
        scene_id: m.scene_id.clone(),
        country: m.country.clone(),
        fps: m.fps,
        density_label: m.density_label,
        coords: m.coords,
        homography: m.homography,
        pedestrians: Some(m.pedestrian_count),
        rows: scene
            .trajectories
            .iter()
            .flat_map(|t| {
                t.samples.iter().map(|s| Row {
                    frame: s.frame,
                    id: t.pedestrian_id,
                    x: s.position.x,
                    y: s.position.y,
                })
            })
            .collect(),
    };
    serde_json::to_string_pretty(&js).expect("scene serializes")
}
