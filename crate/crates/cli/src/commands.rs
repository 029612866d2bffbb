//! File-based subcommands. Every function returns the files it wrote;
//! diagnostics are left to the caller.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crowdlens_core::analysis::AnalysisError;
use crowdlens_core::classify::{
    answer_question, ClassifyError, HighlightAnnotation, QuestionAnswer,
};
use crowdlens_core::dataset::CULTURAL_CROWDS_VIDEOS;
use crowdlens_core::summary::SummaryError;
use crowdlens_core::synthetic;
use crowdlens_core::trajectory::{parse_tracking_file, write_csv, TrackFormat, TrackedScene};
use crowdlens_core::{
    analyze_scene, summarize_scene, AnalysisConfig, ParameterLedger, SceneSummary,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SUMMARY_SUFFIX: &str = ".summary.json";

/// File-name-safe form of a scene id.
pub fn file_stem(scene_id: &str) -> String {
    scene_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn is_summary(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.ends_with(SUMMARY_SUFFIX))
}

fn has_ext(path: &Path, exts: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| exts.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

/// Sorted regular files of `dir` satisfying `keep`. A missing directory is an input error.
fn list_dir(dir: &Path, keep: impl Fn(&Path) -> bool) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::input(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::input(dir, e))?.path();
        if path.is_file() && keep(&path) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Tracking files under `input`: the file itself, or every `.csv`/`.json`
/// in the directory that is not a summary.
pub fn tracking_files(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    if !input.exists() {
        return Err(CliError::input(input, "no such file or directory"));
    }
    list_dir(input, |p| has_ext(p, &["csv", "json"]) && !is_summary(p))
}

pub fn load_scene(path: &Path) -> Result<TrackedScene> {
    let bytes = std::fs::read(path).map_err(|e| CliError::input(path, e))?;
    parse_tracking_file(&bytes, TrackFormat::from_path(path)).map_err(|e| CliError::input(path, e))
}

fn load_scenes(input: &Path) -> Result<Vec<TrackedScene>> {
    let files = tracking_files(input)?;
    let scenes = files
        .par_iter()
        .map(|p| load_scene(p))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut seen = BTreeSet::new();
    for s in &scenes {
        if !seen.insert(s.scene_id()) {
            return Err(CliError::invariant(format!(
                "scene id {:?} appears in more than one file",
                s.scene_id()
            )));
        }
    }
    Ok(scenes)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::input(dir, e))
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    std::fs::write(&path, contents).map_err(|e| CliError::input(&path, e))?;
    Ok(path)
}

fn analysis_failure(scene: &str, e: impl std::fmt::Display) -> CliError {
    CliError::invariant(format!("scene {scene}: {e}"))
}

/// Validates, converts to world coordinates and gap-fills every input scene,
/// writing each as canonical CSV.
pub fn ingest(input: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let scenes = load_scenes(input)?;
    let clean = scenes
        .par_iter()
        .map(|s| {
            s.clone()
                .into_world()
                .and_then(|w| w.fill_gaps())
                .map_err(|e| analysis_failure(s.scene_id(), e))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    create_dir(out)?;
    clean
        .iter()
        .map(|s| {
            write(
                out.join(format!("{}.csv", file_stem(s.scene_id()))),
                &write_csv(s),
            )
        })
        .collect()
}

pub fn summarize_all(scenes: &[TrackedScene], cfg: &AnalysisConfig) -> Result<Vec<SceneSummary>> {
    scenes
        .par_iter()
        .map(|s| {
            let a = analyze_scene(s, cfg)
                .map_err(|e: AnalysisError| analysis_failure(s.scene_id(), e))?;
            summarize_scene(&a).map_err(|e: SummaryError| analysis_failure(s.scene_id(), e))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Analyzes every scene under `input` into `<scene>.summary.json` files in
/// `out`; with `questions`, also answers them into `answers.json`.
pub fn analyze(
    input: &Path,
    out: &Path,
    cfg: &AnalysisConfig,
    questions: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    let annotations = questions.map(load_annotations).transpose()?;
    let scenes = load_scenes(input)?;
    if scenes.is_empty() {
        return Err(CliError::input(input, "no tracking files found"));
    }
    let summaries = summarize_all(&scenes, cfg)?;
    create_dir(out)?;
    let mut written = summaries
        .iter()
        .map(|s| {
            write(
                out.join(format!("{}{SUMMARY_SUFFIX}", file_stem(&s.scene_id))),
                &s.to_json(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    if let (Some(path), Some(annotations)) = (questions, annotations) {
        let report = answer_annotations(&annotations, &summaries, path)?;
        written.push(write(out.join("answers.json"), &report.to_json())?);
    }
    Ok(written)
}

pub fn load_summaries(dir: &Path) -> Result<Vec<SceneSummary>> {
    list_dir(dir, is_summary)?
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::input(p, e))?;
            SceneSummary::from_json(&text).map_err(|e| CliError::input(p, e))
        })
        .collect()
}

pub fn load_annotations(path: &Path) -> Result<Vec<HighlightAnnotation>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerReport {
    pub ledger_fingerprint: Option<String>,
    pub parameters: Option<ParameterLedger>,
    pub answers: Vec<QuestionAnswer>,
}

impl AnswerReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Answers each annotation against the summaries. All summaries must share
/// one parameter ledger.
pub fn answer_annotations(
    annotations: &[HighlightAnnotation],
    summaries: &[SceneSummary],
    annotations_path: &Path,
) -> Result<AnswerReport> {
    let fingerprints: BTreeSet<&str> = summaries
        .iter()
        .map(|s| s.ledger_fingerprint.as_str())
        .collect();
    if fingerprints.len() > 1 {
        return Err(CliError::invariant(format!(
            "summaries were produced with {} different parameter ledgers",
            fingerprints.len()
        )));
    }
    let by_id: BTreeMap<&str, &SceneSummary> =
        summaries.iter().map(|s| (s.scene_id.as_str(), s)).collect();
    let answers = annotations
        .iter()
        .map(|a| {
            let scene = by_id.get(a.scene_id.as_str()).ok_or_else(|| {
                CliError::invariant(format!(
                    "annotation refers to unknown scene {:?}",
                    a.scene_id
                ))
            })?;
            answer_question(a, *scene, &scene.parameters.comparison).map_err(|e| match e {
                ClassifyError::UnknownQuestion(_) => CliError::input(annotations_path, e),
                e => CliError::invariant(format!("scene {}: {e}", a.scene_id)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnswerReport {
        ledger_fingerprint: summaries.first().map(|s| s.ledger_fingerprint.clone()),
        parameters: summaries.first().map(|s| s.parameters.clone()),
        answers,
    })
}

pub fn questions(annotations: &Path, summaries: &Path, out: &Path) -> Result<PathBuf> {
    let list = load_annotations(annotations)?;
    let summaries = load_summaries(summaries)?;
    let report = answer_annotations(&list, &summaries, annotations)?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write(out.to_path_buf(), &report.to_json())
}

fn ledger_header(summary: &SceneSummary, kind: &str) -> String {
    let mut h = format!("# scene_id={}\n# series={kind}\n", summary.scene_id);
    for (k, v) in summary.parameters.entries() {
        let _ = writeln!(h, "# {k}={v}");
    }
    let _ = writeln!(h, "# ledger_fingerprint={}", summary.ledger_fingerprint);
    h
}

/// Per-frame series selectable for export.
pub const SERIES: [&str; 3] = ["speed", "angular_variation", "collectivity"];

/// Time series (`pedestrian_id,frame,value`) per feature and one score table
/// per scene, each headed by the full parameter ledger.
pub fn export_csv(summaries_dir: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let summaries = if summaries_dir.is_dir() {
        load_summaries(summaries_dir)?
    } else {
        Vec::new()
    };
    if summaries.is_empty() {
        return Err(CliError::invariant(format!(
            "no summaries in {}; run `crowdlens analyze` first",
            summaries_dir.display()
        )));
    }
    create_dir(out)?;
    let mut written = Vec::new();
    for s in &summaries {
        let stem = file_stem(&s.scene_id);
        for series in SERIES {
            let mut body = ledger_header(s, series);
            body.push_str("pedestrian_id,frame,value\n");
            for p in &s.pedestrians {
                for f in &p.frames {
                    let v = match series {
                        "speed" => f.speed,
                        "angular_variation" => f.angular_variation,
                        _ => f.collectivity,
                    };
                    let _ = writeln!(body, "{},{},{v}", p.pedestrian_id, f.frame);
                }
            }
            written.push(write(out.join(format!("{stem}.{series}.csv")), &body)?);
        }
        let mut body = ledger_header(s, "scores");
        body.push_str(
            "pedestrian_id,O,C,E,A,N,fear,happiness,sadness,anger,socialization,isolation,collectivity,dominant_emotion\n",
        );
        for p in &s.pedestrians {
            let (o, e, v) = (&p.ocean, &p.emotions, &p.vector);
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{:?}",
                p.pedestrian_id,
                o.O,
                o.C,
                o.E,
                o.A,
                o.N,
                e.fear,
                e.happiness,
                e.sadness,
                e.anger,
                v.socialization,
                v.isolation,
                v.collectivity,
                p.dominant_emotion
            );
        }
        written.push(write(out.join(format!("{stem}.scores.csv")), &body)?);
    }
    Ok(written)
}

/// Summaries for the server: `*.summary.json` files are used as they are,
/// tracking files are analyzed with `cfg`.
pub fn load_scene_dir(dir: &Path, cfg: &AnalysisConfig) -> Result<Vec<SceneSummary>> {
    let mut summaries = load_summaries(dir)?;
    let scenes = load_scenes(dir)?;
    summaries.extend(summarize_all(&scenes, cfg)?);
    let mut seen = BTreeSet::new();
    for s in &summaries {
        if !seen.insert(s.scene_id.as_str()) {
            return Err(CliError::invariant(format!(
                "scene id {:?} is provided twice",
                s.scene_id
            )));
        }
    }
    Ok(summaries)
}

/// Demo dataset: the three highlighted-pedestrian scenarios and six random
/// scenes shaped like the dataset videos under `scenes/`, plus `annotations.json`.
pub fn synth(out: &Path, frames: u32) -> Result<Vec<PathBuf>> {
    let scenes_dir = out.join("scenes");
    create_dir(&scenes_dir)?;
    let mut scenes = synthetic::scenario_scenes();
    scenes.extend(
        CULTURAL_CROWDS_VIDEOS
            .iter()
            .enumerate()
            .map(|(i, v)| synthetic::video_scene(v, frames, i as u64 + 1)),
    );
    let mut written = scenes
        .iter()
        .map(|s| {
            write(
                scenes_dir.join(format!("{}.csv", file_stem(s.scene_id()))),
                &write_csv(s),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ann =
        serde_json::to_string_pretty(&synthetic::scenario_annotations()).expect("serializes");
    ann.push('\n');
    written.push(write(out.join("annotations.json"), &ann)?);
    Ok(written)
}
