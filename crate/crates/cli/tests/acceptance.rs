//! Acceptance suite: one PASS/FAIL line per criterion, each checked against
//! its tolerance and time budget. Exits non-zero if any criterion fails.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use crowdlens_core::classify::{
    answer_question, classify_animation, classify_density, AnimationState, DensityLevel,
};
use crowdlens_core::features::{
    extract_frame_features, kinematics, CollectivityParams, PTS_M_PER_FRAME,
};
use crowdlens_core::personality::{
    socialization_level, Emotion, EmotionMappingTable, Factor, Polarity, SocialSurrogateParams,
};
use crowdlens_core::synthetic::{random_scene, scenario_annotations, scenario_scenes};
use crowdlens_core::trajectory::{apply_transform, CoordinateTransform, DEFAULT_FPS};
use crowdlens_core::{analyze_scene, AnalysisConfig, SceneAnalysis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    check: fn() -> Outcome,
}

fn emotion_table() -> Outcome {
    use Emotion::*;
    use Factor::*;
    use Polarity::*;
    // rows: factor and polarity; columns: fear, happiness, sadness, anger
    let expected: [(Factor, Polarity, [i8; 4]); 10] = [
        (O, Positive, [0, 0, 0, -1]),
        (O, Negative, [0, 0, 0, 1]),
        (C, Positive, [-1, 0, 0, 0]),
        (C, Negative, [1, 0, 0, 0]),
        (E, Positive, [-1, 1, -1, -1]),
        (E, Negative, [1, 0, 0, 0]),
        (A, Positive, [0, 0, 0, -1]),
        (A, Negative, [0, 0, 0, 1]),
        (N, Positive, [1, -1, 1, 1]),
        (N, Negative, [-1, 1, -1, -1]),
    ];
    let table = EmotionMappingTable::default();
    let mut checked = 0;
    for (f, p, row) in expected {
        for (e, want) in [Fear, Happiness, Sadness, Anger].into_iter().zip(row) {
            let got = table.entry(f, p, e);
            if got != want {
                return Err(format!("{f:?}{p:?} {e:?}: got {got}, want {want}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked}/40 entries equal"))
}

fn animation_thresholds() -> Outcome {
    let just_below = f64::from_bits(0.08f64.to_bits() - 1);
    let cases = [
        (0.0, AnimationState::Idle),
        (0.05, AnimationState::Walk),
        (0.08, AnimationState::Run),
        (0.0799, AnimationState::Walk),
        (just_below, AnimationState::Walk),
    ];
    for (s, want) in cases {
        let got = classify_animation(s).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("speed {s}: got {got:?}, want {want:?}"));
        }
    }
    Ok("0→Idle 0.05→Walk 0.08→Run 0.0799…→Walk".into())
}

fn pts_conversion() -> Outcome {
    let mps = PTS_M_PER_FRAME * f64::from(DEFAULT_FPS);
    let diff = (mps - 2.0).abs();
    if diff <= 0.1 {
        Ok(format!(
            "{PTS_M_PER_FRAME} m/frame × {DEFAULT_FPS} fps = {mps:.2} m/s, |Δ| = {diff:.2} ≤ 0.1"
        ))
    } else {
        Err(format!("|{mps} - 2| = {diff} > 0.1"))
    }
}

fn density_labels() -> Outcome {
    use DensityLevel::*;
    let counts = [12, 10, 16, 15, 25, 34];
    let got: Vec<DensityLevel> = counts.iter().map(|&n| classify_density(n)).collect();
    if got == [Low, Low, Low, Low, Medium, High] {
        Ok(format!("{counts:?} → {got:?}"))
    } else {
        Err(format!("{counts:?} → {got:?}"))
    }
}

fn collectivity_oracle() -> Outcome {
    let p = CollectivityParams::default();
    let mut worst = 0.0f64;
    let mut values = 0usize;
    for seed in 0..100u64 {
        let n = 1 + (seed as usize * 17) % 50;
        let scene = random_scene("oracle", n, 100, 1000 + seed);
        let tracks: BTreeMap<u32, Vec<(u32, f64, f64)>> = scene
            .trajectories
            .iter()
            .map(|t| {
                (
                    t.pedestrian_id,
                    t.samples
                        .iter()
                        .map(|s| (s.frame, s.position.x, s.position.y))
                        .collect(),
                )
            })
            .collect();
        let want = oracle::collectivity_oracle(&tracks, p.gamma, p.beta, p.w1, p.w2);
        let got = extract_frame_features(&scene, &p).map_err(|e| e.to_string())?;
        if got.len() != want.len() {
            return Err(format!(
                "seed {seed}: {} values vs {} from the oracle",
                got.len(),
                want.len()
            ));
        }
        for f in got {
            let w = want.get(&(f.pedestrian_id, f.frame)).ok_or_else(|| {
                format!(
                    "seed {seed}: oracle lacks ({}, {})",
                    f.pedestrian_id, f.frame
                )
            })?;
            worst = worst.max((f.collectivity - w).abs());
            values += 1;
        }
    }
    if worst <= 1e-9 {
        Ok(format!(
            "100 scenes, {values} values, max |Δ| = {worst:e} ≤ 1e-9"
        ))
    } else {
        Err(format!("max |Δ| = {worst:e} > 1e-9"))
    }
}

fn isolation_complement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = SocialSurrogateParams::default();
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let s = socialization_level(
            rng.gen_range(-0.5..1.5),
            rng.gen_range(-1.0..25.0),
            rng.gen_range(0.0..40.0),
            &p,
        );
        worst = worst.max((s.isolation() + s.socialization() - 1.0).abs());
    }
    if worst <= 1e-12 {
        Ok(format!("10^5 inputs, max |φ + ϑ - 1| = {worst:e}"))
    } else {
        Err(format!("max |φ + ϑ - 1| = {worst:e} > 1e-12"))
    }
}

fn scenario_answers() -> Outcome {
    use crowdlens_core::classify::Answer::*;
    let expected = [
        ("Q1", Red),
        ("Q2", Red),
        ("Q3", Yellow),
        ("Q4", Red),
        ("Q5", Yellow),
        ("Q6", Yellow),
        ("Q7", Yellow),
    ];
    let cfg = AnalysisConfig::default();
    let analyses: HashMap<String, SceneAnalysis> = scenario_scenes()
        .iter()
        .map(|s| {
            Ok((
                s.scene_id().to_string(),
                analyze_scene(s, &cfg).map_err(|e| e.to_string())?,
            ))
        })
        .collect::<Result<_, String>>()?;
    let mut correct = 0;
    let mut detail = Vec::new();
    for (ann, (q, want)) in scenario_annotations().iter().zip(expected) {
        assert_eq!(ann.question_key, q);
        let a = answer_question(ann, &analyses[&ann.scene_id], &cfg.bands)
            .map_err(|e| e.to_string())?;
        if a.answer == want {
            correct += 1;
        } else {
            detail.push(format!(
                "{q}: got {:?} ({:.3} vs {:.3}), want {want:?}",
                a.answer, a.yellow_score, a.red_score
            ));
        }
    }
    if correct == 7 {
        Ok("7/7 answers match".into())
    } else {
        Err(format!("{correct}/7; {}", detail.join("; ")))
    }
}

fn geometric_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_alpha, mut worst_speed) = (0.0f64, 0.0f64);
    for seed in 0..100u64 {
        let scene = random_scene("inv", 1, 100, 5000 + seed);
        let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (s, c) = theta.sin_cos();
        let rot = CoordinateTransform::new([c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
            .map_err(|e| e.to_string())?;
        let (tx, ty) = (rng.gen_range(-500.0..500.0), rng.gen_range(-500.0..500.0));
        let shift = CoordinateTransform::new([1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0])
            .map_err(|e| e.to_string())?;
        let base = kinematics(&scene.trajectories[0]).map_err(|e| e.to_string())?;
        let rotated = apply_transform(&scene, &rot).map_err(|e| e.to_string())?;
        let shifted = apply_transform(&scene, &shift).map_err(|e| e.to_string())?;
        let kr = kinematics(&rotated.trajectories[0]).map_err(|e| e.to_string())?;
        let ks = kinematics(&shifted.trajectories[0]).map_err(|e| e.to_string())?;
        for ((b, r), t) in base.iter().zip(&kr).zip(&ks) {
            worst_alpha = worst_alpha.max((b.angular_variation - r.angular_variation).abs());
            worst_speed = worst_speed.max((b.speed - t.speed).abs());
        }
    }
    if worst_alpha <= 1e-9 && worst_speed <= 1e-9 {
        Ok(format!("100 trajectories, rotation max |Δα| = {worst_alpha:e}, translation max |Δs| = {worst_speed:e}"))
    } else {
        Err(format!(
            "max |Δα| = {worst_alpha:e}, max |Δs| = {worst_speed:e}"
        ))
    }
}

fn run_cli(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_crowdlens"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "crowdlens {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn read_dir_bytes(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let p = e.map_err(|e| e.to_string())?.path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        out.insert(name, std::fs::read(&p).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    run_cli(&["synth", "--out", "demo"], dir)?;
    run_cli(
        &[
            "analyze",
            "--input",
            "demo/scenes",
            "--out",
            "a",
            "--questions",
            "demo/annotations.json",
        ],
        dir,
    )?;
    run_cli(
        &[
            "analyze",
            "--input",
            "demo/scenes",
            "--out",
            "b",
            "--questions",
            "demo/annotations.json",
        ],
        dir,
    )?;
    let (a, b) = (
        read_dir_bytes(&dir.join("a"))?,
        read_dir_bytes(&dir.join("b"))?,
    );
    if a.is_empty() {
        return Err("no output files".into());
    }
    if a == b {
        Ok(format!("{} files byte-identical across two runs", a.len()))
    } else {
        let differing: Vec<&String> = a.keys().filter(|k| a.get(*k) != b.get(*k)).collect();
        Err(format!("differing files: {differing:?}"))
    }
}

fn main() {
    let criteria = [
        Criterion {
            name: "emotion mapping table",
            budget: Duration::from_secs(1),
            check: emotion_table,
        },
        Criterion {
            name: "animation thresholds",
            budget: Duration::from_secs(1),
            check: animation_thresholds,
        },
        Criterion {
            name: "PTS conversion",
            budget: Duration::from_secs(1),
            check: pts_conversion,
        },
        Criterion {
            name: "density labels",
            budget: Duration::from_secs(1),
            check: density_labels,
        },
        Criterion {
            name: "collectivity oracle",
            budget: Duration::from_secs(30),
            check: collectivity_oracle,
        },
        Criterion {
            name: "isolation complement",
            budget: Duration::from_secs(5),
            check: isolation_complement,
        },
        Criterion {
            name: "scenario reproduction",
            budget: Duration::from_secs(10),
            check: scenario_answers,
        },
        Criterion {
            name: "geometric invariances",
            budget: Duration::from_secs(10),
            check: geometric_invariance,
        },
        Criterion {
            name: "determinism",
            budget: Duration::from_secs(30),
            check: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.check)();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {:?} budget", c.budget)),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:<24} {:>9.3}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64()
        );
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
