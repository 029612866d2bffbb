use std::collections::HashMap;

use crowdlens_core::classify::{answer_question, Answer};
use crowdlens_core::synthetic::{scenario_annotations, scenario_scenes};
use crowdlens_core::{analyze_scene, AnalysisConfig, SceneAnalysis};

fn expected(q: &str) -> Answer {
    match q {
        "Q1" | "Q2" | "Q4" => Answer::Red,
        _ => Answer::Yellow,
    }
}

#[test]
fn highlighted_questions_match_reference_answers() {
    let cfg = AnalysisConfig::default();
    let analyses: HashMap<String, SceneAnalysis> = scenario_scenes()
        .iter()
        .map(|s| (s.scene_id().to_string(), analyze_scene(s, &cfg).unwrap()))
        .collect();
    let mut wrong = Vec::new();
    for ann in scenario_annotations() {
        let a = answer_question(&ann, &analyses[&ann.scene_id], &cfg.bands).unwrap();
        println!(
            "{} {} {:?}: yellow {:.3} red {:.3} -> {:?}",
            a.scene_id, a.question_key, a.trait_key, a.yellow_score, a.red_score, a.answer
        );
        if a.answer != expected(&ann.question_key) {
            wrong.push(ann.question_key.clone());
        }
    }
    assert!(wrong.is_empty(), "mismatched: {wrong:?}");
}
