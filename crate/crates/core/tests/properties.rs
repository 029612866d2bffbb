use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use crowdlens_core::classify::{
    answer_question, classify_animation, AnimationState, HighlightAnnotation, PedestrianScores,
};
use crowdlens_core::features::{
    collectivity, extract_frame_features, kinematics, pair_similarity, CollectivityParams,
    FrameFeatures,
};
use crowdlens_core::personality::{
    compare_pedestrians, default_registry, emotions_from_ocean, ocean_from_items,
    socialization_level, Comparison, ComparisonBands, EmotionMappingTable, Factor, ItemEquation,
    OceanScores, SocialSurrogateParams, Trait, TraitScores,
};
use crowdlens_core::synthetic::random_scene;
use crowdlens_core::trajectory::{
    apply_transform, fill_gaps, parse_tracking_file, write_csv, write_json, CoordinateTransform,
    Point2, SceneMetadata, TrackFormat, TrackedScene, Trajectory, TrajectorySample,
};
use crowdlens_core::FeatureVector;

fn rigid(theta: f64, tx: f64, ty: f64) -> CoordinateTransform {
    let (s, c) = theta.sin_cos();
    CoordinateTransform::new([c, -s, tx, s, c, ty, 0.0, 0.0, 1.0]).unwrap()
}

/// Sparse track with strictly increasing frames.
fn sparse_track() -> impl Strategy<Value = Trajectory> {
    prop::collection::vec((1u32..5, -50.0f64..50.0, -50.0f64..50.0), 2..20).prop_map(|steps| {
        let mut frame = 0;
        let samples = steps
            .into_iter()
            .map(|(gap, x, y)| {
                frame += gap;
                TrajectorySample::new(frame, x, y)
            })
            .collect();
        Trajectory::new(1, samples)
    })
}

fn frame_features(speed: f64, heading: f64) -> FrameFeatures {
    FrameFeatures {
        pedestrian_id: 0,
        frame: 0,
        position: Point2::new(0.0, 0.0),
        speed,
        heading,
        angular_variation: 0.0,
        mean_distance: 0.0,
        social_neighbors: 0,
        collectivity: 0.0,
    }
}

fn unit_ocean() -> impl Strategy<Value = OceanScores> {
    prop::array::uniform5(0.0f64..=1.0).prop_map(|[o, c, e, a, n]| OceanScores {
        O: o,
        C: c,
        E: e,
        A: a,
        N: n,
    })
}

fn trait_scores() -> impl Strategy<Value = TraitScores> {
    (unit_ocean(), 0.0f64..=1.0).prop_map(|(o, s)| TraitScores {
        ocean: Some(o),
        emotions: Some(emotions_from_ocean(&o, &EmotionMappingTable::default())),
        socialization: Some(s),
    })
}

struct Pair(TraitScores, TraitScores);

impl PedestrianScores for Pair {
    fn trait_scores(&self, id: u32) -> Option<TraitScores> {
        match id {
            1 => Some(self.0),
            2 => Some(self.1),
            _ => None,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_and_json_round_trip(seed in any::<u64>(), n in 1usize..8) {
        let scene = random_scene("rt", n, 30, seed);
        let csv = parse_tracking_file(write_csv(&scene).as_bytes(), TrackFormat::Csv).unwrap();
        prop_assert_eq!(&csv, &scene);
        let json = parse_tracking_file(write_json(&scene).as_bytes(), TrackFormat::Json).unwrap();
        prop_assert_eq!(&json, &scene);
    }

    #[test]
    fn transform_then_inverse_is_identity(
        seed in any::<u64>(),
        m in prop::array::uniform6(-3.0f64..3.0),
        g in prop::array::uniform2(-1e-3f64..1e-3),
    ) {
        let t = CoordinateTransform::new([m[0], m[1], m[2], m[3], m[4], m[5], g[0], g[1], 1.0]);
        prop_assume!(t.as_ref().is_ok_and(|t| t.determinant().abs() > 1e-2));
        let t = t.unwrap();
        let scene = random_scene("tf", 4, 20, seed);
        let forward = apply_transform(&scene, &t);
        prop_assume!(forward.is_ok());
        let back = apply_transform(&forward.unwrap(), &t.inverse().unwrap()).unwrap();
        for (a, b) in scene.trajectories.iter().zip(&back.trajectories) {
            for (p, q) in a.samples.iter().zip(&b.samples) {
                prop_assert!(p.position.distance(q.position) <= 1e-9);
            }
        }
    }

    #[test]
    fn fill_gaps_is_idempotent(t in sparse_track()) {
        let once = fill_gaps(&t).unwrap();
        prop_assert_eq!(fill_gaps(&once).unwrap(), once.clone());
        let span = once.samples.last().unwrap().frame - once.samples[0].frame + 1;
        prop_assert_eq!(once.samples.len() as u32, span);
    }

    #[test]
    fn pair_similarity_is_symmetric(
        sa in 0.0f64..0.3, ha in -179.9f64..180.0, sb in 0.0f64..0.3, hb in -179.9f64..180.0,
    ) {
        let p = CollectivityParams::default();
        let (a, b) = (frame_features(sa, ha), frame_features(sb, hb));
        prop_assert_eq!(pair_similarity(&a, &b, &p).unwrap(), pair_similarity(&b, &a, &p).unwrap());
    }

    #[test]
    fn kernel_is_monotone(x in 0.0f64..5.0, dx in 0.0f64..5.0) {
        let p = CollectivityParams::default();
        prop_assert!(p.kernel(x + dx) <= p.kernel(x));
    }

    #[test]
    fn collectivity_drops_as_a_neighbor_diverges(turn in 0.0f64..180.0, extra in 0.0f64..180.0) {
        // pedestrian 3 heads off at an angle; a larger angle means a larger ϖ
        let heading = |deg: f64| {
            let (s, c) = deg.to_radians().sin_cos();
            Trajectory::new(3, vec![TrajectorySample::new(0, 4.0, 4.0), TrajectorySample::new(1, 4.0 + 0.04 * c, 4.0 + 0.04 * s)])
        };
        let build = |deg: f64| {
            TrackedScene::new(SceneMetadata::new("m"), vec![
                Trajectory::new(1, vec![TrajectorySample::new(0, 0.0, 0.0), TrajectorySample::new(1, 0.04, 0.0)]),
                Trajectory::new(2, vec![TrajectorySample::new(0, 0.0, 1.0), TrajectorySample::new(1, 0.03, 1.0)]),
                heading(deg),
            ]).unwrap()
        };
        let p = CollectivityParams::default();
        let near = collectivity(&build(turn), 1, 1, &p).unwrap();
        let far = collectivity(&build((turn + extra).min(180.0)), 1, 1, &p).unwrap();
        prop_assert!(far <= near + 1e-12);
    }

    #[test]
    fn rigid_motion_preserves_speed_and_variation(
        seed in any::<u64>(), theta in -3.2f64..3.2, tx in -100.0f64..100.0, ty in -100.0f64..100.0,
    ) {
        let scene = random_scene("inv", 5, 40, seed);
        let moved = apply_transform(&scene, &rigid(theta, tx, ty)).unwrap();
        for (a, b) in scene.trajectories.iter().zip(&moved.trajectories) {
            for (ka, kb) in kinematics(a).unwrap().iter().zip(&kinematics(b).unwrap()) {
                prop_assert!((ka.speed - kb.speed).abs() <= 1e-9);
                prop_assert!((ka.angular_variation - kb.angular_variation).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn per_frame_feature_ranges(seed in any::<u64>(), n in 1usize..12) {
        let scene = random_scene("rng", n, 40, seed);
        for f in extract_frame_features(&scene, &CollectivityParams::default()).unwrap() {
            prop_assert!(f.speed >= 0.0);
            prop_assert!((0.0..=180.0).contains(&f.angular_variation));
            prop_assert!((0.0..=1.0).contains(&f.collectivity));
            prop_assert!(f.social_neighbors < scene.trajectories.len());
            prop_assert!(classify_animation(f.speed).is_ok());
        }
    }

    #[test]
    fn isolation_complements_socialization(phi in -0.5f64..1.5, d in -1.0f64..20.0, n in 0.0f64..30.0) {
        let s = socialization_level(phi, d, n, &SocialSurrogateParams::default());
        prop_assert_eq!(s.isolation() + s.socialization(), 1.0);
        prop_assert!((0.0..=1.0).contains(&s.socialization()));
    }

    #[test]
    fn socialization_is_monotone(
        phi in 0.0f64..1.0, d in 0.0f64..12.0, n in 0.0f64..12.0,
        dphi in 0.0f64..0.5, dd in 0.0f64..5.0, dn in 0.0f64..5.0,
    ) {
        let p = SocialSurrogateParams::default();
        let base = socialization_level(phi, d, n, &p).socialization();
        prop_assert!(socialization_level(phi + dphi, d, n, &p).socialization() >= base);
        prop_assert!(socialization_level(phi, d, n + dn, &p).socialization() >= base);
        prop_assert!(socialization_level(phi, d + dd, n, &p).socialization() <= base);
    }

    #[test]
    fn min_max_ignores_affine_item_rescaling(
        seed in any::<u64>(), scale in 0.01f64..100.0, shift in -50.0f64..50.0, item in 0usize..5,
    ) {
        let scene = random_scene("aff", 8, 30, seed);
        let a = crowdlens_core::analyze_scene(&scene, &Default::default()).unwrap();
        let vectors: Vec<FeatureVector> = a.pedestrians.iter().map(|p| p.vector).collect();
        let base = default_registry();
        let mut rescaled = base.clone();
        let old = &base[item];
        rescaled[item] = ItemEquation::new(
            old.item_id,
            old.factor,
            &old.description,
            &format!("{scale} * ({}) + {shift}", old.expression()),
        ).unwrap();
        let x = ocean_from_items(&vectors, &base).unwrap();
        let y = ocean_from_items(&vectors, &rescaled).unwrap();
        for (p, q) in x.iter().zip(&y) {
            for f in Factor::ALL {
                prop_assert!((p.get(f) - q.get(f)).abs() <= 1e-9, "{:?}: {} vs {}", f, p.get(f), q.get(f));
            }
        }
    }

    #[test]
    fn comparison_is_antisymmetric(a in trait_scores(), b in trait_scores(), t in 0usize..10) {
        let t = [Trait::O, Trait::C, Trait::E, Trait::A, Trait::N, Trait::Fear, Trait::Happiness,
                 Trait::Sadness, Trait::Anger, Trait::Socialization][t];
        let bands = ComparisonBands::default();
        let ab = compare_pedestrians(&a, &b, t, &bands).unwrap();
        let ba = compare_pedestrians(&b, &a, t, &bands).unwrap();
        prop_assert_eq!(ba, ab.swapped());
        if matches!(ab, Comparison::Both | Comparison::Neither | Comparison::Tie) {
            prop_assert_eq!(ab, ba);
        }
    }

    #[test]
    fn swapping_colors_swaps_answer(a in trait_scores(), b in trait_scores(), q in 1usize..=7) {
        let pair = Pair(a, b);
        let bands = ComparisonBands::default();
        let ann = |yellow, red| HighlightAnnotation {
            scene_id: "s".into(), yellow_id: yellow, red_id: red, question_key: format!("Q{q}"),
        };
        let fwd = answer_question(&ann(1, 2), &pair, &bands).unwrap();
        let rev = answer_question(&ann(2, 1), &pair, &bands).unwrap();
        prop_assert_eq!(rev.answer, fwd.answer.swapped());
    }

    #[test]
    fn fear_rises_with_neuroticism(o in unit_ocean(), dn in 0.0f64..1.0) {
        let table = EmotionMappingTable::default();
        let mut hi = o;
        hi.N = (o.N + dn).min(1.0);
        prop_assert!(emotions_from_ocean(&hi, &table).fear >= emotions_from_ocean(&o, &table).fear - 1e-12);
    }

    #[test]
    fn animation_is_total_over_non_negative(s in 0.0f64..10.0) {
        let expected = if s == 0.0 { AnimationState::Idle } else if s < 0.08 { AnimationState::Walk } else { AnimationState::Run };
        prop_assert_eq!(classify_animation(s).unwrap(), expected);
    }
}

#[test]
fn flipping_neuroticism_mirrors_emotions() {
    let table = EmotionMappingTable::default();
    let mut o = OceanScores::NEUTRAL;
    o.N = 1.0;
    let high = emotions_from_ocean(&o, &table);
    o.N = 0.0;
    let low = emotions_from_ocean(&o, &table);
    assert!(high.fear > 0.5 && low.fear < 0.5);
    assert!(high.sadness > 0.5 && low.sadness < 0.5);
    assert!(high.anger > 0.5 && low.anger < 0.5);
    assert!(high.happiness < 0.5 && low.happiness > 0.5);
    assert_abs_diff_eq!(high.fear - 0.5, 0.5 - low.fear, epsilon = 1e-12);
}
