use crowdlens_core::classify::{classify_density, DensityLevel};
use crowdlens_core::dataset::CULTURAL_CROWDS_VIDEOS;
use crowdlens_core::synthetic::video_scene;
use crowdlens_core::trajectory::{parse_tracking_file, write_csv, TrackFormat, TrajectoryError};

#[test]
fn video_headers_parse_to_published_counts() {
    let counts: Vec<usize> = CULTURAL_CROWDS_VIDEOS
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let csv = write_csv(&video_scene(v, 48, i as u64));
            assert!(csv.contains(&format!("# pedestrians={}", v.pedestrians)));
            let scene = parse_tracking_file(csv.as_bytes(), TrackFormat::Csv).unwrap();
            assert_eq!(scene.metadata.density_label, Some(v.density));
            scene.metadata.pedestrian_count
        })
        .collect();
    assert_eq!(counts, [12, 10, 16, 15, 25, 34]);
    let levels: Vec<DensityLevel> = counts.iter().map(|&n| classify_density(n)).collect();
    use DensityLevel::*;
    assert_eq!(levels, [Low, Low, Low, Low, Medium, High]);
}

#[test]
fn declared_count_must_match() {
    let csv = write_csv(&video_scene(&CULTURAL_CROWDS_VIDEOS[0], 10, 1))
        .replace("# pedestrians=12", "# pedestrians=13");
    assert!(matches!(
        parse_tracking_file(csv.as_bytes(), TrackFormat::Csv),
        Err(TrajectoryError::CountMismatch { .. })
    ));
}
