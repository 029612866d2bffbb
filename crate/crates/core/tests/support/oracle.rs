//! Straightforward reference implementation of per-frame collectivity, written
//! directly from positions with no shared code.

use std::collections::BTreeMap;

/// (pedestrian, frame) -> ϕ for a gap-free scene given as id -> [(frame, x, y)].
pub fn collectivity_oracle(
    tracks: &BTreeMap<u32, Vec<(u32, f64, f64)>>,
    gamma: f64,
    beta: f64,
    w1: f64,
    w2: f64,
) -> BTreeMap<(u32, u32), f64> {
    // speed and heading per (id, frame)
    let mut motion: BTreeMap<(u32, u32), (f64, f64)> = BTreeMap::new();
    for (&id, samples) in tracks {
        let mut last_heading: Option<f64> = None;
        for k in 0..samples.len() {
            let j = if k == 0 { 1.min(samples.len() - 1) } else { k };
            let (dx, dy) = if samples.len() < 2 {
                (0.0, 0.0)
            } else {
                (
                    samples[j].1 - samples[j - 1].1,
                    samples[j].2 - samples[j - 1].2,
                )
            };
            let speed = (dx * dx + dy * dy).sqrt();
            if speed > 1e-12 {
                let mut h = dy.atan2(dx) * 180.0 / std::f64::consts::PI;
                if h <= -180.0 {
                    h += 360.0;
                }
                last_heading = Some(h);
            }
            motion.insert((id, samples[k].0), (speed, last_heading.unwrap_or(0.0)));
        }
    }
    let mut by_frame: BTreeMap<u32, Vec<(u32, f64, f64)>> = BTreeMap::new();
    for (&(id, frame), &(s, h)) in &motion {
        by_frame.entry(frame).or_default().push((id, s, h));
    }
    let mut out = BTreeMap::new();
    for (frame, present) in &by_frame {
        for &(id, s_i, h_i) in present {
            let others: Vec<(f64, f64)> = present
                .iter()
                .filter(|(j, _, _)| *j != id)
                .map(|&(_, s, h)| (s, h))
                .collect();
            let phi = if others.is_empty() {
                0.0
            } else {
                let sum: f64 = others
                    .iter()
                    .map(|&(s_j, h_j)| {
                        let mut dh = (h_i - h_j).abs() % 360.0;
                        if dh > 180.0 {
                            dh = 360.0 - dh;
                        }
                        let w = w1 * (s_i - s_j).abs() / 0.08 + w2 * dh / 180.0;
                        gamma * (-beta * w * w).exp()
                    })
                    .sum();
                (sum / others.len() as f64).clamp(0.0, 1.0)
            };
            out.insert((id, *frame), phi);
        }
    }
    out
}
