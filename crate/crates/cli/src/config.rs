//! Effective analysis parameters: command-line flag > config file > default.
//!
//! The config file is TOML; every key is optional.
//!
//! ```toml
//! registry = "items.json"      # relative to the config file
//!
//! [collectivity]
//! gamma = 1.0
//! beta = 2.77
//! w1 = 0.5                     # w2 = 1 - w1 when only one is given
//!
//! [social]
//! weight_collectivity = 2.0
//! bias = -3.0
//!
//! [comparison]
//! tie = 0.05
//!
//! [density]
//! mode = "count"
//! low_max = 20
//! medium_max = 30
//! ```

use std::path::{Path, PathBuf};

use crowdlens_core::classify::DensityCutpoints;
use crowdlens_core::personality::ItemEquation;
use crowdlens_core::AnalysisConfig;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    registry: Option<PathBuf>,
    #[serde(default)]
    collectivity: CollectivityLayer,
    #[serde(default)]
    social: SocialLayer,
    #[serde(default)]
    comparison: ComparisonLayer,
    density: Option<DensityCutpoints>,
}

/// One precedence layer of the collectivity parameters.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectivityLayer {
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SocialLayer {
    weight_collectivity: Option<f64>,
    weight_proximity: Option<f64>,
    weight_neighbors: Option<f64>,
    bias: Option<f64>,
    d_max: Option<f64>,
    n_cap: Option<u32>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComparisonLayer {
    tie: Option<f64>,
    both_at_least: Option<f64>,
    neither_at_most: Option<f64>,
}

/// Parameters given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub collectivity: CollectivityLayer,
    pub registry: Option<PathBuf>,
    pub config: Option<PathBuf>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Applies one layer. A lone weight implies its complement.
fn apply_collectivity(cfg: &mut AnalysisConfig, layer: &CollectivityLayer) {
    let c = &mut cfg.collectivity;
    set(&mut c.gamma, layer.gamma);
    set(&mut c.beta, layer.beta);
    match (layer.w1, layer.w2) {
        (Some(w1), Some(w2)) => (c.w1, c.w2) = (w1, w2),
        (Some(w1), None) => (c.w1, c.w2) = (w1, 1.0 - w1),
        (None, Some(w2)) => (c.w1, c.w2) = (1.0 - w2, w2),
        (None, None) => {}
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))
}

fn load_registry(path: &Path) -> Result<Vec<ItemEquation>> {
    ItemEquation::load_registry(&read(path)?).map_err(|e| CliError::input(path, e))
}

/// Builds and validates the effective configuration.
pub fn resolve(o: &Overrides) -> Result<AnalysisConfig> {
    let mut cfg = AnalysisConfig::default();
    let mut registry = None;
    if let Some(path) = &o.config {
        let file: FileConfig =
            toml::from_str(&read(path)?).map_err(|e| CliError::input(path, e))?;
        apply_collectivity(&mut cfg, &file.collectivity);
        let s = &mut cfg.social;
        set(&mut s.weight_collectivity, file.social.weight_collectivity);
        set(&mut s.weight_proximity, file.social.weight_proximity);
        set(&mut s.weight_neighbors, file.social.weight_neighbors);
        set(&mut s.bias, file.social.bias);
        set(&mut s.d_max, file.social.d_max);
        set(&mut s.n_cap, file.social.n_cap);
        let b = &mut cfg.bands;
        set(&mut b.tie, file.comparison.tie);
        set(&mut b.both_at_least, file.comparison.both_at_least);
        set(&mut b.neither_at_most, file.comparison.neither_at_most);
        set(&mut cfg.density, file.density);
        let base = path.parent().unwrap_or(Path::new("."));
        registry = file.registry.map(|r| base.join(r));
    }
    apply_collectivity(&mut cfg, &o.collectivity);
    if let Some(r) = o.registry.clone().or(registry) {
        cfg.registry = load_registry(&r)?;
    }
    cfg.validate()
        .map_err(|e| CliError::invariant(e.to_string()))?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(w1: Option<f64>, w2: Option<f64>) -> Overrides {
        Overrides {
            collectivity: CollectivityLayer {
                w1,
                w2,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn lone_weight_implies_complement() {
        let c = resolve(&flags(Some(0.7), None)).unwrap().collectivity;
        assert_eq!((c.w1, c.w2), (0.7, 1.0 - 0.7));
        let c = resolve(&flags(None, Some(0.25))).unwrap().collectivity;
        assert_eq!((c.w1, c.w2), (0.75, 0.25));
    }

    #[test]
    fn inconsistent_weights_are_invariant_errors() {
        let e = resolve(&flags(Some(0.7), Some(0.7))).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(
            &path,
            "[collectivity]\nbeta = 1.5\ngamma = 0.9\n[social]\nbias = -2.0\n",
        )
        .unwrap();
        let mut o = Overrides {
            config: Some(path),
            ..Default::default()
        };
        o.collectivity.beta = Some(3.0);
        let cfg = resolve(&o).unwrap();
        assert_eq!(cfg.collectivity.beta, 3.0);
        assert_eq!(cfg.collectivity.gamma, 0.9);
        assert_eq!(cfg.social.bias, -2.0);
        assert_eq!(cfg.collectivity.w1, 0.5);
    }

    #[test]
    fn unknown_key_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[collectivity]\nbetta = 1.5\n").unwrap();
        let e = resolve(&Overrides {
            config: Some(path),
            ..Default::default()
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
