//! Run configuration: JSON config file, flag overrides, seed resolution
//! through the TSMETA_SEED environment fallback, and the provenance echo
//! written into every output artifact.

use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SEED_ENV: &str = "TSMETA_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Seasonal period attached to ingested series (1 = non-seasonal).
    pub period: usize,
    /// Holdout horizon; None applies the default rule (n/4 capped at two
    /// cycles).
    pub horizon: Option<usize>,
    /// Search budget for exhaustive tuning.
    pub trials: usize,
    pub seed: Option<u64>,
    /// Meta-set train fraction.
    pub p: f64,
    /// Regression-loss divisor in the multi-task total loss.
    pub s: f64,
    pub n_trees: usize,
    pub max_depth: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub jobs: usize,
    pub with_mf: bool,
    pub mf_lambda: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            period: 1,
            horizon: None,
            trials: 20,
            seed: None,
            p: 0.75,
            s: 1.0,
            n_trees: 100,
            max_depth: 12,
            epochs: 200,
            lr: 0.05,
            batch: 32,
            jobs: 1,
            with_mf: false,
            mf_lambda: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// Seed priority: explicit flag/config value, then TSMETA_SEED, then 0.
    pub fn resolved_seed(&self) -> u64 {
        if let Some(seed) = self.seed {
            return seed;
        }
        if let Ok(text) = std::env::var(SEED_ENV) {
            if let Ok(seed) = text.trim().parse() {
                return seed;
            }
        }
        0
    }

    /// Full materialized-config echo for output provenance. The jobs
    /// knob only schedules work and never changes results, so it is
    /// excluded to keep outputs byte-identical at any parallelism.
    pub fn echo(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("config serializes");
        value["seed"] = serde_json::json!(self.resolved_seed());
        value.as_object_mut().unwrap().remove("jobs");
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_materialized() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.trials, 20);
        assert_eq!(cfg.p, 0.75);
        assert_eq!(cfg.s, 1.0);
        assert_eq!(cfg.n_trees, 100);
        let echo = cfg.echo();
        assert_eq!(echo["trials"], 20);
        assert!(echo["seed"].is_u64());
    }

    #[test]
    fn file_overrides_defaults() {
        let dir = std::env::temp_dir().join("tsmeta_config_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.json");
        std::fs::write(&path, r#"{"trials": 7, "p": 0.5}"#).unwrap();
        let cfg = RunConfig::from_file(&path).unwrap();
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.p, 0.5);
        assert_eq!(cfg.epochs, 200);
        std::fs::remove_dir_all(&dir).ok();
    }
}
