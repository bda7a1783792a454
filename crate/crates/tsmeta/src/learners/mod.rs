//! The trained learner bundle: feature standardizer, the model-selection
//! random forest, one hyper-parameter network per model, and the
//! optional matrix-factorization ranker, with on-disk persistence.
//!
//! Directory layout: `standardizer.json`, `forest.json`,
//! `mtl_<MODEL>.json` for each of the six models, `mf.json` when
//! trained, and `manifest.json` carrying the schema version, training
//! configuration echo, and the training series ids.

pub mod forest;
pub mod mf;
pub mod mtl;
pub mod standardize;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

pub use forest::{predict_model, train_forest, RandomForest};
pub use mf::{mf_fit, mf_rank, MFModel};
pub use mtl::{predict_hparams, train_mtl, MultiTaskNet, Target, TrainOptions};
pub use standardize::{fit_standardizer, Standardizer};

use crate::metadata::MetaRecord;
use crate::models::ModelId;
use crate::tuning::HyperParamSpace;

pub const LEARNER_SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("need at least 2 records, got {0}")]
    TooFewRecords(usize),
    #[error("schema mismatch in {path}: found {found}, expected {expected}")]
    SchemaMismatch {
        path: String,
        found: String,
        expected: String,
    },
    #[error("corrupt learner file {path}: {reason}")]
    CorruptFile { path: String, reason: String },
    #[error(transparent)]
    Mtl(#[from] mtl::MtlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub tool_version: String,
    pub seed: u64,
    pub train_ids: Vec<String>,
    /// Training configuration echo for provenance.
    pub config: serde_json::Value,
    /// Features are standardized before both learners.
    pub standardized: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Learners {
    pub manifest: Manifest,
    pub standardizer: Standardizer,
    pub forest: RandomForest,
    pub mtls: BTreeMap<ModelId, MultiTaskNet>,
    pub mf: Option<MFModel>,
}

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    pub s: f64,
    pub seed: u64,
    pub with_mf: bool,
    pub mf_lambda: f64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            n_trees: 100,
            max_depth: 12,
            epochs: 200,
            lr: 0.05,
            batch: 32,
            s: 1.0,
            seed: 0,
            with_mf: false,
            mf_lambda: 1.0,
        }
    }
}

/// Train the full bundle from meta records: standardizer, then the
/// best-model forest, then one hyper-parameter net per model on the
/// records where that model fit. Models with no usable rows keep their
/// initialization and are noted in the manifest.
pub fn train_learners(records: &[MetaRecord], cfg: &LearnerConfig) -> Result<Learners, LearnError> {
    let standardizer = fit_standardizer(records)?;
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| standardizer.apply(&r.features))
        .collect();
    let labels: Vec<usize> = records.iter().map(|r| r.best_model.class_index()).collect();
    let forest = train_forest(
        &rows,
        &labels,
        ModelId::ALL.len(),
        cfg.n_trees,
        cfg.max_depth,
        cfg.seed,
    );
    let mut notes = Vec::new();
    if forest.degenerate {
        notes.push("single-class training set: forest is constant".to_string());
    }

    let opts = TrainOptions {
        epochs: cfg.epochs,
        lr: cfg.lr,
        batch: cfg.batch,
        momentum: 0.9,
    };
    let mut mtls = BTreeMap::new();
    for model in ModelId::ALL {
        let space = HyperParamSpace::default_for(model);
        let mut inputs = Vec::new();
        let mut targets = Vec::new();
        for (record, row) in records.iter().zip(&rows) {
            let outcome = &record.per_model[&model];
            if outcome.failed {
                continue;
            }
            let Some(params) = &outcome.params else {
                continue;
            };
            let assignment = params.into_assignment(model);
            match mtl::targets_for(&space, &assignment) {
                Ok(t) => {
                    inputs.push(row.clone());
                    targets.push(t);
                }
                Err(_) => continue,
            }
        }
        let net = if inputs.is_empty() {
            notes.push(format!("{model}: no training rows, untrained head"));
            MultiTaskNet::new(&space, cfg.s, cfg.seed)
        } else {
            let (net, _) = train_mtl(&space, &inputs, &targets, cfg.s, opts, cfg.seed)?;
            net
        };
        mtls.insert(model, net);
    }

    let mf = if cfg.with_mf {
        let a: Vec<Vec<Option<f64>>> = records
            .iter()
            .map(|r| {
                ModelId::ALL
                    .iter()
                    .map(|m| {
                        let outcome = &r.per_model[m];
                        if outcome.failed {
                            None
                        } else {
                            outcome.mape
                        }
                    })
                    .collect()
            })
            .collect();
        match mf_fit(&a, &rows, &ModelId::ALL, cfg.mf_lambda) {
            Ok(model) => Some(model),
            Err(e) => {
                notes.push(format!("matrix factorization skipped: {e}"));
                None
            }
        }
    } else {
        None
    };

    let manifest = Manifest {
        schema: LEARNER_SCHEMA_VERSION.to_string(),
        tool_version: crate::TOOL_VERSION.to_string(),
        seed: cfg.seed,
        train_ids: records.iter().map(|r| r.id.clone()).collect(),
        config: serde_json::json!({
            "n_trees": cfg.n_trees,
            "max_depth": cfg.max_depth,
            "epochs": cfg.epochs,
            "lr": cfg.lr,
            "batch": cfg.batch,
            "s": cfg.s,
            "with_mf": cfg.with_mf,
            "mf_lambda": cfg.mf_lambda,
        }),
        standardized: true,
        notes,
    };
    Ok(Learners {
        manifest,
        standardizer,
        forest,
        mtls,
        mf,
    })
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), LearnError> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).map_err(|e| LearnError::CorruptFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    std::fs::write(&path, text)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T, LearnError> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path).map_err(|e| LearnError::CorruptFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| LearnError::CorruptFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn save_learners(dir: &Path, learners: &Learners) -> Result<(), LearnError> {
    std::fs::create_dir_all(dir)?;
    write_json(dir, "manifest.json", &learners.manifest)?;
    write_json(dir, "standardizer.json", &learners.standardizer)?;
    write_json(dir, "forest.json", &learners.forest)?;
    for (model, net) in &learners.mtls {
        write_json(dir, &format!("mtl_{model}.json"), net)?;
    }
    if let Some(mf) = &learners.mf {
        write_json(dir, "mf.json", mf)?;
    }
    Ok(())
}

pub fn load_learners(dir: &Path) -> Result<Learners, LearnError> {
    let manifest: Manifest = read_json(dir, "manifest.json")?;
    if manifest.schema != LEARNER_SCHEMA_VERSION {
        return Err(LearnError::SchemaMismatch {
            path: dir.join("manifest.json").display().to_string(),
            found: manifest.schema,
            expected: LEARNER_SCHEMA_VERSION.to_string(),
        });
    }
    let standardizer = read_json(dir, "standardizer.json")?;
    let forest = read_json(dir, "forest.json")?;
    let mut mtls = BTreeMap::new();
    for model in ModelId::ALL {
        mtls.insert(model, read_json(dir, &format!("mtl_{model}.json"))?);
    }
    let mf_path = dir.join("mf.json");
    let mf = if mf_path.exists() {
        Some(read_json(dir, "mf.json")?)
    } else {
        None
    };
    Ok(Learners {
        manifest,
        standardizer,
        forest,
        mtls,
        mf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{series_from_values, SplitConfig};
    use crate::metadata::build_meta_record;
    use crate::rng::StreamRng;

    /// Small mixed corpus: periodic tiles and noisy ramps.
    fn tiny_corpus(n: usize) -> Vec<MetaRecord> {
        let spaces = HyperParamSpace::all_defaults();
        (0..n)
            .map(|i| {
                let mut rng = StreamRng::new(i as u64).with_str("bundle-corpus");
                let values: Vec<f64> = if i % 2 == 0 {
                    (0..48)
                        .map(|t| 10.0 + [4.0, -1.0, 2.0, -5.0][t % 4] + 0.05 * rng.normal())
                        .collect()
                } else {
                    (0..48)
                        .map(|t| 5.0 + 0.8 * t as f64 + 0.3 * rng.normal())
                        .collect()
                };
                let ts = series_from_values(&format!("c{i:02}"), &values, 4).unwrap();
                build_meta_record(&ts, &spaces, 4, 3, SplitConfig::new(8)).unwrap()
            })
            .collect()
    }

    #[test]
    fn bundle_round_trips_with_identical_predictions() {
        let records = tiny_corpus(12);
        let cfg = LearnerConfig {
            n_trees: 15,
            epochs: 10,
            with_mf: true,
            ..LearnerConfig::default()
        };
        let learners = train_learners(&records, &cfg).unwrap();
        let dir = std::env::temp_dir().join("tsmeta_learner_store_test");
        std::fs::remove_dir_all(&dir).ok();
        save_learners(&dir, &learners).unwrap();
        let back = load_learners(&dir).unwrap();

        let mut rng = StreamRng::new(5).with_str("probe");
        for _ in 0..100 {
            let x: Vec<f64> = (0..40).map(|_| rng.normal()).collect();
            assert_eq!(
                predict_model(&learners.forest, &x),
                predict_model(&back.forest, &x)
            );
            for model in ModelId::ALL {
                let space = HyperParamSpace::default_for(model);
                let a = predict_hparams(&learners.mtls[&model], &x, &space);
                let b = predict_hparams(&back.mtls[&model], &x, &space);
                assert_eq!(a, b, "{model}");
            }
            let ra = mf_rank(learners.mf.as_ref().unwrap(), &x);
            let rb = mf_rank(back.mf.as_ref().unwrap(), &x);
            assert_eq!(ra, rb);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let records = tiny_corpus(6);
        let cfg = LearnerConfig {
            n_trees: 5,
            epochs: 2,
            ..LearnerConfig::default()
        };
        let learners = train_learners(&records, &cfg).unwrap();
        let dir = std::env::temp_dir().join("tsmeta_learner_truncate_test");
        std::fs::remove_dir_all(&dir).ok();
        save_learners(&dir, &learners).unwrap();
        let forest_path = dir.join("forest.json");
        let bytes = std::fs::read(&forest_path).unwrap();
        std::fs::write(&forest_path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(
            load_learners(&dir),
            Err(LearnError::CorruptFile { .. })
        ));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn schema_mismatch_detected() {
        let records = tiny_corpus(6);
        let cfg = LearnerConfig {
            n_trees: 5,
            epochs: 2,
            ..LearnerConfig::default()
        };
        let mut learners = train_learners(&records, &cfg).unwrap();
        learners.manifest.schema = "v0".to_string();
        let dir = std::env::temp_dir().join("tsmeta_learner_schema_test");
        std::fs::remove_dir_all(&dir).ok();
        save_learners(&dir, &learners).unwrap();
        assert!(matches!(
            load_learners(&dir),
            Err(LearnError::SchemaMismatch { .. })
        ));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn manifest_records_training_ids() {
        let records = tiny_corpus(8);
        let cfg = LearnerConfig {
            n_trees: 5,
            epochs: 2,
            ..LearnerConfig::default()
        };
        let learners = train_learners(&records, &cfg).unwrap();
        assert_eq!(learners.manifest.train_ids.len(), 8);
        assert!(learners.manifest.standardized);
        assert_eq!(learners.mtls.len(), 6);
    }
}
