//! Offline training-data preparation: per series, the feature vector,
//! each model's best searched parameters and holdout error, and the
//! best-model label; JSON-lines persistence; and the runtime cost model
//! the evaluation report quotes.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

use crate::core::{default_horizon, read_series_csv, SplitConfig, TimeSeries};
use crate::exec::par_map;
use crate::features::{extract_features, FeatureVector};
use crate::models::ModelId;
use crate::pipeline::{HptMode, ModelSelection, Strategy};
use crate::rng::StreamRng;
use crate::tuning::{random_search, HyperParamSpace, ParamMap};

pub const META_SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum MetaError {
    #[error("series {0}: every candidate model failed to fit")]
    AllModelsFailed(String),
    #[error("degenerate split: {train} train / {test} test records")]
    DegenerateSplit { train: usize, test: usize },
    #[error("train fraction p={0} outside (0, 1)")]
    BadFraction(f64),
    #[error("no usable series in {0}")]
    EmptyCorpus(String),
    #[error("meta file {path}: {reason}")]
    BadMetaFile { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One model's searched outcome inside a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutcome {
    pub params: Option<ParamMap>,
    pub mape: Option<f64>,
    pub failed: bool,
}

/// One series' training row: features, per-model outcomes, best label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaRecord {
    pub v: String,
    pub id: String,
    #[serde(flatten)]
    pub features: FeatureVector,
    pub per_model: BTreeMap<ModelId, ModelOutcome>,
    pub best_model: ModelId,
}

impl MetaRecord {
    /// The argmin over non-failed outcomes; map order breaks ties toward
    /// the lexicographically smaller model id.
    pub fn best_of(per_model: &BTreeMap<ModelId, ModelOutcome>) -> Option<ModelId> {
        let mut best: Option<(ModelId, f64)> = None;
        for (&model, outcome) in per_model {
            if outcome.failed {
                continue;
            }
            let err = outcome.mape?;
            match best {
                Some((_, b)) if err >= b => {}
                _ => best = Some((model, err)),
            }
        }
        best.map(|(m, _)| m)
    }
}

/// Exhaustively tune every model on one series (random search with the
/// configured trial budget) and assemble its record. A series where all
/// six models fail is reported for quarantine instead.
pub fn build_meta_record(
    ts: &TimeSeries,
    spaces: &[HyperParamSpace],
    trials: usize,
    seed: u64,
    cfg: SplitConfig,
) -> Result<MetaRecord, MetaError> {
    let features = extract_features(ts);
    let mut per_model = BTreeMap::new();
    for space in spaces {
        let outcome = match random_search(space.model_id, ts, space, trials, seed, cfg) {
            Ok((best, _)) if !best.failed => ModelOutcome {
                params: Some(ParamMap::from_assignment(&best.assignment)),
                mape: best.error,
                failed: false,
            },
            _ => ModelOutcome {
                params: None,
                mape: None,
                failed: true,
            },
        };
        per_model.insert(space.model_id, outcome);
    }
    let best_model = MetaRecord::best_of(&per_model)
        .ok_or_else(|| MetaError::AllModelsFailed(ts.id().to_string()))?;
    Ok(MetaRecord {
        v: META_SCHEMA_VERSION.to_string(),
        id: ts.id().to_string(),
        features,
        per_model,
        best_model,
    })
}

/// Corpus build output: records ordered by series id, quarantined ids,
/// and per-file skips with their reasons.
#[derive(Debug, Default)]
pub struct CorpusBuild {
    pub records: Vec<MetaRecord>,
    pub quarantined: Vec<String>,
    pub skipped: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub period: usize,
    /// Fixed holdout length; None applies the default horizon rule.
    pub horizon: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
}

/// Read every `*.csv` under `dir` (sorted by filename) and build records
/// in parallel. Parse failures are skipped with a reason; series whose
/// models all fail are quarantined. Output ordering follows series id,
/// independent of `jobs`.
pub fn build_corpus(dir: &Path, cfg: &CorpusConfig) -> Result<CorpusBuild, MetaError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "csv").unwrap_or(false))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(MetaError::EmptyCorpus(dir.display().to_string()));
    }
    let mut build = CorpusBuild::default();
    let mut series = Vec::new();
    for path in &paths {
        match read_series_csv(path, cfg.period) {
            Ok(ts) => series.push(ts),
            Err(e) => build
                .skipped
                .push((path.display().to_string(), e.to_string())),
        }
    }
    series.sort_by(|a, b| a.id().cmp(b.id()));
    let spaces = HyperParamSpace::all_defaults();
    let outcomes = par_map(&series, cfg.jobs, |_, ts| {
        let h = cfg
            .horizon
            .unwrap_or_else(|| default_horizon(ts.len(), ts.period()));
        build_meta_record(ts, &spaces, cfg.trials, cfg.seed, SplitConfig::new(h))
    });
    for outcome in outcomes {
        match outcome {
            Ok(record) => build.records.push(record),
            Err(MetaError::AllModelsFailed(id)) => build.quarantined.push(id),
            Err(other) => return Err(other),
        }
    }
    if build.records.is_empty() && build.quarantined.is_empty() {
        return Err(MetaError::EmptyCorpus(dir.display().to_string()));
    }
    Ok(build)
}

/// One JSON line per record, already ordered by series id.
pub fn write_meta_file(path: &Path, records: &[MetaRecord]) -> Result<(), MetaError> {
    let mut out = String::new();
    for record in records {
        out.push_str(
            &serde_json::to_string(record).map_err(|e| MetaError::BadMetaFile {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?,
        );
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_meta_file(path: &Path) -> Result<Vec<MetaRecord>, MetaError> {
    let text = std::fs::read_to_string(path)?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: MetaRecord =
            serde_json::from_str(line).map_err(|e| MetaError::BadMetaFile {
                path: path.display().to_string(),
                reason: format!("line {}: {e}", i + 1),
            })?;
        if record.v != META_SCHEMA_VERSION {
            return Err(MetaError::BadMetaFile {
                path: path.display().to_string(),
                reason: format!("schema {} != {}", record.v, META_SCHEMA_VERSION),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Seeded shuffle, first ceil(p*N) records train, rest test. Both sides
/// must be non-empty.
pub fn split_meta(
    records: &[MetaRecord],
    p: f64,
    seed: u64,
) -> Result<(Vec<MetaRecord>, Vec<MetaRecord>), MetaError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MetaError::BadFraction(p));
    }
    let n = records.len();
    let take = (p * n as f64).ceil() as usize;
    if take == 0 || take >= n {
        return Err(MetaError::DegenerateSplit {
            train: take,
            test: n - take,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = StreamRng::new(seed).with_str("meta-split");
    rng.shuffle(&mut order);
    let train = order[..take].iter().map(|&i| records[i].clone()).collect();
    let test = order[take..].iter().map(|&i| records[i].clone()).collect();
    Ok((train, test))
}

/// Unit-cost model: `c` search evaluations per exhaustive tuning, one
/// unit for a random draw and for a learned prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub c: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { c: 20.0 }
    }
}

/// Per-series runtime units for one strategy: the number of models
/// fitted times the per-model tuning cost.
pub fn runtime_units(strategy: Strategy, cm: &CostModel, n_models: usize) -> f64 {
    let selection_factor = match strategy.model_selection {
        ModelSelection::Ensemble => n_models as f64,
        ModelSelection::RandomModel | ModelSelection::SslMs => 1.0,
    };
    let tuning_cost = match strategy.hpt {
        HptMode::Exhaustive => cm.c,
        HptMode::RandomHp | HptMode::SslHpt => 1.0,
    };
    selection_factor * tuning_cost
}

/// Total cost over N series. Learned tuning amortizes: a p-fraction is
/// tuned exhaustively to train the learner, the remainder costs one unit
/// each, so p -> 1 degenerates to exhaustive tuning and p -> 0 to random
/// parameters.
pub fn estimated_cost(
    strategy: Strategy,
    p: f64,
    n: usize,
    cm: &CostModel,
    n_models: usize,
) -> f64 {
    let selection_factor = match strategy.model_selection {
        ModelSelection::Ensemble => n_models as f64,
        ModelSelection::RandomModel | ModelSelection::SslMs => 1.0,
    };
    let n = n as f64;
    let per_strategy = match strategy.hpt {
        HptMode::Exhaustive => cm.c * n,
        HptMode::RandomHp => n,
        HptMode::SslHpt => p * cm.c * n + (1.0 - p) * n,
    };
    selection_factor * per_strategy
}
