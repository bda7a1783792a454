//! Online forecasting paths and the evaluation harnesses: the
//! learned-selection plus learned-parameters path, the median ensemble,
//! the nine-method comparison grid, and the prefix-consistency protocol.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::core::{
    default_horizon, mape, train_test_split, ForecastResult, SplitConfig, TimeSeries,
};
use crate::exec::par_map;
use crate::features::{extract_features, FEATURE_COUNT};
use crate::learners::{predict_hparams, predict_model, Learners};
use crate::metadata::{runtime_units, CostModel};
use crate::models::{self, ModelId};
use crate::numeric::median;
use crate::rng::StreamRng;
use crate::tuning::{random_assignment, random_search, HyperParamAssignment, HyperParamSpace};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("test series also appear in the learner training set: {0:?}")]
    OverlapError(Vec<String>),
    #[error("series {0}: every ensemble member failed to fit")]
    AllModelsFailed(String),
    #[error("bad checkpoint {checkpoint}: {reason}")]
    BadCheckpoint { checkpoint: usize, reason: String },
    #[error("no evaluable series in the corpus")]
    EmptyCorpus,
}

/// How the forecasting model is chosen for a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelSelection {
    Ensemble,
    RandomModel,
    SslMs,
}

/// How hyper-parameters are obtained for a chosen model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HptMode {
    Exhaustive,
    RandomHp,
    SslHpt,
}

/// One cell of the selection x tuning grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy {
    pub model_selection: ModelSelection,
    pub hpt: HptMode,
}

impl Strategy {
    /// The nine strategies in report order: selection outer, tuning
    /// inner.
    pub fn all_nine() -> [Strategy; 9] {
        let selections = [
            ModelSelection::Ensemble,
            ModelSelection::RandomModel,
            ModelSelection::SslMs,
        ];
        let modes = [HptMode::Exhaustive, HptMode::RandomHp, HptMode::SslHpt];
        let mut out = [Strategy {
            model_selection: ModelSelection::Ensemble,
            hpt: HptMode::Exhaustive,
        }; 9];
        let mut i = 0;
        for sel in selections {
            for mode in modes {
                out[i] = Strategy {
                    model_selection: sel,
                    hpt: mode,
                };
                i += 1;
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let sel = match self.model_selection {
            ModelSelection::Ensemble => "Ensemble",
            ModelSelection::RandomModel => "Random model",
            ModelSelection::SslMs => "SSL-MS",
        };
        let mode = match self.hpt {
            HptMode::Exhaustive => "HP",
            HptMode::RandomHp => "Random-HP",
            HptMode::SslHpt => "SSL-HPT",
        };
        format!("{sel} + {mode}")
    }
}

/// Tuning context shared by the online paths: trial budget and seed for
/// the searched and random modes.
#[derive(Debug, Clone, Copy)]
pub struct TuneContext {
    pub trials: usize,
    pub seed: u64,
}

impl Default for TuneContext {
    fn default() -> Self {
        TuneContext {
            trials: 20,
            seed: 0,
        }
    }
}

/// Parameters for one model under the given tuning mode, for the online
/// paths where no evaluation holdout exists: exhaustive tuning searches
/// an internal holdout of the series. Failure to find any working
/// setting is reported as None.
fn params_for(
    model: ModelId,
    ts: &TimeSeries,
    std_features: &[f64],
    learners: &Learners,
    mode: HptMode,
    ctx: TuneContext,
) -> Option<HyperParamAssignment> {
    let space = HyperParamSpace::default_for(model);
    match mode {
        HptMode::RandomHp => Some(random_assignment(&space, ctx.seed, ts.id())),
        HptMode::SslHpt => Some(predict_hparams(
            &learners.mtls[&model],
            std_features,
            &space,
        )),
        HptMode::Exhaustive => {
            let inner = SplitConfig::new(default_horizon(ts.len(), ts.period()));
            match random_search(model, ts, &space, ctx.trials, ctx.seed, inner) {
                Ok((best, _)) if !best.failed => Some(best.assignment),
                _ => None,
            }
        }
    }
}

/// Parameters for one model inside the evaluation protocol. The
/// exhaustive baseline here is the same operation that labels the
/// meta-dataset: `trials` random draws fitted on the train split and
/// scored on the evaluation holdout, keeping the best.
#[allow(clippy::too_many_arguments)]
fn eval_params_for(
    model: ModelId,
    full: &TimeSeries,
    eval_cfg: SplitConfig,
    train: &TimeSeries,
    std_features: &[f64],
    learners: &Learners,
    mode: HptMode,
    ctx: TuneContext,
) -> Option<HyperParamAssignment> {
    let space = HyperParamSpace::default_for(model);
    match mode {
        HptMode::RandomHp => Some(random_assignment(&space, ctx.seed, train.id())),
        HptMode::SslHpt => Some(predict_hparams(
            &learners.mtls[&model],
            std_features,
            &space,
        )),
        HptMode::Exhaustive => {
            match random_search(model, full, &space, ctx.trials, ctx.seed, eval_cfg) {
                Ok((best, _)) if !best.failed => Some(best.assignment),
                _ => None,
            }
        }
    }
}

fn standardized_features(ts: &TimeSeries, learners: &Learners) -> Vec<f64> {
    learners.standardizer.apply(&extract_features(ts))
}

/// Learned model selection, learned hyper-parameters, one fit, one
/// forecast. A fit failure falls back to seasonal-naive (or last value
/// when no period is usable) with the fallback flag set.
pub fn forecast_auto(ts: &TimeSeries, learners: &Learners, h: usize) -> ForecastResult {
    let std_x = standardized_features(ts, learners);
    let model = predict_model(&learners.forest, &std_x);
    let space = HyperParamSpace::default_for(model);
    let params = predict_hparams(&learners.mtls[&model], &std_x, &space);
    match models::fit(model, ts, &params) {
        Ok(fm) => models::predict(&fm, h),
        Err(_) => {
            let mut fc = models::predict(&models::fit_fallback(ts), h);
            fc.fallback = true;
            fc
        }
    }
}

/// Median ensemble outcome: the pointwise-median forecast plus which
/// members survived fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOutcome {
    pub forecast: ForecastResult,
    pub used: Vec<ModelId>,
    pub dropped: Vec<ModelId>,
}

/// Fit all six models with parameters from the given mode, drop the
/// failures, and take the pointwise median of the surviving forecasts
/// (mean of the middle two on even counts).
pub fn forecast_ensemble(
    ts: &TimeSeries,
    learners: &Learners,
    h: usize,
    hpt_mode: HptMode,
    ctx: TuneContext,
) -> Result<EnsembleOutcome, PipelineError> {
    let std_x = standardized_features(ts, learners);
    let mut member_forecasts: Vec<(ModelId, ForecastResult)> = Vec::new();
    let mut dropped = Vec::new();
    for model in ModelId::ALL {
        let params = match params_for(model, ts, &std_x, learners, hpt_mode, ctx) {
            Some(p) => p,
            None => {
                dropped.push(model);
                continue;
            }
        };
        match models::fit(model, ts, &params) {
            Ok(fm) => member_forecasts.push((model, models::predict(&fm, h))),
            Err(_) => dropped.push(model),
        }
    }
    median_of(member_forecasts, dropped, h, ts.id())
}

/// Pointwise median over surviving member forecasts; a single survivor
/// passes through exactly.
fn median_of(
    member_forecasts: Vec<(ModelId, ForecastResult)>,
    dropped: Vec<ModelId>,
    h: usize,
    series_id: &str,
) -> Result<EnsembleOutcome, PipelineError> {
    if member_forecasts.is_empty() {
        return Err(PipelineError::AllModelsFailed(series_id.to_string()));
    }
    if member_forecasts.len() == 1 {
        let (model, forecast) = member_forecasts.into_iter().next().unwrap();
        return Ok(EnsembleOutcome {
            forecast,
            used: vec![model],
            dropped,
        });
    }
    let used: Vec<ModelId> = member_forecasts.iter().map(|(m, _)| *m).collect();
    let values: Vec<f64> = (0..h)
        .map(|step| {
            let column: Vec<f64> = member_forecasts
                .iter()
                .map(|(_, fc)| fc.point_forecasts[step])
                .collect();
            median(&column)
        })
        .collect();
    let forecast = ForecastResult::new(used[0], HyperParamAssignment::empty(used[0]), values);
    Ok(EnsembleOutcome {
        forecast,
        used,
        dropped,
    })
}

/// Per-series evaluation detail for one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub mape: Option<f64>,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub id: String,
    pub horizon: usize,
    pub predicted_model: ModelId,
    /// Raw (unstandardized) feature values for the train split.
    pub features: Vec<f64>,
    pub per_strategy: Vec<StrategyOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub method: String,
    pub model_selection: ModelSelection,
    pub hpt: HptMode,
    pub avg_mape: f64,
    pub avg_mape_change_pct: f64,
    pub median_mape: f64,
    pub median_mape_change_pct: f64,
    pub n_fails: usize,
    pub runtime_units: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tool_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub corpus_size: usize,
    pub screened_out: Vec<String>,
    pub rows: Vec<StrategyRow>,
    pub feature_means_by_label: BTreeMap<ModelId, Vec<f64>>,
    pub series: Vec<SeriesEval>,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    /// Fixed holdout length; None applies the default horizon rule.
    pub horizon: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
    pub cost: CostModel,
    /// Echoed verbatim into the report.
    pub config_echo: serde_json::Value,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            horizon: None,
            trials: 20,
            seed: 0,
            jobs: 1,
            cost: CostModel::default(),
            config_echo: serde_json::Value::Null,
        }
    }
}

fn uniform_model(seed: u64, series_id: &str) -> ModelId {
    let mut rng = StreamRng::new(seed)
        .with_str("random_model")
        .with_str(series_id);
    ModelId::ALL[rng.index(ModelId::ALL.len())]
}

/// Forecast with one chosen model under the evaluation protocol; fit
/// failure falls back and flags.
#[allow(clippy::too_many_arguments)]
fn single_model_outcome(
    model: ModelId,
    full: &TimeSeries,
    eval_cfg: SplitConfig,
    train: &TimeSeries,
    test_values: &[f64],
    std_x: &[f64],
    learners: &Learners,
    mode: HptMode,
    ctx: TuneContext,
) -> StrategyOutcome {
    let h = test_values.len();
    let params = eval_params_for(model, full, eval_cfg, train, std_x, learners, mode, ctx);
    let (forecast, failed) = match params {
        Some(params) => match models::fit(model, train, &params) {
            Ok(fm) => (models::predict(&fm, h), false),
            Err(_) => (models::predict(&models::fit_fallback(train), h), true),
        },
        None => (models::predict(&models::fit_fallback(train), h), true),
    };
    let err = mape(test_values, &forecast.point_forecasts)
        .ok()
        .filter(|m| m.is_finite());
    StrategyOutcome { mape: err, failed }
}

fn evaluate_one_series(
    ts: &TimeSeries,
    learners: &Learners,
    cfg: &EvalConfig,
) -> Result<SeriesEval, String> {
    let h = cfg
        .horizon
        .unwrap_or_else(|| default_horizon(ts.len(), ts.period()));
    let eval_cfg = SplitConfig::new(h);
    let (train, test) = match train_test_split(ts, eval_cfg) {
        Ok(parts) => parts,
        Err(e) => return Err(format!("{}: {e}", ts.id())),
    };
    if test.values().contains(&0.0) {
        return Err(format!("{}: zero values in the holdout", ts.id()));
    }
    let features = extract_features(&train);
    let std_x = learners.standardizer.apply(&features);
    let predicted_model = predict_model(&learners.forest, &std_x);
    let random_model = uniform_model(cfg.seed, ts.id());
    let ctx = TuneContext {
        trials: cfg.trials,
        seed: cfg.seed,
    };

    let per_strategy = Strategy::all_nine()
        .iter()
        .map(|strategy| match strategy.model_selection {
            ModelSelection::Ensemble => {
                let mut members = Vec::new();
                let mut dropped = Vec::new();
                for model in ModelId::ALL {
                    let params = eval_params_for(
                        model,
                        ts,
                        eval_cfg,
                        &train,
                        &std_x,
                        learners,
                        strategy.hpt,
                        ctx,
                    );
                    match params {
                        Some(params) => match models::fit(model, &train, &params) {
                            Ok(fm) => members.push((model, models::predict(&fm, test.len()))),
                            Err(_) => dropped.push(model),
                        },
                        None => dropped.push(model),
                    }
                }
                match median_of(members, dropped, test.len(), ts.id()) {
                    Ok(outcome) => {
                        let err = mape(test.values(), &outcome.forecast.point_forecasts)
                            .ok()
                            .filter(|m| m.is_finite());
                        StrategyOutcome {
                            mape: err,
                            failed: false,
                        }
                    }
                    Err(_) => StrategyOutcome {
                        mape: None,
                        failed: true,
                    },
                }
            }
            ModelSelection::RandomModel => single_model_outcome(
                random_model,
                ts,
                eval_cfg,
                &train,
                test.values(),
                &std_x,
                learners,
                strategy.hpt,
                ctx,
            ),
            ModelSelection::SslMs => single_model_outcome(
                predicted_model,
                ts,
                eval_cfg,
                &train,
                test.values(),
                &std_x,
                learners,
                strategy.hpt,
                ctx,
            ),
        })
        .collect();

    Ok(SeriesEval {
        id: ts.id().to_string(),
        horizon: h,
        predicted_model,
        features: features.values().to_vec(),
        per_strategy,
    })
}

/// Run all nine strategies over the corpus with shared seeds and
/// aggregate the report. Test ids must be disjoint from the learners'
/// training ids.
pub fn evaluate_methods(
    corpus: &[TimeSeries],
    learners: &Learners,
    cfg: &EvalConfig,
) -> Result<EvalReport, PipelineError> {
    let overlap: Vec<String> = corpus
        .iter()
        .map(|ts| ts.id().to_string())
        .filter(|id| learners.manifest.train_ids.contains(id))
        .collect();
    if !overlap.is_empty() {
        return Err(PipelineError::OverlapError(overlap));
    }
    let results = par_map(corpus, cfg.jobs, |_, ts| {
        evaluate_one_series(ts, learners, cfg)
    });
    let mut series = Vec::new();
    let mut screened_out = Vec::new();
    for r in results {
        match r {
            Ok(s) => series.push(s),
            Err(reason) => screened_out.push(reason),
        }
    }
    if series.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }

    let strategies = Strategy::all_nine();
    let mut rows = Vec::with_capacity(9);
    let mut stats = Vec::with_capacity(9);
    for (k, strategy) in strategies.iter().enumerate() {
        let mapes: Vec<f64> = series
            .iter()
            .filter_map(|s| s.per_strategy[k].mape)
            .collect();
        let n_fails = series.iter().filter(|s| s.per_strategy[k].failed).count();
        let (avg, med) = if mapes.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (crate::numeric::mean(&mapes), median(&mapes))
        };
        stats.push((avg, med, n_fails));
        let _ = strategy;
    }
    // Baseline row: random model + random parameters.
    let baseline_idx = strategies
        .iter()
        .position(|s| {
            s.model_selection == ModelSelection::RandomModel && s.hpt == HptMode::RandomHp
        })
        .unwrap();
    let (base_avg, base_med, _) = stats[baseline_idx];
    let pct = |value: f64, base: f64| {
        if base.abs() > 0.0 && value.is_finite() && base.is_finite() {
            (value - base) / base * 100.0
        } else {
            0.0
        }
    };
    for (k, strategy) in strategies.iter().enumerate() {
        let (avg, med, n_fails) = stats[k];
        rows.push(StrategyRow {
            method: strategy.label(),
            model_selection: strategy.model_selection,
            hpt: strategy.hpt,
            avg_mape: avg,
            avg_mape_change_pct: pct(avg, base_avg),
            median_mape: med,
            median_mape_change_pct: pct(med, base_med),
            n_fails,
            runtime_units: runtime_units(*strategy, &cfg.cost, ModelId::ALL.len()),
        });
    }

    let mut by_label: BTreeMap<ModelId, (Vec<f64>, usize)> = BTreeMap::new();
    for s in &series {
        let entry = by_label
            .entry(s.predicted_model)
            .or_insert_with(|| (vec![0.0; FEATURE_COUNT], 0));
        for (acc, v) in entry.0.iter_mut().zip(&s.features) {
            *acc += v;
        }
        entry.1 += 1;
    }
    let feature_means_by_label = by_label
        .into_iter()
        .map(|(label, (sums, count))| (label, sums.into_iter().map(|s| s / count as f64).collect()))
        .collect();

    Ok(EvalReport {
        tool_version: crate::TOOL_VERSION.to_string(),
        seed: cfg.seed,
        config: cfg.config_echo.clone(),
        corpus_size: series.len(),
        screened_out,
        rows,
        feature_means_by_label,
        series,
    })
}

/// Render the nine-row comparison as CSV, mirroring the report columns.
pub fn report_to_csv(report: &EvalReport) -> String {
    let mut out = String::from(
        "method,avg_mape,avg_mape_change_pct,median_mape,median_mape_change_pct,n_fails,runtime_units\n",
    );
    for row in &report.rows {
        out.push_str(&format!(
            "{},{:.6},{:.3},{:.6},{:.3},{},{}\n",
            row.method,
            row.avg_mape,
            row.avg_mape_change_pct,
            row.median_mape,
            row.median_mape_change_pct,
            row.n_fails,
            row.runtime_units,
        ));
    }
    out
}

/// Upper-triangular label-change matrix over series prefixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyMatrix {
    pub checkpoints: Vec<usize>,
    /// Entry [i][j] for i < j: change indicator (single series) or
    /// percentage (corpus average); None on and below the diagonal.
    pub change: Vec<Vec<Option<f64>>>,
}

/// Predict the model label on each prefix of one series and report which
/// checkpoint pairs disagree (0/1 entries).
pub fn consistency_eval(
    ts: &TimeSeries,
    checkpoints: &[usize],
    learners: &Learners,
) -> Result<ConsistencyMatrix, PipelineError> {
    if checkpoints.is_empty() {
        return Err(PipelineError::BadCheckpoint {
            checkpoint: 0,
            reason: "no checkpoints".to_string(),
        });
    }
    let mut prev = 0usize;
    for &c in checkpoints {
        if c < prev {
            return Err(PipelineError::BadCheckpoint {
                checkpoint: c,
                reason: "checkpoints must be non-decreasing".to_string(),
            });
        }
        if c < 5 || c > ts.len() {
            return Err(PipelineError::BadCheckpoint {
                checkpoint: c,
                reason: format!("outside 5..={}", ts.len()),
            });
        }
        prev = c;
    }
    let labels: Vec<ModelId> = checkpoints
        .iter()
        .map(|&c| {
            let prefix = ts.prefix(c).expect("validated checkpoint");
            let std_x = standardized_features(&prefix, learners);
            predict_model(&learners.forest, &std_x)
        })
        .collect();
    let k = checkpoints.len();
    let change = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i < j {
                        Some(if labels[i] != labels[j] { 1.0 } else { 0.0 })
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    Ok(ConsistencyMatrix {
        checkpoints: checkpoints.to_vec(),
        change,
    })
}

/// Average the per-series indicator matrices into percentages.
pub fn corpus_consistency(
    corpus: &[TimeSeries],
    checkpoints: &[usize],
    learners: &Learners,
    jobs: usize,
) -> Result<ConsistencyMatrix, PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let per_series: Vec<Result<ConsistencyMatrix, PipelineError>> =
        par_map(corpus, jobs, |_, ts| {
            consistency_eval(ts, checkpoints, learners)
        });
    let k = checkpoints.len();
    let mut sums = vec![vec![0.0; k]; k];
    let mut count = 0usize;
    for result in per_series {
        let matrix = result?;
        for (sum_row, change_row) in sums.iter_mut().zip(&matrix.change) {
            for (sum, change) in sum_row.iter_mut().zip(change_row) {
                if let Some(v) = change {
                    *sum += v;
                }
            }
        }
        count += 1;
    }
    let change = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i < j {
                        Some(100.0 * sums[i][j] / count as f64)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    Ok(ConsistencyMatrix {
        checkpoints: checkpoints.to_vec(),
        change,
    })
}
