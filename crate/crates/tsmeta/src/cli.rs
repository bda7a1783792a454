//! Batch command-line surface. Each subcommand is a thin deterministic
//! wrapper over one library operation; all randomness flows from the
//! resolved seed, inputs are never mutated, and outputs carry a
//! provenance echo. Exit codes: 0 success, 1 input error, 2 internal
//! failure.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::core::{read_series_csv, TimeSeries};
use crate::features::extract_features;
use crate::learners::{load_learners, save_learners, train_learners, LearnerConfig};
use crate::metadata::{
    build_corpus, read_meta_file, split_meta, write_meta_file, CorpusConfig, MetaError,
};
use crate::models::ModelId;
use crate::pipeline::{
    consistency_eval, corpus_consistency, evaluate_methods, forecast_auto, forecast_ensemble,
    report_to_csv, ConsistencyMatrix, EvalConfig, HptMode, TuneContext,
};
use crate::tuning::{random_search, HyperParamSpace, ParamMap};

#[derive(Debug)]
enum CliError {
    /// Bad inputs, flags, or data files: exit 1.
    Input(String),
    /// Failures writing outputs or other internal conditions: exit 2.
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn internal_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Parser, Debug)]
#[command(
    name = "tsmeta",
    version,
    about = "Feature-based model selection and hyper-parameter prediction for time series forecasting"
)]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random decision (falls back to TSMETA_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for corpus-level commands; results are identical
    /// at any value.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// Input series CSV (header `timestamp,value`) or a directory of them.
    #[arg(long)]
    input: PathBuf,
    /// Seasonal period of the input series (1 = non-seasonal).
    #[arg(long)]
    period: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the 40-entry feature vector per series (JSON lines).
    Features {
        #[command(flatten)]
        series: SeriesArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-search hyper-parameters for one model on one series.
    Tune {
        /// Model name: ARIMA, HOLT_LINEAR, HOLT_WINTERS, SEASONAL_NAIVE,
        /// STLF, or THETA.
        #[arg(long)]
        model: String,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        trials: Option<usize>,
        /// Holdout length used to score trials.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the meta-dataset (features + per-model best params + label)
    /// from a directory of series.
    BuildMeta {
        #[command(flatten)]
        series: SeriesArgs,
        /// Output JSON-lines file; a `.quarantine.json` sidecar is
        /// written next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Split a meta-dataset and train the learner bundle on the train
    /// fraction.
    Train {
        /// Meta-dataset file from build-meta.
        #[arg(long)]
        meta: PathBuf,
        /// Learner directory to create.
        #[arg(long)]
        out: PathBuf,
        /// Train fraction of the meta-dataset.
        #[arg(long)]
        p: Option<f64>,
        /// Cap the training split at this many records (for sweeping
        /// learner quality against training-set size).
        #[arg(long)]
        train_size: Option<usize>,
        /// Regression-loss divisor of the multi-task total loss.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        n_trees: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        lr: Option<f64>,
        #[arg(long)]
        batch: Option<usize>,
        /// Also fit the matrix-factorization model ranker.
        #[arg(long)]
        with_mf: bool,
    },
    /// Forecast one series with trained learners.
    Forecast {
        /// `ssl` (learned model + learned parameters) or `ensemble`
        /// (median over all six models).
        #[arg(long)]
        strategy: String,
        #[command(flatten)]
        series: SeriesArgs,
        /// Learner directory from train.
        #[arg(long)]
        learners: PathBuf,
        #[arg(long)]
        horizon: usize,
        /// Parameter source for ensemble members: ssl, random, or search.
        #[arg(long)]
        hpt: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the nine-method comparison over a test corpus.
    Evaluate {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        learners: PathBuf,
        /// Output directory for report.json, report.csv, and plot data.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Re-classify series at growing prefixes and report label change
    /// rates.
    Consistency {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        learners: PathBuf,
        /// Comma-separated prefix lengths, e.g. 60,90,120.
        #[arg(long)]
        checkpoints: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; real usage errors
            // report the offending flag and exit 1.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn load_config(
    cli_config: &Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
) -> Result<RunConfig, CliError> {
    let mut cfg = match cli_config {
        Some(path) => RunConfig::from_file(path).map_err(CliError::Input)?,
        None => RunConfig::default(),
    };
    if seed.is_some() {
        cfg.seed = seed;
    }
    if let Some(jobs) = jobs {
        cfg.jobs = jobs;
    }
    Ok(cfg)
}

fn read_input_series(input: &Path, period: usize) -> Result<Vec<TimeSeries>, CliError> {
    if input.is_dir() {
        let mut paths: Vec<_> = std::fs::read_dir(input)
            .map_err(input_err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|x| x == "csv").unwrap_or(false))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(CliError::Input(format!(
                "no .csv files in {}",
                input.display()
            )));
        }
        let mut out = Vec::new();
        for path in paths {
            out.push(read_series_csv(&path, period).map_err(input_err)?);
        }
        out.sort_by(|a, b| a.id().cmp(b.id()));
        Ok(out)
    } else {
        Ok(vec![read_series_csv(input, period).map_err(input_err)?])
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(internal_err),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn provenance(cfg: &RunConfig) -> serde_json::Value {
    json!({
        "tool_version": crate::TOOL_VERSION,
        "seed": cfg.resolved_seed(),
        "config": cfg.echo(),
    })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli.config, cli.seed, cli.jobs)?;
    match cli.command {
        Command::Features { series, out } => cmd_features(&cfg, &series, &out),
        Command::Tune {
            model,
            series,
            trials,
            horizon,
            out,
        } => cmd_tune(&cfg, &model, &series, trials, horizon, &out),
        Command::BuildMeta {
            series,
            out,
            trials,
            horizon,
        } => cmd_build_meta(&cfg, &series, &out, trials, horizon),
        Command::Train {
            meta,
            out,
            p,
            train_size,
            s,
            n_trees,
            epochs,
            lr,
            batch,
            with_mf,
        } => cmd_train(
            &cfg, &meta, &out, p, train_size, s, n_trees, epochs, lr, batch, with_mf,
        ),
        Command::Forecast {
            strategy,
            series,
            learners,
            horizon,
            hpt,
            out,
        } => cmd_forecast(&cfg, &strategy, &series, &learners, horizon, &hpt, &out),
        Command::Evaluate {
            series,
            learners,
            out,
            trials,
            horizon,
        } => cmd_evaluate(&cfg, &series, &learners, &out, trials, horizon),
        Command::Consistency {
            series,
            learners,
            checkpoints,
            out,
        } => cmd_consistency(&cfg, &series, &learners, &checkpoints, &out),
    }
}

fn cmd_features(
    cfg: &RunConfig,
    series_args: &SeriesArgs,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let period = series_args.period.unwrap_or(cfg.period);
    let series = read_input_series(&series_args.input, period)?;
    let vectors = crate::exec::par_map(&series, cfg.jobs, |_, ts| extract_features(ts));
    let mut text = String::new();
    for (ts, fv) in series.iter().zip(&vectors) {
        #[derive(serde::Serialize)]
        struct Line<'a> {
            id: &'a str,
            #[serde(flatten)]
            features: &'a crate::features::FeatureVector,
        }
        let line = Line {
            id: ts.id(),
            features: fv,
        };
        text.push_str(&serde_json::to_string(&line).map_err(internal_err)?);
        text.push('\n');
    }
    write_output(out, &text)?;
    if let Some(path) = out {
        let run_path = path.with_extension("run.json");
        std::fs::write(
            run_path,
            serde_json::to_string_pretty(&provenance(cfg)).map_err(internal_err)?,
        )
        .map_err(internal_err)?;
    }
    Ok(())
}

fn cmd_tune(
    cfg: &RunConfig,
    model: &str,
    series_args: &SeriesArgs,
    trials: Option<usize>,
    horizon: Option<usize>,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let model_id =
        ModelId::parse(model).ok_or_else(|| CliError::Input(format!("unknown model {model:?}")))?;
    let period = series_args.period.unwrap_or(cfg.period);
    let ts = read_series_csv(&series_args.input, period).map_err(input_err)?;
    let trials = trials.unwrap_or(cfg.trials);
    let h = horizon
        .or(cfg.horizon)
        .unwrap_or_else(|| crate::core::default_horizon(ts.len(), ts.period()));
    let space = HyperParamSpace::default_for(model_id);
    let (best, all) = random_search(
        model_id,
        &ts,
        &space,
        trials,
        cfg.resolved_seed(),
        crate::core::SplitConfig::new(h),
    )
    .map_err(input_err)?;
    let trial_json = |t: &crate::tuning::TrialResult| {
        json!({
            "params": ParamMap::from_assignment(&t.assignment),
            "mape": t.error,
            "failed": t.failed,
        })
    };
    let mut doc = provenance(cfg);
    doc["id"] = json!(ts.id());
    doc["model"] = json!(model_id.name());
    doc["horizon"] = json!(h);
    doc["best"] = json!({
        "params": ParamMap::from_assignment(&best.assignment),
        "mape": best.error,
        "failed": best.failed,
    });
    doc["trials"] = serde_json::Value::Array(all.iter().map(trial_json).collect());
    write_output(
        out,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).map_err(internal_err)?
        ),
    )
}

fn cmd_build_meta(
    cfg: &RunConfig,
    series_args: &SeriesArgs,
    out: &Path,
    trials: Option<usize>,
    horizon: Option<usize>,
) -> Result<(), CliError> {
    let corpus_cfg = CorpusConfig {
        period: series_args.period.unwrap_or(cfg.period),
        horizon: horizon.or(cfg.horizon),
        trials: trials.unwrap_or(cfg.trials),
        seed: cfg.resolved_seed(),
        jobs: cfg.jobs,
    };
    let build = build_corpus(&series_args.input, &corpus_cfg).map_err(|e| match e {
        MetaError::Io(io) => internal_err(io),
        other => input_err(other),
    })?;
    for (path, reason) in &build.skipped {
        eprintln!("skipped {path}: {reason}");
    }
    if build.records.is_empty() {
        return Err(CliError::Input(
            "all input series failed to produce records".to_string(),
        ));
    }
    write_meta_file(out, &build.records).map_err(internal_err)?;
    let sidecar = json!({
        "tool_version": crate::TOOL_VERSION,
        "seed": cfg.resolved_seed(),
        "config": cfg.echo(),
        "quarantined": build.quarantined,
        "skipped": build.skipped,
        "records": build.records.len(),
    });
    std::fs::write(
        out.with_extension("quarantine.json"),
        serde_json::to_string_pretty(&sidecar).map_err(internal_err)?,
    )
    .map_err(internal_err)?;
    eprintln!(
        "wrote {} records ({} quarantined, {} skipped)",
        build.records.len(),
        build.quarantined.len(),
        build.skipped.len()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    cfg: &RunConfig,
    meta: &Path,
    out: &Path,
    p: Option<f64>,
    train_size: Option<usize>,
    s: Option<f64>,
    n_trees: Option<usize>,
    epochs: Option<usize>,
    lr: Option<f64>,
    batch: Option<usize>,
    with_mf: bool,
) -> Result<(), CliError> {
    let records = read_meta_file(meta).map_err(input_err)?;
    let p = p.unwrap_or(cfg.p);
    let seed = cfg.resolved_seed();
    let (mut train, test) = split_meta(&records, p, seed).map_err(input_err)?;
    if let Some(cap) = train_size {
        if cap == 0 {
            return Err(CliError::Input(
                "--train-size must be at least 1".to_string(),
            ));
        }
        train.truncate(cap);
    }
    let learner_cfg = LearnerConfig {
        n_trees: n_trees.unwrap_or(cfg.n_trees),
        max_depth: cfg.max_depth,
        epochs: epochs.unwrap_or(cfg.epochs),
        lr: lr.unwrap_or(cfg.lr),
        batch: batch.unwrap_or(cfg.batch),
        s: s.unwrap_or(cfg.s),
        seed,
        with_mf: with_mf || cfg.with_mf,
        mf_lambda: cfg.mf_lambda,
    };
    let learners = train_learners(&train, &learner_cfg).map_err(input_err)?;
    save_learners(out, &learners).map_err(internal_err)?;
    let split_doc = json!({
        "tool_version": crate::TOOL_VERSION,
        "seed": seed,
        "config": cfg.echo(),
        "p": p,
        "train_size": train_size,
        "train_ids": train.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(),
        "test_ids": test.iter().map(|r| r.id.as_str()).collect::<Vec<_>>(),
    });
    std::fs::write(
        out.join("split.json"),
        serde_json::to_string_pretty(&split_doc).map_err(internal_err)?,
    )
    .map_err(internal_err)?;
    eprintln!(
        "trained on {} records, held out {}; learners in {}",
        train.len(),
        test.len(),
        out.display()
    );
    Ok(())
}

fn parse_hpt(hpt: &Option<String>) -> Result<HptMode, CliError> {
    match hpt.as_deref() {
        None | Some("ssl") => Ok(HptMode::SslHpt),
        Some("random") => Ok(HptMode::RandomHp),
        Some("search") | Some("exhaustive") => Ok(HptMode::Exhaustive),
        Some(other) => Err(CliError::Input(format!(
            "--hpt must be ssl, random, or search; got {other:?}"
        ))),
    }
}

fn cmd_forecast(
    cfg: &RunConfig,
    strategy: &str,
    series_args: &SeriesArgs,
    learners_dir: &Path,
    horizon: usize,
    hpt: &Option<String>,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    if horizon < 1 {
        return Err(CliError::Input("--horizon must be at least 1".to_string()));
    }
    let period = series_args.period.unwrap_or(cfg.period);
    let ts = read_series_csv(&series_args.input, period).map_err(input_err)?;
    let learners = load_learners(learners_dir).map_err(input_err)?;
    let mut doc = provenance(cfg);
    doc["id"] = json!(ts.id());
    doc["horizon"] = json!(horizon);
    match strategy {
        "ssl" => {
            let fc = forecast_auto(&ts, &learners, horizon);
            doc["strategy"] = json!("ssl");
            doc["model"] = json!(fc.model_id.name());
            doc["params"] = json!(ParamMap::from_assignment(&fc.params));
            doc["fallback"] = json!(fc.fallback);
            doc["forecasts"] = json!(fc.point_forecasts);
        }
        "ensemble" => {
            let mode = parse_hpt(hpt)?;
            let ctx = TuneContext {
                trials: cfg.trials,
                seed: cfg.resolved_seed(),
            };
            let outcome =
                forecast_ensemble(&ts, &learners, horizon, mode, ctx).map_err(input_err)?;
            doc["strategy"] = json!("ensemble");
            doc["used"] = json!(outcome.used.iter().map(|m| m.name()).collect::<Vec<_>>());
            doc["dropped"] = json!(outcome.dropped.iter().map(|m| m.name()).collect::<Vec<_>>());
            doc["fallback"] = json!(outcome.forecast.fallback);
            doc["forecasts"] = json!(outcome.forecast.point_forecasts);
        }
        other => {
            return Err(CliError::Input(format!(
                "--strategy must be ssl or ensemble; got {other:?}"
            )))
        }
    }
    write_output(
        out,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).map_err(internal_err)?
        ),
    )
}

fn cmd_evaluate(
    cfg: &RunConfig,
    series_args: &SeriesArgs,
    learners_dir: &Path,
    out: &Path,
    trials: Option<usize>,
    horizon: Option<usize>,
) -> Result<(), CliError> {
    let period = series_args.period.unwrap_or(cfg.period);
    let corpus = read_input_series(&series_args.input, period)?;
    let learners = load_learners(learners_dir).map_err(input_err)?;
    let eval_cfg = EvalConfig {
        horizon: horizon.or(cfg.horizon),
        trials: trials.unwrap_or(cfg.trials),
        seed: cfg.resolved_seed(),
        jobs: cfg.jobs,
        cost: crate::metadata::CostModel {
            c: trials.unwrap_or(cfg.trials) as f64,
        },
        config_echo: cfg.echo(),
    };
    let report = evaluate_methods(&corpus, &learners, &eval_cfg).map_err(input_err)?;
    std::fs::create_dir_all(out).map_err(internal_err)?;
    std::fs::write(
        out.join("report.json"),
        serde_json::to_string_pretty(&report).map_err(internal_err)?,
    )
    .map_err(internal_err)?;
    std::fs::write(out.join("report.csv"), report_to_csv(&report)).map_err(internal_err)?;

    // Plot data: per-label feature means and the per-series MAPE
    // distribution, ready for external rendering.
    let mut feature_csv = String::from("label,feature,mean\n");
    for (label, means) in &report.feature_means_by_label {
        for (name, mean) in crate::features::FEATURE_NAMES.iter().zip(means) {
            feature_csv.push_str(&format!("{label},{name},{mean}\n"));
        }
    }
    std::fs::write(out.join("plot_feature_means.csv"), feature_csv).map_err(internal_err)?;

    let mut mape_csv = String::from("method,series_id,mape,failed\n");
    for (k, row) in report.rows.iter().enumerate() {
        for series in &report.series {
            let outcome = &series.per_strategy[k];
            let mape = outcome
                .mape
                .map(|m| format!("{m:.6}"))
                .unwrap_or_else(|| "NA".to_string());
            mape_csv.push_str(&format!(
                "{},{},{},{}\n",
                row.method, series.id, mape, outcome.failed
            ));
        }
    }
    std::fs::write(out.join("plot_mape_distribution.csv"), mape_csv).map_err(internal_err)?;
    eprintln!(
        "evaluated {} series over 9 methods; report in {}",
        report.corpus_size,
        out.display()
    );
    Ok(())
}

fn render_consistency(matrix: &ConsistencyMatrix) -> String {
    let k = matrix.checkpoints.len();
    let mut out = String::from("prefix");
    for j in 1..k {
        out.push_str(&format!(",{}", matrix.checkpoints[j]));
    }
    out.push('\n');
    for i in 0..k.saturating_sub(1) {
        out.push_str(&matrix.checkpoints[i].to_string());
        for j in 1..k {
            match matrix.change[i][j] {
                Some(v) => out.push_str(&format!(",{v:.2}")),
                None => out.push_str(",NA"),
            }
        }
        out.push('\n');
    }
    out
}

fn cmd_consistency(
    cfg: &RunConfig,
    series_args: &SeriesArgs,
    learners_dir: &Path,
    checkpoints: &str,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let period = series_args.period.unwrap_or(cfg.period);
    let corpus = read_input_series(&series_args.input, period)?;
    let learners = load_learners(learners_dir).map_err(input_err)?;
    let parsed: Result<Vec<usize>, _> = checkpoints
        .split(',')
        .map(|tok| tok.trim().parse::<usize>())
        .collect();
    let checkpoints =
        parsed.map_err(|_| CliError::Input(format!("bad --checkpoints list {checkpoints:?}")))?;
    let matrix = if corpus.len() == 1 {
        consistency_eval(&corpus[0], &checkpoints, &learners).map_err(input_err)?
    } else {
        corpus_consistency(&corpus, &checkpoints, &learners, cfg.jobs).map_err(input_err)?
    };
    let mut doc = provenance(cfg);
    doc["series_count"] = json!(corpus.len());
    doc["checkpoints"] = json!(matrix.checkpoints);
    doc["change"] = serde_json::to_value(&matrix.change).map_err(internal_err)?;
    doc["table_csv"] = json!(render_consistency(&matrix));
    write_output(
        out,
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).map_err(internal_err)?
        ),
    )?;
    eprintln!("{}", render_consistency(&matrix));
    Ok(())
}
