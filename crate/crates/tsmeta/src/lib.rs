//! Feature-based model selection and hyper-parameter prediction for
//! univariate time series forecasting.
//!
//! The library learns, offline, which of six candidate forecasting models
//! suits a series and which hyper-parameters to use, from a 40-entry
//! statistical feature vector. Online, both decisions are constant-time:
//! a random-forest classifier picks the model and one multi-task network
//! per model predicts its hyper-parameters, replacing per-series search.
//!
//! Modules follow the offline/online split:
//!
//! - [`core`]: validated series, train/test splitting, MAPE.
//! - [`features`]: the 40-entry feature vector and its building blocks.
//! - [`models`]: six forecasting models behind one fit/predict contract.
//! - [`tuning`]: hyper-parameter spaces, random and grid search.
//! - [`metadata`]: offline corpus construction (features + per-model best
//!   params + best-model label) and the runtime cost model.
//! - [`learners`]: random forest, per-model multi-task nets, the
//!   matrix-factorization ranker, and on-disk persistence.
//! - [`pipeline`]: online forecasting paths and the nine-method
//!   evaluation and consistency harnesses.
//! - [`cli`]: batch subcommands over everything above.
//!
//! Every random decision flows from an explicit seed through counter-based
//! keyed streams ([`rng`]), so corpus runs are reproducible bit-for-bit at
//! any parallelism level.

pub mod cli;
pub mod config;
pub mod core;
pub mod exec;
pub mod features;
pub mod learners;
pub mod metadata;
pub mod models;
pub mod numeric;
pub mod pipeline;
pub mod rng;
pub mod tuning;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
