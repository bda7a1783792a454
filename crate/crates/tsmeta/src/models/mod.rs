//! Six candidate forecasting models behind one fit/predict contract.
//!
//! `fit` is deterministic given (series, params) and returns every
//! failure as a [`FitFailure`] value; corpus runs count failures, they
//! never abort on one. A [`FittedModel`] can forecast any horizon
//! without refitting.

mod arima;
pub mod holt;
mod snaive;
mod stlf;
mod theta;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

use crate::core::{ForecastResult, TimeSeries};
use crate::tuning::HyperParamAssignment;

pub use holt::{holt_one_step_sse, hw_one_step_sse, smoothing_grid};

/// The closed model set. Variants are declared in lexicographic order of
/// their wire names, so the derived `Ord` is the tie-break order used
/// throughout (argmin ties, vote ties).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelId {
    Arima,
    HoltLinear,
    HoltWinters,
    SeasonalNaive,
    Stlf,
    Theta,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::Arima,
        ModelId::HoltLinear,
        ModelId::HoltWinters,
        ModelId::SeasonalNaive,
        ModelId::Stlf,
        ModelId::Theta,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ModelId::Arima => "ARIMA",
            ModelId::HoltLinear => "HOLT_LINEAR",
            ModelId::HoltWinters => "HOLT_WINTERS",
            ModelId::SeasonalNaive => "SEASONAL_NAIVE",
            ModelId::Stlf => "STLF",
            ModelId::Theta => "THETA",
        }
    }

    pub fn parse(s: &str) -> Option<ModelId> {
        ModelId::ALL.iter().copied().find(|m| m.name() == s)
    }

    /// Class index used by the learners (stable, lexicographic).
    pub fn class_index(&self) -> usize {
        ModelId::ALL.iter().position(|m| m == self).unwrap()
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitFailure {
    #[error("{model}: series too short ({detail})")]
    TooShort { model: ModelId, detail: String },
    #[error("{model}: requires a usable seasonal period")]
    SeasonalityRequired { model: ModelId },
    #[error("{model}: singular regression system")]
    SingularSystem { model: ModelId },
    #[error("{model}: non-stationary AR component")]
    NonStationary { model: ModelId },
    #[error("{model}: non-finite values during estimation")]
    NonFinite { model: ModelId },
    #[error("{model}: bad parameters: {detail}")]
    BadParams { model: ModelId, detail: String },
}

/// Model-specific fitted state, enough to forecast any horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelState {
    Theta(theta::ThetaState),
    HoltLinear(holt::HoltLinearState),
    HoltWinters(holt::HoltWintersState),
    Stlf(stlf::StlfState),
    Arima(arima::ArimaState),
    SeasonalNaive(snaive::SeasonalNaiveState),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub model_id: ModelId,
    pub params: HyperParamAssignment,
    pub state: ModelState,
    pub train_n: usize,
}

/// Fit `model_id` to the series with the given parameters.
pub fn fit(
    model_id: ModelId,
    ts: &TimeSeries,
    params: &HyperParamAssignment,
) -> Result<FittedModel, FitFailure> {
    let state = match model_id {
        ModelId::Theta => ModelState::Theta(theta::fit(ts, params)?),
        ModelId::HoltLinear => ModelState::HoltLinear(holt::fit_holt_linear(ts, params)?),
        ModelId::HoltWinters => ModelState::HoltWinters(holt::fit_holt_winters(ts, params)?),
        ModelId::Stlf => ModelState::Stlf(stlf::fit(ts, params)?),
        ModelId::Arima => ModelState::Arima(arima::fit(ts, params)?),
        ModelId::SeasonalNaive => ModelState::SeasonalNaive(snaive::fit(ts)?),
    };
    Ok(FittedModel {
        model_id,
        params: params.clone(),
        state,
        train_n: ts.len(),
    })
}

/// Forecast `h` steps ahead. Pure: equal inputs give equal outputs.
pub fn predict(fm: &FittedModel, h: usize) -> ForecastResult {
    debug_assert!(h >= 1);
    let values = match &fm.state {
        ModelState::Theta(s) => theta::forecast(s, h),
        ModelState::HoltLinear(s) => holt::forecast_holt_linear(s, h),
        ModelState::HoltWinters(s) => holt::forecast_holt_winters(s, h),
        ModelState::Stlf(s) => stlf::forecast(s, h),
        ModelState::Arima(s) => arima::forecast(s, h),
        ModelState::SeasonalNaive(s) => snaive::forecast(s, h),
    };
    ForecastResult::new(fm.model_id, fm.params.clone(), values)
}

/// A last-cycle (or last-value) fallback that always fits; used when the
/// requested model fails and the pipeline still needs a forecast.
pub fn fit_fallback(ts: &TimeSeries) -> FittedModel {
    let state = ModelState::SeasonalNaive(snaive::fallback_state(ts));
    FittedModel {
        model_id: ModelId::SeasonalNaive,
        params: HyperParamAssignment::empty(ModelId::SeasonalNaive),
        state,
        train_n: ts.len(),
    }
}

fn smoothing_param(
    model: ModelId,
    params: &HyperParamAssignment,
    name: &str,
) -> Result<f64, FitFailure> {
    let v = params.num(name).ok_or_else(|| FitFailure::BadParams {
        model,
        detail: format!("missing {name}"),
    })?;
    if !(v > 0.0 && v < 1.0) {
        return Err(FitFailure::BadParams {
            model,
            detail: format!("{name}={v} outside (0,1)"),
        });
    }
    Ok(v)
}
