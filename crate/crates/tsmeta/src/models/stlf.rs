//! STLF: decompose, forecast the seasonally adjusted series with a
//! simple base method, and re-add the last estimated seasonal cycle
//! tiled forward. Two hyper-parameters: the categorical base method and
//! the SES alpha.

use serde::{Deserialize, Serialize};

use crate::core::TimeSeries;
use crate::features::decompose::decompose;
use crate::models::holt::ses_run;
use crate::models::{smoothing_param, FitFailure, ModelId};
use crate::numeric::ols_line;
use crate::tuning::HyperParamAssignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaseForecast {
    /// Repeat the last adjusted value.
    Naive { last: f64 },
    /// Flat SES level.
    Ses { level: f64 },
    /// Extrapolated least-squares line.
    Linear { intercept: f64, slope: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StlfState {
    pub base: BaseForecast,
    /// Last estimated seasonal cycle, phase-indexed.
    pub seasonal: Vec<f64>,
    pub train_n: usize,
}

pub fn fit(ts: &TimeSeries, params: &HyperParamAssignment) -> Result<StlfState, FitFailure> {
    if !ts.seasonal_usable() {
        return Err(FitFailure::SeasonalityRequired {
            model: ModelId::Stlf,
        });
    }
    let method = params
        .cat("base_method")
        .ok_or_else(|| FitFailure::BadParams {
            model: ModelId::Stlf,
            detail: "missing base_method".to_string(),
        })?;
    let m = ts.period();
    let d = decompose(ts);
    let adjusted: Vec<f64> = ts
        .values()
        .iter()
        .zip(&d.seasonal)
        .map(|(y, s)| y - s)
        .collect();
    // Per-phase seasonal values from the last full cycle.
    let n = ts.len();
    let mut seasonal = vec![0.0; m];
    for (offset, &s) in d.seasonal[n - m..].iter().enumerate() {
        seasonal[(n - m + offset) % m] = s;
    }
    let base = match method {
        "naive" => BaseForecast::Naive {
            last: *adjusted.last().unwrap(),
        },
        "ses" => {
            let alpha = smoothing_param(ModelId::Stlf, params, "alpha")?;
            let (level, _) = ses_run(&adjusted, alpha);
            BaseForecast::Ses { level }
        }
        "linear" => {
            let (intercept, slope, _) = ols_line(&adjusted);
            BaseForecast::Linear { intercept, slope }
        }
        other => {
            return Err(FitFailure::BadParams {
                model: ModelId::Stlf,
                detail: format!("unknown base_method {other:?}"),
            })
        }
    };
    let finite = match &base {
        BaseForecast::Naive { last } => last.is_finite(),
        BaseForecast::Ses { level } => level.is_finite(),
        BaseForecast::Linear { intercept, slope } => intercept.is_finite() && slope.is_finite(),
    };
    if !finite || seasonal.iter().any(|s| !s.is_finite()) {
        return Err(FitFailure::NonFinite {
            model: ModelId::Stlf,
        });
    }
    Ok(StlfState {
        base,
        seasonal,
        train_n: ts.len(),
    })
}

pub fn forecast(state: &StlfState, h: usize) -> Vec<f64> {
    let m = state.seasonal.len();
    (1..=h)
        .map(|k| {
            let base = match &state.base {
                BaseForecast::Naive { last } => *last,
                BaseForecast::Ses { level } => *level,
                BaseForecast::Linear { intercept, slope } => {
                    intercept + slope * (state.train_n - 1 + k) as f64
                }
            };
            base + state.seasonal[(state.train_n - 1 + k) % m]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::tuning::ParamValue;

    fn params(method: &str, alpha: f64) -> HyperParamAssignment {
        HyperParamAssignment::empty(ModelId::Stlf)
            .set("base_method", ParamValue::Cat(method.to_string()))
            .set("alpha", ParamValue::Num(alpha))
    }

    #[test]
    fn linear_base_tracks_trend_plus_seasonal() {
        let s = [4.0, -2.0, 1.0, -3.0];
        let gen = |t: usize| 10.0 + 0.7 * t as f64 + s[t % 4];
        let values: Vec<f64> = (0..60).map(gen).collect();
        let ts = series_from_values("ls", &values, 4).unwrap();
        let state = fit(&ts, &params("linear", 0.5)).unwrap();
        let fc = forecast(&state, 8);
        for (k, v) in fc.iter().enumerate() {
            let truth = gen(60 + k);
            assert!((v - truth).abs() < 0.05 * truth.abs(), "{v} vs {truth}");
        }
    }

    #[test]
    fn ses_base_on_constant_adjusted_series() {
        let s = [4.0, -2.0, 1.0, -3.0];
        let values: Vec<f64> = (0..40).map(|t| 25.0 + s[t % 4]).collect();
        let ts = series_from_values("ses", &values, 4).unwrap();
        let state = fit(&ts, &params("ses", 0.4)).unwrap();
        let fc = forecast(&state, 4);
        for (k, v) in fc.iter().enumerate() {
            let truth = 25.0 + s[(40 + k) % 4];
            assert!((v - truth).abs() < 1e-6, "{v} vs {truth}");
        }
    }
}
