//! Theta method: average of the extrapolated linear trend (theta = 0
//! line) and an SES forecast of the theta line, with ratio-to-trend
//! seasonal adjustment when a seasonality pretest passes.

use serde::{Deserialize, Serialize};

use crate::core::TimeSeries;
use crate::features::autocorr::acf;
use crate::features::decompose::centered_ma;
use crate::models::holt::ses_best_alpha;
use crate::models::{FitFailure, ModelId};
use crate::numeric::ols_line;
use crate::tuning::HyperParamAssignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaState {
    pub intercept: f64,
    pub slope: f64,
    pub ses_level: f64,
    pub ses_alpha: f64,
    pub train_n: usize,
    /// Multiplicative seasonal indices by phase, when the pretest passed.
    pub seasonal: Option<Vec<f64>>,
}

/// One-sided seasonality pretest: the lag-m autocorrelation must exceed
/// 1.645 of its large-sample standard error.
fn seasonality_significant(values: &[f64], m: usize) -> bool {
    let r = match acf(values, m) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let n = values.len() as f64;
    let sum_sq: f64 = r[..m - 1].iter().map(|v| v * v).sum();
    let se = ((1.0 + 2.0 * sum_sq) / n).sqrt();
    r[m - 1] > 1.645 * se
}

/// Ratio-to-moving-average seasonal indices, normalized to mean one.
/// Returns None when values or the trend estimate leave the positive
/// domain the ratios need.
fn multiplicative_indices(values: &[f64], m: usize) -> Option<Vec<f64>> {
    if values.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let trend = centered_ma(values, m);
    if trend.iter().any(|&t| t <= f64::EPSILON) {
        return None;
    }
    let mut sums = vec![0.0; m];
    let mut counts = vec![0usize; m];
    for (t, (&y, &tr)) in values.iter().zip(&trend).enumerate() {
        sums[t % m] += y / tr;
        counts[t % m] += 1;
    }
    let mut idx: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 1.0 })
        .collect();
    let mean_idx = idx.iter().sum::<f64>() / m as f64;
    if mean_idx <= f64::EPSILON {
        return None;
    }
    for v in idx.iter_mut() {
        *v /= mean_idx;
    }
    Some(idx)
}

pub fn fit(ts: &TimeSeries, params: &HyperParamAssignment) -> Result<ThetaState, FitFailure> {
    let theta = params.num("theta").ok_or_else(|| FitFailure::BadParams {
        model: ModelId::Theta,
        detail: "missing theta".to_string(),
    })?;
    if !(0.0..=10.0).contains(&theta) {
        return Err(FitFailure::BadParams {
            model: ModelId::Theta,
            detail: format!("theta={theta} outside [0,10]"),
        });
    }
    let m = ts.period();
    let seasonal = if ts.seasonal_usable() && seasonality_significant(ts.values(), m) {
        multiplicative_indices(ts.values(), m)
    } else {
        None
    };
    let adjusted: Vec<f64> = match &seasonal {
        Some(idx) => ts
            .values()
            .iter()
            .enumerate()
            .map(|(t, &v)| v / idx[t % m])
            .collect(),
        None => ts.values().to_vec(),
    };
    let (intercept, slope, _) = ols_line(&adjusted);
    let theta_line: Vec<f64> = adjusted
        .iter()
        .enumerate()
        .map(|(t, &v)| theta * v + (1.0 - theta) * (intercept + slope * t as f64))
        .collect();
    let (ses_alpha, ses_level) = ses_best_alpha(&theta_line);
    if !(intercept.is_finite() && slope.is_finite() && ses_level.is_finite()) {
        return Err(FitFailure::NonFinite {
            model: ModelId::Theta,
        });
    }
    Ok(ThetaState {
        intercept,
        slope,
        ses_level,
        ses_alpha,
        train_n: ts.len(),
        seasonal,
    })
}

pub fn forecast(state: &ThetaState, h: usize) -> Vec<f64> {
    (1..=h)
        .map(|k| {
            let t = (state.train_n - 1 + k) as f64;
            let trend_line = state.intercept + state.slope * t;
            let combined = 0.5 * trend_line + 0.5 * state.ses_level;
            match &state.seasonal {
                Some(idx) => combined * idx[(state.train_n - 1 + k) % idx.len()],
                None => combined,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;

    #[test]
    fn pretest_detects_strong_seasonality() {
        let values: Vec<f64> = (0..72)
            .map(|t| 100.0 + 20.0 * (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin())
            .collect();
        assert!(seasonality_significant(&values, 12));
    }

    #[test]
    fn pretest_rejects_trend_noise() {
        let values: Vec<f64> = (0..72u64)
            .map(|t| 100.0 + 0.1 * ((t * 2654435761) % 97) as f64)
            .collect();
        assert!(!seasonality_significant(&values, 12));
    }

    #[test]
    fn seasonal_forecast_recovers_multiplicative_pattern() {
        let idx = [1.2, 0.8, 1.1, 0.9];
        let gen = |t: usize| (50.0 + 0.5 * t as f64) * idx[t % 4];
        let values: Vec<f64> = (0..48).map(gen).collect();
        let ts = series_from_values("mult", &values, 4).unwrap();
        let params = HyperParamAssignment::empty(ModelId::Theta)
            .set("theta", crate::tuning::ParamValue::Num(2.0));
        let state = fit(&ts, &params).unwrap();
        assert!(state.seasonal.is_some());
        let fc = forecast(&state, 4);
        for (k, v) in fc.iter().enumerate() {
            let truth = gen(48 + k);
            assert!(
                (v - truth).abs() / truth < 0.1,
                "h={} {v} vs {truth}",
                k + 1
            );
        }
    }
}
