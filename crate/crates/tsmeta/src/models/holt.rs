//! Exponential smoothing recursions: simple (SES), Holt linear, and
//! additive Holt-Winters. The one-step SSE entry points double as the
//! objective for the smoothing-parameter features.

use serde::{Deserialize, Serialize};

use crate::core::TimeSeries;
use crate::models::{smoothing_param, FitFailure, ModelId};
use crate::numeric::mean;
use crate::tuning::HyperParamAssignment;

/// The 0.05-step grid on [0.05, 0.95] used wherever smoothing parameters
/// are optimized by exhaustive search.
pub fn smoothing_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// Run SES with fixed alpha; returns (final level, one-step SSE).
pub fn ses_run(x: &[f64], alpha: f64) -> (f64, f64) {
    debug_assert!(!x.is_empty());
    let mut level = x[0];
    let mut sse = 0.0;
    for &v in &x[1..] {
        let err = v - level;
        sse += err * err;
        level += alpha * err;
    }
    (level, sse)
}

/// Grid-optimize SES's alpha by one-step SSE; ties to the smaller alpha.
pub fn ses_best_alpha(x: &[f64]) -> (f64, f64) {
    let mut best = (0.05, f64::INFINITY);
    for alpha in smoothing_grid() {
        let (_, sse) = ses_run(x, alpha);
        if sse < best.1 {
            best = (alpha, sse);
        }
    }
    let (level, _) = ses_run(x, best.0);
    (best.0, level)
}

/// Holt's linear recursion; returns (level, trend, one-step SSE).
pub fn holt_run(y: &[f64], alpha: f64, beta: f64) -> (f64, f64, f64) {
    debug_assert!(y.len() >= 2);
    let mut level = y[0];
    let mut trend = y[1] - y[0];
    let mut sse = 0.0;
    for &v in &y[1..] {
        let fitted = level + trend;
        let err = v - fitted;
        sse += err * err;
        let new_level = alpha * v + (1.0 - alpha) * (level + trend);
        trend = beta * (new_level - level) + (1.0 - beta) * trend;
        level = new_level;
    }
    (level, trend, sse)
}

/// One-step SSE of Holt's linear method at (alpha, beta).
pub fn holt_one_step_sse(y: &[f64], alpha: f64, beta: f64) -> f64 {
    holt_run(y, alpha, beta).2
}

/// Additive Holt-Winters recursion. States start from the first two
/// cycles: trend from the cycle-mean difference, level advanced to the
/// end of cycle one, seasonals as trend-adjusted cycle-one deviations.
/// Returns (level, trend, seasonals by phase, one-step SSE).
pub fn hw_run(y: &[f64], m: usize, alpha: f64, beta: f64, gamma: f64) -> (f64, f64, Vec<f64>, f64) {
    debug_assert!(m >= 2 && y.len() >= 2 * m);
    let c1 = mean(&y[..m]);
    let c2 = mean(&y[m..2 * m]);
    let mut trend = (c2 - c1) / m as f64;
    let half = (m as f64 - 1.0) / 2.0;
    let mut level = c1 + trend * half;
    let mut seasonal: Vec<f64> = (0..m)
        .map(|j| y[j] - (c1 + trend * (j as f64 - half)))
        .collect();
    let mut sse = 0.0;
    for (t, &obs) in y.iter().enumerate().skip(m) {
        let phase = t % m;
        let fitted = level + trend + seasonal[phase];
        let err = obs - fitted;
        sse += err * err;
        let new_level = alpha * (obs - seasonal[phase]) + (1.0 - alpha) * (level + trend);
        trend = beta * (new_level - level) + (1.0 - beta) * trend;
        seasonal[phase] = gamma * (obs - new_level) + (1.0 - gamma) * seasonal[phase];
        level = new_level;
    }
    (level, trend, seasonal, sse)
}

/// One-step SSE of additive Holt-Winters at (alpha, beta, gamma).
pub fn hw_one_step_sse(y: &[f64], m: usize, alpha: f64, beta: f64, gamma: f64) -> f64 {
    hw_run(y, m, alpha, beta, gamma).3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoltLinearState {
    pub level: f64,
    pub trend: f64,
}

pub fn fit_holt_linear(
    ts: &TimeSeries,
    params: &HyperParamAssignment,
) -> Result<HoltLinearState, FitFailure> {
    let alpha = smoothing_param(ModelId::HoltLinear, params, "alpha")?;
    let beta = smoothing_param(ModelId::HoltLinear, params, "beta")?;
    let (level, trend, _) = holt_run(ts.values(), alpha, beta);
    if !(level.is_finite() && trend.is_finite()) {
        return Err(FitFailure::NonFinite {
            model: ModelId::HoltLinear,
        });
    }
    Ok(HoltLinearState { level, trend })
}

pub fn forecast_holt_linear(state: &HoltLinearState, h: usize) -> Vec<f64> {
    (1..=h)
        .map(|k| state.level + k as f64 * state.trend)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoltWintersState {
    pub level: f64,
    pub trend: f64,
    /// Seasonal offsets indexed by phase (position mod period).
    pub seasonal: Vec<f64>,
    pub train_n: usize,
}

pub fn fit_holt_winters(
    ts: &TimeSeries,
    params: &HyperParamAssignment,
) -> Result<HoltWintersState, FitFailure> {
    if !ts.seasonal_usable() {
        return Err(FitFailure::SeasonalityRequired {
            model: ModelId::HoltWinters,
        });
    }
    let alpha = smoothing_param(ModelId::HoltWinters, params, "alpha")?;
    let beta = smoothing_param(ModelId::HoltWinters, params, "beta")?;
    let gamma = smoothing_param(ModelId::HoltWinters, params, "gamma")?;
    let m = ts.period();
    let (level, trend, seasonal, _) = hw_run(ts.values(), m, alpha, beta, gamma);
    if !(level.is_finite() && trend.is_finite() && seasonal.iter().all(|s| s.is_finite())) {
        return Err(FitFailure::NonFinite {
            model: ModelId::HoltWinters,
        });
    }
    Ok(HoltWintersState {
        level,
        trend,
        seasonal,
        train_n: ts.len(),
    })
}

pub fn forecast_holt_winters(state: &HoltWintersState, h: usize) -> Vec<f64> {
    let m = state.seasonal.len();
    (1..=h)
        .map(|k| {
            let phase = (state.train_n - 1 + k) % m;
            state.level + k as f64 * state.trend + state.seasonal[phase]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ses_constant_series_zero_sse() {
        let (level, sse) = ses_run(&[4.0; 10], 0.3);
        assert_eq!(level, 4.0);
        assert_eq!(sse, 0.0);
    }

    #[test]
    fn holt_exact_line_zero_sse() {
        let y: Vec<f64> = (0..20).map(|t| 1.0 + 2.0 * t as f64).collect();
        let (level, trend, sse) = holt_run(&y, 0.4, 0.2);
        assert!(sse.abs() < 1e-18);
        assert!((level - 39.0).abs() < 1e-9);
        assert!((trend - 2.0).abs() < 1e-9);
    }

    #[test]
    fn hw_exact_generator_zero_sse_any_params() {
        let s = [1.0, -1.0, 2.0, -2.0];
        let y: Vec<f64> = (0..48).map(|t| 0.5 * t as f64 + s[t % 4]).collect();
        for &(a, b, g) in &[(0.1, 0.1, 0.1), (0.5, 0.1, 0.1), (0.9, 0.9, 0.9)] {
            let (_, trend, seasonal, sse) = hw_run(&y, 4, a, b, g);
            assert!(sse < 1e-18, "sse={sse} at ({a},{b},{g})");
            assert!((trend - 0.5).abs() < 1e-9);
            for (j, &sj) in seasonal.iter().enumerate() {
                assert!((sj - s[j]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ses_best_alpha_in_grid() {
        let y: Vec<f64> = (0..30).map(|t| (t as f64 * 0.9).sin()).collect();
        let (alpha, _) = ses_best_alpha(&y);
        assert!(smoothing_grid().contains(&alpha));
    }
}
