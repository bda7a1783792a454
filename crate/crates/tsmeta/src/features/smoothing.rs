//! Smoothing parameters as features: the grid-optimized Holt and
//! Holt-Winters coefficients, read off the same recursions the models
//! use.

use crate::core::TimeSeries;
use crate::features::Feat;
use crate::models::{holt_one_step_sse, hw_one_step_sse, smoothing_grid};

pub struct SmoothingFeatures {
    pub holt_alpha: Feat,
    pub holt_beta: Feat,
    pub hw_alpha: Feat,
    pub hw_beta: Feat,
    pub hw_gamma: Feat,
}

/// Argmin of Holt's one-step SSE over the 0.05 grid; ties keep the
/// lexicographically first (alpha, beta).
pub fn best_holt_params(y: &[f64]) -> (f64, f64) {
    let grid = smoothing_grid();
    let mut best = (grid[0], grid[0]);
    let mut best_sse = f64::INFINITY;
    for &alpha in &grid {
        for &beta in &grid {
            let sse = holt_one_step_sse(y, alpha, beta);
            if sse < best_sse {
                best_sse = sse;
                best = (alpha, beta);
            }
        }
    }
    best
}

/// Argmin of additive Holt-Winters one-step SSE over the 0.05 grid.
pub fn best_hw_params(y: &[f64], m: usize) -> (f64, f64, f64) {
    let grid = smoothing_grid();
    let mut best = (grid[0], grid[0], grid[0]);
    let mut best_sse = f64::INFINITY;
    for &alpha in &grid {
        for &beta in &grid {
            for &gamma in &grid {
                let sse = hw_one_step_sse(y, m, alpha, beta, gamma);
                if sse < best_sse {
                    best_sse = sse;
                    best = (alpha, beta, gamma);
                }
            }
        }
    }
    best
}

pub fn smoothing_param_features(ts: &TimeSeries) -> SmoothingFeatures {
    let (holt_alpha, holt_beta) = best_holt_params(ts.values());
    let (hw_alpha, hw_beta, hw_gamma) = if ts.seasonal_usable() {
        let (a, b, g) = best_hw_params(ts.values(), ts.period());
        (Feat::ok(a), Feat::ok(b), Feat::ok(g))
    } else {
        (Feat::masked(), Feat::masked(), Feat::masked())
    };
    SmoothingFeatures {
        holt_alpha: Feat::ok(holt_alpha),
        holt_beta: Feat::ok(holt_beta),
        hw_alpha,
        hw_beta,
        hw_gamma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::numeric::variance;
    use crate::rng::StreamRng;

    #[test]
    fn parameters_stay_on_grid() {
        let mut rng = StreamRng::new(2).with_str("sm-grid");
        let values: Vec<f64> = (0..60)
            .map(|t| 20.0 + 0.5 * t as f64 + [2.0, -1.0, 0.0, -1.0][t % 4] + rng.normal())
            .collect();
        let ts = series_from_values("g", &values, 4).unwrap();
        let f = smoothing_param_features(&ts);
        let grid = smoothing_grid();
        for v in [
            f.holt_alpha.value,
            f.holt_beta.value,
            f.hw_alpha.value,
            f.hw_beta.value,
            f.hw_gamma.value,
        ] {
            assert!(grid.contains(&v), "{v} not on grid");
            assert!((0.05..=0.95).contains(&v));
        }
    }

    #[test]
    fn holt_argmin_dominates_midpoint() {
        let values: Vec<f64> = (0..40).map(|t| 2.0 * t as f64).collect();
        let (alpha, beta) = best_holt_params(&values);
        let best_sse = holt_one_step_sse(&values, alpha, beta);
        let mid_sse = holt_one_step_sse(&values, 0.5, 0.5);
        assert!(best_sse <= mid_sse);
    }

    #[test]
    fn hw_near_perfect_on_exact_generator() {
        let s = [3.0, -1.0, 0.5, -2.5];
        let values: Vec<f64> = (0..48).map(|t| 10.0 + 0.7 * t as f64 + s[t % 4]).collect();
        let ts = series_from_values("hw", &values, 4).unwrap();
        let f = smoothing_param_features(&ts);
        let sse = hw_one_step_sse(
            ts.values(),
            4,
            f.hw_alpha.value,
            f.hw_beta.value,
            f.hw_gamma.value,
        );
        let bound = 1e-4 * variance(ts.values()) * ts.len() as f64;
        assert!(sse <= bound, "sse {sse} bound {bound}");
    }

    #[test]
    fn hw_masked_without_usable_period() {
        let values: Vec<f64> = (0..30).map(|t| t as f64).collect();
        let ts = series_from_values("m1", &values, 1).unwrap();
        let f = smoothing_param_features(&ts);
        assert!(!f.hw_alpha.defined);
        assert!(!f.hw_beta.defined);
        assert!(!f.hw_gamma.defined);
        assert!(f.holt_alpha.defined);
    }
}
