//! Stationarity diagnostics: the trend-KPSS statistic with lag-one
//! Newey-West long-run variance, and the ARCH Lagrange-multiplier
//! statistic from squared-value autoregression.

use crate::core::TimeSeries;
use crate::features::Feat;
use crate::numeric::{mean, ols, r_squared};

pub struct StationarityFeatures {
    pub kpss_stat: Feat,
    pub arch_stat: Feat,
}

/// KPSS statistic around a linear trend: partial sums of detrending
/// residuals over the Bartlett long-run variance with truncation one.
pub fn kpss_trend_stat(y: &[f64]) -> Feat {
    let n = y.len();
    if n < 5 {
        return Feat::masked();
    }
    let (a, b, _) = crate::numeric::ols_line(y);
    let resid: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(t, &v)| v - (a + b * t as f64))
        .collect();
    let mut cum = 0.0;
    let mut sum_s2 = 0.0;
    for &e in &resid {
        cum += e;
        sum_s2 += cum * cum;
    }
    let gamma0: f64 = resid.iter().map(|e| e * e).sum::<f64>() / n as f64;
    let gamma1: f64 = (1..n).map(|t| resid[t] * resid[t - 1]).sum::<f64>() / n as f64;
    // Bartlett weight at lag 1 with truncation l = 1 is 1/2, so the
    // long-run variance is gamma0 + gamma1.
    let lrv = gamma0 + gamma1;
    if lrv <= 1e-300 {
        return Feat::masked();
    }
    Feat::ok(sum_s2 / (n as f64 * n as f64) / lrv)
}

/// Engle's LM statistic: (rows)·R^2 from regressing squared demeaned
/// values on an intercept and L of their own lags, L = min(12, n/4).
pub fn arch_lm_stat(y: &[f64]) -> Feat {
    let n = y.len();
    let lags = 12.min(n / 4);
    if lags < 1 || n < 3 * lags {
        return Feat::masked();
    }
    let m = mean(y);
    let z2: Vec<f64> = y.iter().map(|v| (v - m) * (v - m)).collect();
    let rows = n - lags;
    let ones = vec![1.0; rows];
    let mut columns: Vec<Vec<f64>> = vec![ones];
    for lag in 1..=lags {
        columns.push((lags..n).map(|t| z2[t - lag]).collect());
    }
    let target: Vec<f64> = z2[lags..].to_vec();
    let col_refs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
    let beta = match ols(&col_refs, &target) {
        Some(b) => b,
        None => return Feat::masked(),
    };
    let fitted: Vec<f64> = (0..rows)
        .map(|r| {
            beta[0]
                + (1..=lags)
                    .map(|lag| beta[lag] * z2[lags + r - lag])
                    .sum::<f64>()
        })
        .collect();
    Feat::ok(rows as f64 * r_squared(&target, &fitted))
}

pub fn stationarity_features(ts: &TimeSeries) -> StationarityFeatures {
    StationarityFeatures {
        kpss_stat: kpss_trend_stat(ts.values()),
        arch_stat: arch_lm_stat(ts.values()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;

    /// 5% critical value of the trend-KPSS null distribution.
    const KPSS_TREND_5PCT: f64 = 0.146;
    /// 95% quantile of chi-squared with 12 degrees of freedom.
    const CHI2_12_95PCT: f64 = 21.026;

    #[test]
    fn white_noise_kpss_mostly_below_critical() {
        let mut below = 0;
        for seed in 0..50 {
            let mut rng = StreamRng::new(seed).with_str("kpss-wn");
            let y: Vec<f64> = (0..500).map(|_| rng.normal()).collect();
            if kpss_trend_stat(&y).value <= KPSS_TREND_5PCT {
                below += 1;
            }
        }
        assert!(below >= 40, "only {below}/50 below the critical value");
    }

    #[test]
    fn random_walk_kpss_large() {
        let mut above = 0;
        for seed in 0..50 {
            let mut rng = StreamRng::new(seed).with_str("kpss-rw");
            let mut x = 0.0;
            let y: Vec<f64> = (0..500)
                .map(|_| {
                    x += rng.normal();
                    x
                })
                .collect();
            if kpss_trend_stat(&y).value >= 0.5 {
                above += 1;
            }
        }
        assert!(above >= 45, "only {above}/50 above 0.5");
    }

    #[test]
    fn iid_arch_stat_below_chi2_quantile() {
        let mut below = 0;
        for seed in 0..50 {
            let mut rng = StreamRng::new(seed).with_str("arch-iid");
            let y: Vec<f64> = (0..500).map(|_| rng.normal()).collect();
            if arch_lm_stat(&y).value <= CHI2_12_95PCT {
                below += 1;
            }
        }
        assert!(below >= 40, "only {below}/50 below the quantile");
    }

    #[test]
    fn volatility_clustered_series_high_arch() {
        // ARCH(1)-style variance feedback inflates the statistic in most
        // seeds; check the median behavior rather than every draw.
        let mut high = 0;
        for seed in 0..20 {
            let mut rng = StreamRng::new(seed).with_str("arch-garch");
            let mut y = Vec::with_capacity(600);
            let mut prev: f64 = 0.0;
            for _ in 0..600 {
                let sigma2 = 0.4 + 0.6 * prev * prev;
                prev = sigma2.sqrt() * rng.normal();
                y.push(prev);
            }
            if arch_lm_stat(&y).value > CHI2_12_95PCT {
                high += 1;
            }
        }
        assert!(high >= 14, "only {high}/20 flagged");
    }

    #[test]
    fn constant_series_masked() {
        assert!(!kpss_trend_stat(&[2.0; 100]).defined);
        assert!(!arch_lm_stat(&[2.0; 100]).defined);
    }

    #[test]
    fn short_series_masked() {
        let y = [1.0, 2.0, 1.5];
        assert!(!arch_lm_stat(&y).defined);
    }
}
