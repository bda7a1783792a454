//! Classical additive decomposition: moving-average trend, per-phase
//! seasonal means, residual remainder. This is the variance-splitting
//! device behind the trend/seasonal-strength features and STLF.

use serde::{Deserialize, Serialize};

use crate::core::TimeSeries;
use crate::numeric::ols_line;

/// Additive components; `trend + seasonal + remainder` reconstructs the
/// input exactly, and each full cycle of `seasonal` sums to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub period: usize,
}

/// Trend window when no seasonal period is usable; matches the tile
/// width convention of the windowed features.
const NONSEASONAL_WINDOW: usize = 10;

/// Centered moving average of window `m`, endpoints extended by a local
/// linear fit to the nearest interior trend values. Even windows use the
/// standard half-weighted (m+1)-point form so they stay centered.
pub fn centered_ma(y: &[f64], m: usize) -> Vec<f64> {
    let n = y.len();
    if m <= 1 || n < m + 1 {
        return y.to_vec();
    }
    let half = m / 2;
    let mut trend = vec![f64::NAN; n];
    if m % 2 == 1 {
        let inv = 1.0 / m as f64;
        for t in half..n - half {
            let s: f64 = y[t - half..=t + half].iter().sum();
            trend[t] = s * inv;
        }
    } else {
        let inv = 1.0 / m as f64;
        for t in half..n - half {
            let mut s = 0.5 * (y[t - half] + y[t + half]);
            s += y[t - half + 1..t + half].iter().sum::<f64>();
            trend[t] = s * inv;
        }
    }
    extend_ends(&mut trend, half, n, m);
    trend
}

fn extend_ends(trend: &mut [f64], half: usize, n: usize, m: usize) {
    let interior = n - 2 * half;
    debug_assert!(interior >= 1);
    let k = interior.min((m + 1).max(4));
    // Head: fit on the first k interior points, extrapolate backwards.
    let head: Vec<f64> = trend[half..half + k].to_vec();
    let (a, b, _) = ols_line(&head);
    for (t, slot) in trend.iter_mut().enumerate().take(half) {
        // Position t sits (half - t) steps before interior start.
        *slot = a + b * (t as f64 - half as f64);
    }
    // Tail: fit on the last k interior points, extrapolate forwards.
    let tail_start = n - half - k;
    let tail: Vec<f64> = trend[tail_start..n - half].to_vec();
    let (a, b, _) = ols_line(&tail);
    for (offset, slot) in trend.iter_mut().enumerate().skip(n - half) {
        *slot = a + b * (offset - tail_start) as f64;
    }
}

/// Decompose a series additively at its effective period (1 when the
/// declared period is not usable). The non-seasonal trend window is 10.
pub fn decompose(ts: &TimeSeries) -> Decomposition {
    let y = ts.values();
    let n = y.len();
    let m = ts.effective_period();
    let window = if m > 1 {
        m
    } else {
        NONSEASONAL_WINDOW.min(n - 1).max(2)
    };
    let trend = centered_ma(y, window);
    let detrended: Vec<f64> = y.iter().zip(&trend).map(|(v, t)| v - t).collect();
    let seasonal = if m > 1 {
        let mut sums = vec![0.0; m];
        let mut counts = vec![0usize; m];
        for (t, &d) in detrended.iter().enumerate() {
            sums[t % m] += d;
            counts[t % m] += 1;
        }
        let mut phase: Vec<f64> = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        let phase_mean = phase.iter().sum::<f64>() / m as f64;
        for v in phase.iter_mut() {
            *v -= phase_mean;
        }
        (0..n).map(|t| phase[t % m]).collect()
    } else {
        vec![0.0; n]
    };
    let remainder: Vec<f64> = y
        .iter()
        .zip(&trend)
        .zip(&seasonal)
        .map(|((v, t), s)| v - t - s)
        .collect();
    Decomposition {
        trend,
        seasonal,
        remainder,
        period: m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::numeric::variance;
    use crate::rng::StreamRng;

    fn reconstruction_error(ts: &TimeSeries, d: &Decomposition) -> f64 {
        ts.values()
            .iter()
            .zip(&d.trend)
            .zip(&d.seasonal)
            .zip(&d.remainder)
            .map(|(((y, t), s), r)| (y - t - s - r).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn recovers_tiled_pattern_on_trend() {
        let s = [1.0, -1.0, 2.0, -2.0];
        let values: Vec<f64> = (0..40).map(|t| 0.5 * t as f64 + s[t % 4]).collect();
        let ts = series_from_values("gen", &values, 4).unwrap();
        let d = decompose(&ts);
        for (t, &sv) in d.seasonal.iter().enumerate() {
            assert!((sv - s[t % 4]).abs() <= 1e-6, "t={t}: {sv} vs {}", s[t % 4]);
        }
        for &r in &d.remainder {
            assert!(r.abs() <= 1e-6);
        }
        assert!(reconstruction_error(&ts, &d) <= 1e-9);
    }

    #[test]
    fn constant_series_degenerates_cleanly() {
        let ts = series_from_values("c", &vec![3.0; 30], 4).unwrap();
        let d = decompose(&ts);
        assert!(d.trend.iter().all(|&t| (t - 3.0).abs() < 1e-12));
        assert!(d.seasonal.iter().all(|&s| s.abs() < 1e-12));
        assert!(d.remainder.iter().all(|&r| r.abs() < 1e-12));
    }

    #[test]
    fn white_noise_remainder_keeps_half_the_variance() {
        // Noise has no structure to explain; averaged over seeds the
        // remainder must keep at least half the variance.
        let mut ratios = Vec::new();
        for seed in 0..50 {
            let mut rng = StreamRng::new(seed).with_str("wn-decomp");
            let values: Vec<f64> = (0..240).map(|_| rng.normal()).collect();
            let ts = series_from_values("wn", &values, 12).unwrap();
            let d = decompose(&ts);
            ratios.push(variance(&d.remainder) / variance(ts.values()));
        }
        let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(mean_ratio >= 0.5, "mean remainder ratio {mean_ratio}");
    }

    #[test]
    fn seasonal_cycles_sum_to_zero() {
        let mut rng = StreamRng::new(8).with_str("cycles");
        let values: Vec<f64> = (0..60)
            .map(|t| 10.0 + [3.0, 1.0, -2.0, 0.5, -2.5][t % 5] + rng.normal())
            .collect();
        let ts = series_from_values("cyc", &values, 5).unwrap();
        let d = decompose(&ts);
        for cycle in d.seasonal.chunks_exact(5) {
            assert!(cycle.iter().sum::<f64>().abs() <= 1e-6);
        }
    }

    #[test]
    fn nonseasonal_trend_of_ramp_is_exact() {
        let values: Vec<f64> = (0..50).map(|t| 2.0 * t as f64 + 1.0).collect();
        let ts = series_from_values("ramp", &values, 1).unwrap();
        let d = decompose(&ts);
        assert!(d.seasonal.iter().all(|&s| s == 0.0));
        for (t, &tr) in d.trend.iter().enumerate() {
            assert!((tr - values[t]).abs() <= 1e-9, "t={t}");
        }
    }

    #[test]
    fn reconstruction_fuzz() {
        for seed in 0..200 {
            let mut rng = StreamRng::new(seed).with_str("fuzz-recon");
            let n = 20 + rng.index(200);
            let m = [1, 4, 7, 12][rng.index(4)];
            let trend_slope = rng.uniform(-2.0, 2.0);
            let amp = rng.uniform(0.0, 10.0);
            let values: Vec<f64> = (0..n)
                .map(|t| {
                    trend_slope * t as f64 + amp * ((t % m.max(1)) as f64) + 3.0 * rng.normal()
                })
                .collect();
            let ts = series_from_values("f", &values, m).unwrap();
            let d = decompose(&ts);
            assert!(reconstruction_error(&ts, &d) <= 1e-9, "seed {seed}");
        }
    }
}
