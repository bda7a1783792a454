//! Strength-of-component features read off a decomposition.

use crate::features::decompose::Decomposition;
use crate::features::Feat;
use crate::numeric::variance;

pub struct StlFeatures {
    pub trend_strength: Feat,
    pub seasonal_strength: Feat,
    pub spikiness: Feat,
    /// 1-based phase of the seasonal maximum (0 when non-seasonal).
    pub peak: Feat,
    /// 1-based phase of the seasonal minimum (0 when non-seasonal).
    pub trough: Feat,
}

fn strength(var_r: f64, var_with: f64) -> f64 {
    if var_with <= 0.0 {
        return 0.0;
    }
    (1.0 - var_r / var_with).max(0.0)
}

/// Variance of the n leave-one-out variances of the remainder.
fn loo_variance_of_variances(r: &[f64]) -> f64 {
    let n = r.len();
    if n < 2 {
        return 0.0;
    }
    let s1: f64 = r.iter().sum();
    let s2: f64 = r.iter().map(|v| v * v).sum();
    let k = (n - 1) as f64;
    let loo: Vec<f64> = r
        .iter()
        .map(|&v| {
            let m = (s1 - v) / k;
            ((s2 - v * v) / k - m * m).max(0.0)
        })
        .collect();
    variance(&loo)
}

pub fn stl_features(d: &Decomposition) -> StlFeatures {
    let var_r = variance(&d.remainder);
    let tr: Vec<f64> = d
        .trend
        .iter()
        .zip(&d.remainder)
        .map(|(t, r)| t + r)
        .collect();
    let trend_strength = Feat::ok(strength(var_r, variance(&tr)));
    let (seasonal_strength, peak, trough) = if d.period > 1 {
        let sr: Vec<f64> = d
            .seasonal
            .iter()
            .zip(&d.remainder)
            .map(|(s, r)| s + r)
            .collect();
        let phases = &d.seasonal[..d.period];
        let mut peak_idx = 0;
        let mut trough_idx = 0;
        for (j, &v) in phases.iter().enumerate() {
            if v > phases[peak_idx] {
                peak_idx = j;
            }
            if v < phases[trough_idx] {
                trough_idx = j;
            }
        }
        (
            Feat::ok(strength(var_r, variance(&sr))),
            Feat::ok((peak_idx + 1) as f64),
            Feat::ok((trough_idx + 1) as f64),
        )
    } else {
        (Feat::ok(0.0), Feat::ok(0.0), Feat::ok(0.0))
    };
    StlFeatures {
        trend_strength,
        seasonal_strength,
        spikiness: Feat::ok(loo_variance_of_variances(&d.remainder)),
        peak,
        trough,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::features::decompose::decompose;
    use crate::rng::StreamRng;

    #[test]
    fn ramp_is_pure_trend() {
        let values: Vec<f64> = (0..60).map(|t| t as f64).collect();
        let ts = series_from_values("ramp", &values, 1).unwrap();
        let f = stl_features(&decompose(&ts));
        assert!(f.trend_strength.value >= 0.99, "{}", f.trend_strength.value);
        assert_eq!(f.seasonal_strength.value, 0.0);
    }

    #[test]
    fn tiled_pattern_is_pure_seasonal() {
        let s = [3.0, 0.0, -1.0, -2.0];
        let values: Vec<f64> = (0..48).map(|t| s[t % 4]).collect();
        let ts = series_from_values("tile", &values, 4).unwrap();
        let f = stl_features(&decompose(&ts));
        assert!(
            f.seasonal_strength.value >= 0.99,
            "{}",
            f.seasonal_strength.value
        );
        assert_eq!(f.peak.value, 1.0);
        assert_eq!(f.trough.value, 4.0);
    }

    #[test]
    fn white_noise_has_weak_structure() {
        let mut worst_trend: f64 = 0.0;
        let mut worst_seasonal: f64 = 0.0;
        for seed in 0..50 {
            let mut rng = StreamRng::new(seed).with_str("stl-noise");
            let values: Vec<f64> = (0..240).map(|_| rng.normal()).collect();
            let ts = series_from_values("wn", &values, 12).unwrap();
            let f = stl_features(&decompose(&ts));
            worst_trend = worst_trend.max(f.trend_strength.value);
            worst_seasonal = worst_seasonal.max(f.seasonal_strength.value);
        }
        assert!(worst_trend <= 0.3, "trend strength up to {worst_trend}");
        assert!(
            worst_seasonal <= 0.3,
            "seasonal strength up to {worst_seasonal}"
        );
    }

    #[test]
    fn spikiness_grows_with_an_outlier() {
        let mut rng = StreamRng::new(7).with_str("spike");
        let base: Vec<f64> = (0..100).map(|_| rng.normal()).collect();
        let mut spiked = base.clone();
        spiked[50] += 30.0;
        let ts_base = series_from_values("b", &base, 1).unwrap();
        let ts_spiked = series_from_values("s", &spiked, 1).unwrap();
        let f_base = stl_features(&decompose(&ts_base));
        let f_spiked = stl_features(&decompose(&ts_spiked));
        assert!(f_spiked.spikiness.value > 10.0 * f_base.spikiness.value);
    }

    #[test]
    fn constant_series_strengths_zero() {
        let ts = series_from_values("c", &[4.0; 30], 3).unwrap();
        let f = stl_features(&decompose(&ts));
        assert_eq!(f.trend_strength.value, 0.0);
        assert_eq!(f.seasonal_strength.value, 0.0);
        assert_eq!(f.spikiness.value, 0.0);
    }
}
