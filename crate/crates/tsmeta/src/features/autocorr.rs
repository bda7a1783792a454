//! Autocorrelation and partial autocorrelation, plus the 11-entry
//! ACF/PACF feature block over the series and its first two differences.

use crate::core::TimeSeries;
use crate::features::Feat;
use crate::numeric::diff;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AcfError {
    #[error("constant input has no autocorrelation")]
    ConstantInput,
    #[error("max_lag {max_lag} must be below length {len}")]
    TooShort { max_lag: usize, len: usize },
}

/// Sample autocorrelations r_1..r_max_lag, biased (divide-by-n)
/// estimator about the sample mean. The biased form keeps |r_k| <= 1 and
/// the sequence positive semidefinite, which Durbin-Levinson needs.
pub fn acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>, AcfError> {
    let n = x.len();
    if max_lag >= n {
        return Err(AcfError::TooShort { max_lag, len: n });
    }
    let mean = crate::numeric::mean(x);
    let denom: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if denom <= 0.0 {
        return Err(AcfError::ConstantInput);
    }
    let mut out = Vec::with_capacity(max_lag);
    for k in 1..=max_lag {
        let num: f64 = (k..n).map(|t| (x[t] - mean) * (x[t - k] - mean)).sum();
        out.push(num / denom);
    }
    Ok(out)
}

/// Partial autocorrelations via Durbin-Levinson on the ACF sequence.
/// pacf_1 equals acf_1 exactly. A numerically degenerate step zeroes the
/// remaining lags.
pub fn pacf(x: &[f64], max_lag: usize) -> Result<Vec<f64>, AcfError> {
    let r = acf(x, max_lag)?;
    let mut out = Vec::with_capacity(max_lag);
    let mut phi_prev: Vec<f64> = Vec::new();
    for k in 1..=max_lag {
        if k == 1 {
            out.push(r[0]);
            phi_prev = vec![r[0]];
            continue;
        }
        let mut num = r[k - 1];
        let mut den = 1.0;
        for (j, &phi) in phi_prev.iter().enumerate() {
            num -= phi * r[k - 2 - j];
            den -= phi * r[j];
        }
        if den.abs() <= 1e-12 {
            out.resize(max_lag, 0.0);
            break;
        }
        let phi_kk = num / den;
        let mut phi_new = Vec::with_capacity(k);
        for j in 0..k - 1 {
            phi_new.push(phi_prev[j] - phi_kk * phi_prev[k - 2 - j]);
        }
        phi_new.push(phi_kk);
        out.push(phi_kk);
        phi_prev = phi_new;
    }
    Ok(out)
}

/// The ACF/PACF feature block, in schema order:
/// first AC of the series and both differences, the three sums of squares
/// of the first five ACs, the AC at the seasonal lag, the three sums of
/// squares of the first five PACs, and the PAC at the seasonal lag.
/// Seasonal entries are masked when the period is 1; constant or
/// too-short inputs mask the affected entries.
pub struct AcfPacfFeatures {
    pub acf_y_1: Feat,
    pub acf_diff1_1: Feat,
    pub acf_diff2_1: Feat,
    pub acf_y_sumsq5: Feat,
    pub acf_diff1_sumsq5: Feat,
    pub acf_diff2_sumsq5: Feat,
    pub acf_seasonal: Feat,
    pub pacf_y_sumsq5: Feat,
    pub pacf_diff1_sumsq5: Feat,
    pub pacf_diff2_sumsq5: Feat,
    pub pacf_seasonal: Feat,
}

fn first_and_sumsq(x: &[f64]) -> (Feat, Feat) {
    match acf(x, 5.min(x.len().saturating_sub(1))) {
        Ok(r) if r.len() == 5 => {
            let sumsq = r.iter().map(|v| v * v).sum::<f64>();
            (Feat::ok(r[0]), Feat::ok(sumsq))
        }
        Ok(r) if !r.is_empty() => (Feat::ok(r[0]), Feat::masked()),
        _ => (Feat::masked(), Feat::masked()),
    }
}

fn pac_sumsq(x: &[f64]) -> Feat {
    match pacf(x, 5.min(x.len().saturating_sub(1))) {
        Ok(p) if p.len() == 5 => Feat::ok(p.iter().map(|v| v * v).sum()),
        _ => Feat::masked(),
    }
}

pub fn acf_pacf_features(ts: &TimeSeries) -> AcfPacfFeatures {
    let y = ts.values();
    let d1 = diff(y);
    let d2 = diff(&d1);
    let m = ts.period();

    let (acf_y_1, acf_y_sumsq5) = first_and_sumsq(y);
    let (acf_diff1_1, acf_diff1_sumsq5) = first_and_sumsq(&d1);
    let (acf_diff2_1, acf_diff2_sumsq5) = first_and_sumsq(&d2);
    let pacf_y_sumsq5 = pac_sumsq(y);
    let pacf_diff1_sumsq5 = pac_sumsq(&d1);
    let pacf_diff2_sumsq5 = pac_sumsq(&d2);

    let (acf_seasonal, pacf_seasonal) = if m > 1 && m < y.len() {
        let a = match acf(y, m) {
            Ok(r) => Feat::ok(r[m - 1]),
            Err(_) => Feat::masked(),
        };
        let p = match pacf(y, m) {
            Ok(r) => Feat::ok(r[m - 1]),
            Err(_) => Feat::masked(),
        };
        (a, p)
    } else {
        (Feat::masked(), Feat::masked())
    };

    AcfPacfFeatures {
        acf_y_1,
        acf_diff1_1,
        acf_diff2_1,
        acf_y_sumsq5,
        acf_diff1_sumsq5,
        acf_diff2_sumsq5,
        acf_seasonal,
        pacf_y_sumsq5,
        pacf_diff1_sumsq5,
        pacf_diff2_sumsq5,
        pacf_seasonal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::rng::StreamRng;

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = StreamRng::new(seed).with_str("acf-ar1");
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                x = phi * x + rng.normal();
                x
            })
            .collect()
    }

    #[test]
    fn alternating_series_strong_negative_lag1() {
        let x: Vec<f64> = (0..100)
            .map(|t| if t % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let r = acf(&x, 3).unwrap();
        assert!(
            (-1.0..=-0.9).contains(&r[0]),
            "lag-1 autocorrelation {}",
            r[0]
        );
    }

    #[test]
    fn ar1_lag1_near_phi() {
        let x = ar1(0.8, 2000, 1);
        let r = acf(&x, 1).unwrap();
        assert!((0.75..=0.85).contains(&r[0]), "r1 {}", r[0]);
    }

    #[test]
    fn constant_input_rejected() {
        assert_eq!(acf(&[2.0; 30], 3).unwrap_err(), AcfError::ConstantInput);
        assert_eq!(pacf(&[2.0; 30], 3).unwrap_err(), AcfError::ConstantInput);
    }

    #[test]
    fn biased_estimator_bounded() {
        let mut rng = StreamRng::new(5).with_str("bounded");
        for _ in 0..20 {
            let x: Vec<f64> = (0..60).map(|_| rng.normal() * 3.0).collect();
            for r in acf(&x, 20).unwrap() {
                assert!(r.abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn pacf_base_case_equals_acf() {
        let x = ar1(0.6, 500, 2);
        let r = acf(&x, 1).unwrap();
        let p = pacf(&x, 1).unwrap();
        assert_eq!(r[0].to_bits(), p[0].to_bits());
    }

    #[test]
    fn ar1_pacf_cuts_off_after_lag_one() {
        let x = ar1(0.8, 2000, 3);
        let p = pacf(&x, 4).unwrap();
        assert!((p[0] - 0.8).abs() <= 0.05, "pacf_1 {}", p[0]);
        assert!(p[1].abs() <= 0.05, "pacf_2 {}", p[1]);
    }

    #[test]
    fn white_noise_pacf_small() {
        let mut rng = StreamRng::new(4).with_str("wn-pacf");
        let x: Vec<f64> = (0..2000).map(|_| rng.normal()).collect();
        for (k, p) in pacf(&x, 5).unwrap().into_iter().enumerate() {
            assert!(p.abs() <= 0.06, "lag {} pacf {}", k + 1, p);
        }
    }

    #[test]
    fn ramp_masks_differenced_entries() {
        let values: Vec<f64> = (1..=100).map(|t| t as f64).collect();
        let ts = series_from_values("ramp", &values, 1).unwrap();
        let f = acf_pacf_features(&ts);
        assert!(!f.acf_diff1_1.defined);
        assert_eq!(f.acf_diff1_1.value, 0.0);
        assert!(!f.acf_diff1_sumsq5.defined);
        assert!(f.acf_y_1.defined);
    }

    #[test]
    fn sumsq_dominates_first_squared() {
        let mut rng = StreamRng::new(6).with_str("dominate");
        for _ in 0..20 {
            let x: Vec<f64> = (0..80).map(|_| rng.normal() + 1.0).collect();
            let r = acf(&x, 5).unwrap();
            let sumsq: f64 = r.iter().map(|v| v * v).sum();
            assert!(sumsq >= r[0] * r[0] - 1e-15);
        }
    }

    #[test]
    fn sine_seasonal_lag_strong() {
        let values: Vec<f64> = (0..144)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).sin())
            .collect();
        let ts = series_from_values("sine", &values, 12).unwrap();
        let f = acf_pacf_features(&ts);
        assert!(f.acf_seasonal.defined);
        assert!(f.acf_seasonal.value >= 0.8, "{}", f.acf_seasonal.value);
    }

    #[test]
    fn period_one_masks_seasonal_entries() {
        let values: Vec<f64> = (0..50).map(|t| (t as f64 * 0.31).sin()).collect();
        let ts = series_from_values("m1", &values, 1).unwrap();
        let f = acf_pacf_features(&ts);
        assert!(!f.acf_seasonal.defined);
        assert!(!f.pacf_seasonal.defined);
    }
}
