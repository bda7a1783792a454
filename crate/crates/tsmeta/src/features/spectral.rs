//! Normalized Shannon entropy of the periodogram. Near 1 for noise-like
//! series, near 0 when energy concentrates in a few frequencies.

use crate::core::TimeSeries;
use crate::features::autocorr::AcfError;
use crate::numeric::mean;

/// Periodogram at the Fourier frequencies j = 1..n/2 of the demeaned
/// series (frequency zero carries no information after demeaning).
pub fn periodogram(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let half = n / 2;
    let mut out = Vec::with_capacity(half);
    for j in 1..=half {
        let w = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &v) in x.iter().enumerate() {
            let angle = w * t as f64;
            let centered = v - m;
            re += centered * angle.cos();
            im -= centered * angle.sin();
        }
        out.push((re * re + im * im) / n as f64);
    }
    out
}

/// Shannon entropy of the normalized periodogram, divided by the log of
/// the number of frequencies so the result lies in [0, 1].
pub fn spectral_entropy(ts: &TimeSeries) -> Result<f64, AcfError> {
    let spec = periodogram(ts.values());
    let total: f64 = spec.iter().sum();
    if total <= 0.0 || spec.len() < 2 {
        return Err(AcfError::ConstantInput);
    }
    let mut h = 0.0;
    for &p in &spec {
        let q = p / total;
        if q > 0.0 {
            h -= q * q.ln();
        }
    }
    Ok((h / (spec.len() as f64).ln()).clamp(0.0, 1.0))
}
