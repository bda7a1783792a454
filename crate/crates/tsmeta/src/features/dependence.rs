//! Long-memory and autocorrelation-shape features: rescaled-range Hurst
//! exponent, first local minimum and first zero crossing of the ACF.

use crate::core::TimeSeries;
use crate::features::autocorr::acf;
use crate::features::Feat;
use crate::numeric::{mean, variance};

pub struct DependenceFeatures {
    pub hurst: Feat,
    pub first_min_ac: Feat,
    pub first_zero_ac: Feat,
}

/// Mean rescaled range over non-overlapping blocks of the given size.
fn rescaled_range(x: &[f64], block: usize) -> Option<f64> {
    let nb = x.len() / block;
    if nb == 0 {
        return None;
    }
    let mut acc = 0.0;
    let mut used = 0usize;
    for b in 0..nb {
        let chunk = &x[b * block..(b + 1) * block];
        let m = mean(chunk);
        let mut cum = 0.0;
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for &v in chunk {
            cum += v - m;
            hi = hi.max(cum);
            lo = lo.min(cum);
        }
        let s = variance(chunk).sqrt();
        if s > 1e-12 {
            acc += (hi - lo) / s;
            used += 1;
        }
    }
    if used == 0 {
        None
    } else {
        Some(acc / used as f64)
    }
}

/// Hurst exponent: slope of log mean(R/S) against log block size over a
/// log grid of sizes between 10 and n/2, clipped to [0, 1].
pub fn hurst(x: &[f64]) -> Feat {
    let n = x.len();
    if n < 20 {
        return Feat::masked();
    }
    let lo = 10.0f64;
    let hi = (n / 2) as f64;
    let grid_len = 12;
    let mut sizes: Vec<usize> = (0..grid_len)
        .map(|i| {
            (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (grid_len - 1) as f64)
                .exp()
                .round() as usize
        })
        .collect();
    sizes.dedup();
    let mut log_s = Vec::new();
    let mut log_rs = Vec::new();
    for s in sizes {
        if let Some(rs) = rescaled_range(x, s) {
            if rs > 0.0 {
                log_s.push((s as f64).ln());
                log_rs.push(rs.ln());
            }
        }
    }
    if log_s.len() < 2 {
        return Feat::masked();
    }
    // Least squares of log(R/S) on log(s); reuse the line fit by mapping
    // the unevenly spaced abscissa through explicit sums.
    let sx = mean(&log_s);
    let sy = mean(&log_rs);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in log_s.iter().zip(&log_rs) {
        num += (a - sx) * (b - sy);
        den += (a - sx) * (a - sx);
    }
    if den <= 0.0 {
        return Feat::masked();
    }
    Feat::ok((num / den).clamp(0.0, 1.0))
}

pub fn dependence_features(ts: &TimeSeries) -> DependenceFeatures {
    let y = ts.values();
    let n = y.len();
    let max_lag = (n / 2).min(n - 1);
    let (first_min, first_zero) = match acf(y, max_lag) {
        Ok(r) => {
            // Lag k needs neighbors at k-1 (with r_0 = 1) and k+1.
            let mut fm = Feat::masked();
            for k in 1..r.len() {
                let prev = if k == 1 { 1.0 } else { r[k - 2] };
                if r[k - 1] < prev && r[k - 1] < r[k] {
                    fm = Feat::ok(k as f64);
                    break;
                }
            }
            let mut fz = Feat::masked();
            let mut prev = 1.0;
            for (k, &rk) in r.iter().enumerate() {
                if rk == 0.0 || rk * prev < 0.0 {
                    fz = Feat::ok((k + 1) as f64);
                    break;
                }
                prev = rk;
            }
            (fm, fz)
        }
        Err(_) => (Feat::masked(), Feat::masked()),
    };
    DependenceFeatures {
        hurst: hurst(y),
        first_min_ac: first_min,
        first_zero_ac: first_zero,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::rng::StreamRng;

    #[test]
    fn iid_noise_hurst_near_half() {
        let mut total = 0.0;
        for seed in 0..50 {
            let mut rng = StreamRng::new(seed).with_str("hurst-iid");
            let x: Vec<f64> = (0..1000).map(|_| rng.normal()).collect();
            total += hurst(&x).value;
        }
        let avg = total / 50.0;
        assert!((0.4..=0.6).contains(&avg), "average hurst {avg}");
    }

    #[test]
    fn random_walk_hurst_high() {
        let mut total = 0.0;
        for seed in 0..20 {
            let mut rng = StreamRng::new(seed).with_str("hurst-rw");
            let mut x = 0.0;
            let walk: Vec<f64> = (0..1000)
                .map(|_| {
                    x += rng.normal();
                    x
                })
                .collect();
            total += hurst(&walk).value;
        }
        let avg = total / 20.0;
        assert!(avg >= 0.85, "average hurst {avg}");
    }

    #[test]
    fn hurst_too_short_masked() {
        let x: Vec<f64> = (0..15).map(|t| t as f64).collect();
        assert!(!hurst(&x).defined);
    }

    #[test]
    fn cosine_first_zero_near_quarter_period() {
        let values: Vec<f64> = (0..240)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).cos())
            .collect();
        let ts = series_from_values("cos", &values, 1).unwrap();
        let f = dependence_features(&ts);
        assert!(f.first_zero_ac.defined);
        assert!(
            (f.first_zero_ac.value - 3.0).abs() <= 1.0,
            "first zero {}",
            f.first_zero_ac.value
        );
        // Local minimum of a cosine ACF sits at half period.
        assert!(f.first_min_ac.defined);
        assert!(
            (f.first_min_ac.value - 6.0).abs() <= 1.0,
            "first min {}",
            f.first_min_ac.value
        );
    }

    #[test]
    fn monotone_acf_masks_min_and_zero() {
        // A strong ramp's ACF decays but stays positive and monotone over
        // the first half, so neither feature triggers.
        let values: Vec<f64> = (0..30).map(|t| t as f64).collect();
        let ts = series_from_values("ramp", &values, 1).unwrap();
        let f = dependence_features(&ts);
        // first_zero may or may not appear at the far tail; first_min must
        // not appear before it.
        if f.first_min_ac.defined && f.first_zero_ac.defined {
            assert!(f.first_zero_ac.value <= f.first_min_ac.value + 1.0);
        }
    }
}
