//! Windowed variability features: lumpiness and stability over
//! non-overlapping tiles, level shift over sliding windows compared one
//! full width apart.

use crate::core::TimeSeries;
use crate::features::Feat;
use crate::numeric::variance;

pub struct WindowFeatures {
    pub lumpiness: Feat,
    pub stability: Feat,
    pub level_shift_max: Feat,
    /// 1-based left-window position of the largest shift.
    pub level_shift_index: Feat,
}

fn masked() -> WindowFeatures {
    WindowFeatures {
        lumpiness: Feat::masked(),
        stability: Feat::masked(),
        level_shift_max: Feat::masked(),
        level_shift_index: Feat::masked(),
    }
}

pub fn window_features(ts: &TimeSeries) -> WindowFeatures {
    let y = ts.values();
    let n = y.len();
    let m = ts.effective_period();
    let w = if m > 1 { m.max(10) } else { 10 };
    if n < 2 * w {
        return masked();
    }

    let tiles: Vec<&[f64]> = y.chunks_exact(w).collect();
    let tile_vars: Vec<f64> = tiles.iter().map(|t| variance(t)).collect();
    let tile_means: Vec<f64> = tiles.iter().map(|t| crate::numeric::mean(t)).collect();
    let lumpiness = Feat::ok(variance(&tile_vars));
    let stability = Feat::ok(variance(&tile_means));

    // Rolling means, then the largest jump between windows w apart, so
    // the compared spans never overlap.
    let inv = 1.0 / w as f64;
    let mut rolling = Vec::with_capacity(n - w + 1);
    let mut acc: f64 = y[..w].iter().sum();
    rolling.push(acc * inv);
    for t in w..n {
        acc += y[t] - y[t - w];
        rolling.push(acc * inv);
    }
    let mut best = 0.0;
    let mut best_idx = 0usize;
    for i in 0..rolling.len() - w {
        let shift = (rolling[i + w] - rolling[i]).abs();
        if shift > best {
            best = shift;
            best_idx = i;
        }
    }
    WindowFeatures {
        lumpiness,
        stability,
        level_shift_max: Feat::ok(best),
        level_shift_index: Feat::ok((best_idx + 1) as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::rng::StreamRng;

    #[test]
    fn constant_series_all_zero_index_one() {
        let ts = series_from_values("c", &[2.0; 50], 1).unwrap();
        let f = window_features(&ts);
        assert_eq!(f.lumpiness.value, 0.0);
        assert_eq!(f.stability.value, 0.0);
        assert_eq!(f.level_shift_max.value, 0.0);
        assert_eq!(f.level_shift_index.value, 1.0);
        assert!(f.lumpiness.defined);
    }

    #[test]
    fn step_series_shift_equals_jump() {
        let mut values = vec![0.0; 50];
        values.extend(vec![10.0; 50]);
        let ts = series_from_values("step", &values, 1).unwrap();
        let f = window_features(&ts);
        assert!((f.level_shift_max.value - 10.0).abs() < 1e-12);
        // Left window ending right where the step begins: 0-based 40,
        // reported 1-based.
        assert_eq!(f.level_shift_index.value, 41.0);
        assert!(f.stability.value > 0.0);
    }

    #[test]
    fn iid_noise_lumpiness_small() {
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let mut rng = StreamRng::new(seed).with_str("lumpy");
            let values: Vec<f64> = (0..1000).map(|_| rng.normal()).collect();
            let ts = series_from_values("n", &values, 1).unwrap();
            let f = window_features(&ts);
            worst = worst.max(f.lumpiness.value);
        }
        assert!(worst < 0.5, "worst lumpiness {worst}");
    }

    #[test]
    fn too_short_is_masked() {
        let ts = series_from_values("s", &[1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap();
        let f = window_features(&ts);
        assert!(!f.lumpiness.defined);
        assert!(!f.level_shift_max.defined);
    }

    #[test]
    fn seasonal_tile_width_follows_period() {
        // Period 12 -> width 12; 24 points is exactly two tiles.
        let values: Vec<f64> = (0..25).map(|t| (t % 12) as f64).collect();
        let ts = series_from_values("p", &values, 12).unwrap();
        let f = window_features(&ts);
        assert!(f.lumpiness.defined);
    }
}
