//! Linear-fit features: R-squared against time and the standard
//! deviation of the first differences.

use crate::core::TimeSeries;
use crate::features::Feat;
use crate::numeric::{diff, ols_line, sample_std};

pub struct RegressionFeatures {
    pub linearity: Feat,
    pub std_deriv1: Feat,
}

pub fn regression_features(ts: &TimeSeries) -> RegressionFeatures {
    let (_, _, r2) = ols_line(ts.values());
    RegressionFeatures {
        linearity: Feat::ok(r2),
        std_deriv1: Feat::ok(sample_std(&diff(ts.values()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::numeric::{mean, r_squared};
    use crate::rng::StreamRng;

    #[test]
    fn exact_line() {
        let values: Vec<f64> = (0..40).map(|t| 3.0 * t as f64 + 7.0).collect();
        let ts = series_from_values("line", &values, 1).unwrap();
        let f = regression_features(&ts);
        assert!((f.linearity.value - 1.0).abs() <= 1e-9);
        assert!(f.std_deriv1.value.abs() <= 1e-12);
    }

    #[test]
    fn constant_series_conventions() {
        let ts = series_from_values("c", &[9.0; 25], 1).unwrap();
        let f = regression_features(&ts);
        assert_eq!(f.linearity.value, 0.0);
        assert_eq!(f.std_deriv1.value, 0.0);
    }

    #[test]
    fn noisy_line_matches_direct_r_squared() {
        let mut rng = StreamRng::new(13).with_str("noisy-line");
        let values: Vec<f64> = (0..1000).map(|t| t as f64 + 10.0 * rng.normal()).collect();
        let ts = series_from_values("n", &values, 1).unwrap();
        let f = regression_features(&ts);
        // Independent oracle: explicit OLS fit, then the R^2 definition.
        let n = values.len();
        let t_mean = (n as f64 - 1.0) / 2.0;
        let y_mean = mean(&values);
        let mut sxy = 0.0;
        let mut sxx = 0.0;
        for (t, &v) in values.iter().enumerate() {
            sxy += (t as f64 - t_mean) * (v - y_mean);
            sxx += (t as f64 - t_mean) * (t as f64 - t_mean);
        }
        let slope = sxy / sxx;
        let intercept = y_mean - slope * t_mean;
        let fitted: Vec<f64> = (0..n).map(|t| intercept + slope * t as f64).collect();
        let oracle = r_squared(&values, &fitted);
        assert!((f.linearity.value - oracle).abs() <= 1e-12);
        assert!(f.linearity.value > 0.0 && f.linearity.value < 1.0);
    }
}
