//! The 40-entry feature vector and the statistics behind it.
//!
//! Every feature is a total function of the series: anything undefined
//! for a given input (seasonal features of a non-seasonal series,
//! statistics of a constant series, windows that do not fit) comes back
//! as 0 with its entry cleared in a parallel defined-mask, so learners
//! always see rectangular input. Extraction is pure and deterministic.

pub mod autocorr;
pub mod decompose;
pub mod dependence;
pub mod distribution;
pub mod regression;
pub mod smoothing;
pub mod spectral;
pub mod stationarity;
pub mod stl;
pub mod windows;

use serde::de::Error as DeError;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

use crate::core::TimeSeries;
use crate::numeric::{mean, variance};

/// One feature value plus whether it is actually defined for the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feat {
    pub value: f64,
    pub defined: bool,
}

impl Feat {
    pub fn ok(value: f64) -> Feat {
        if value.is_finite() {
            Feat {
                value,
                defined: true,
            }
        } else {
            Feat::masked()
        }
    }

    pub fn masked() -> Feat {
        Feat {
            value: 0.0,
            defined: false,
        }
    }
}

pub const FEATURE_COUNT: usize = 40;

/// Schema order of the feature vector. Serialized maps follow this
/// order exactly.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "length",
    "mean",
    "variance",
    "spectral_entropy",
    "lumpiness",
    "stability",
    "trend_strength",
    "seasonal_strength",
    "spikiness",
    "peak",
    "trough",
    "flat_spots",
    "level_shift_max",
    "level_shift_index",
    "hurst",
    "acf_y_1",
    "acf_diff1_1",
    "acf_diff2_1",
    "acf_y_sumsq5",
    "acf_diff1_sumsq5",
    "acf_diff2_sumsq5",
    "acf_seasonal",
    "pacf_y_sumsq5",
    "pacf_diff1_sumsq5",
    "pacf_diff2_sumsq5",
    "pacf_seasonal",
    "first_min_ac",
    "first_zero_ac",
    "linearity",
    "std_deriv1",
    "crossing_points",
    "binarize_mean",
    "arch_stat",
    "histogram_mode",
    "kpss_stat",
    "holt_alpha",
    "holt_beta",
    "hw_alpha",
    "hw_beta",
    "hw_gamma",
];

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|&n| n == name)
}

/// Exactly 40 named entries in schema order, every value finite, with a
/// defined-mask marking which entries are real rather than placeholder
/// zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: [f64; FEATURE_COUNT],
    defined: [bool; FEATURE_COUNT],
}

impl Default for FeatureVector {
    fn default() -> Self {
        FeatureVector {
            values: [0.0; FEATURE_COUNT],
            defined: [false; FEATURE_COUNT],
        }
    }
}

impl FeatureVector {
    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.values
    }

    pub fn defined(&self) -> &[bool; FEATURE_COUNT] {
        &self.defined
    }

    pub fn get(&self, name: &str) -> Option<Feat> {
        let idx = feature_index(name)?;
        Some(Feat {
            value: self.values[idx],
            defined: self.defined[idx],
        })
    }

    pub fn set(&mut self, idx: usize, feat: Feat) {
        self.values[idx] = if feat.defined { feat.value } else { 0.0 };
        self.defined[idx] = feat.defined;
    }

    pub fn set_named(&mut self, name: &str, feat: Feat) {
        let idx = feature_index(name).unwrap_or_else(|| panic!("unknown feature {name}"));
        self.set(idx, feat);
    }
}

impl Serialize for FeatureVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Values<'a>(&'a FeatureVector);
        struct Mask<'a>(&'a FeatureVector);
        impl Serialize for Values<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(FEATURE_COUNT))?;
                for (i, name) in FEATURE_NAMES.iter().enumerate() {
                    map.serialize_entry(name, &self.0.values[i])?;
                }
                map.end()
            }
        }
        impl Serialize for Mask<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(FEATURE_COUNT))?;
                for (i, name) in FEATURE_NAMES.iter().enumerate() {
                    map.serialize_entry(name, &self.0.defined[i])?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("features", &Values(self))?;
        map.serialize_entry("mask", &Mask(self))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for FeatureVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            features: BTreeMap<String, f64>,
            mask: BTreeMap<String, bool>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut fv = FeatureVector::default();
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            let value = *repr
                .features
                .get(*name)
                .ok_or_else(|| D::Error::custom(format!("missing feature {name}")))?;
            let defined = *repr
                .mask
                .get(*name)
                .ok_or_else(|| D::Error::custom(format!("missing mask entry {name}")))?;
            if defined && !value.is_finite() {
                return Err(D::Error::custom(format!("non-finite feature {name}")));
            }
            fv.set(i, Feat { value, defined });
        }
        Ok(fv)
    }
}

/// Compute all 40 features. Never fails: whatever cannot be computed is
/// masked.
pub fn extract_features(ts: &TimeSeries) -> FeatureVector {
    let y = ts.values();
    let mut fv = FeatureVector::default();
    fv.set_named("length", Feat::ok(y.len() as f64));
    fv.set_named("mean", Feat::ok(mean(y)));
    fv.set_named("variance", Feat::ok(variance(y)));

    match spectral::spectral_entropy(ts) {
        Ok(h) => fv.set_named("spectral_entropy", Feat::ok(h)),
        Err(_) => fv.set_named("spectral_entropy", Feat::masked()),
    }

    let w = windows::window_features(ts);
    fv.set_named("lumpiness", w.lumpiness);
    fv.set_named("stability", w.stability);
    fv.set_named("level_shift_max", w.level_shift_max);
    fv.set_named("level_shift_index", w.level_shift_index);

    let d = decompose::decompose(ts);
    let s = stl::stl_features(&d);
    fv.set_named("trend_strength", s.trend_strength);
    fv.set_named("seasonal_strength", s.seasonal_strength);
    fv.set_named("spikiness", s.spikiness);
    fv.set_named("peak", s.peak);
    fv.set_named("trough", s.trough);

    let dist = distribution::distribution_features(ts, distribution::DEFAULT_NBINS);
    fv.set_named("flat_spots", dist.flat_spots);
    fv.set_named("histogram_mode", dist.histogram_mode);
    fv.set_named("binarize_mean", dist.binarize_mean);
    fv.set_named("crossing_points", dist.crossing_points);

    let dep = dependence::dependence_features(ts);
    fv.set_named("hurst", dep.hurst);
    fv.set_named("first_min_ac", dep.first_min_ac);
    fv.set_named("first_zero_ac", dep.first_zero_ac);

    let ac = autocorr::acf_pacf_features(ts);
    fv.set_named("acf_y_1", ac.acf_y_1);
    fv.set_named("acf_diff1_1", ac.acf_diff1_1);
    fv.set_named("acf_diff2_1", ac.acf_diff2_1);
    fv.set_named("acf_y_sumsq5", ac.acf_y_sumsq5);
    fv.set_named("acf_diff1_sumsq5", ac.acf_diff1_sumsq5);
    fv.set_named("acf_diff2_sumsq5", ac.acf_diff2_sumsq5);
    fv.set_named("acf_seasonal", ac.acf_seasonal);
    fv.set_named("pacf_y_sumsq5", ac.pacf_y_sumsq5);
    fv.set_named("pacf_diff1_sumsq5", ac.pacf_diff1_sumsq5);
    fv.set_named("pacf_diff2_sumsq5", ac.pacf_diff2_sumsq5);
    fv.set_named("pacf_seasonal", ac.pacf_seasonal);

    let reg = regression::regression_features(ts);
    fv.set_named("linearity", reg.linearity);
    fv.set_named("std_deriv1", reg.std_deriv1);

    let st = stationarity::stationarity_features(ts);
    fv.set_named("kpss_stat", st.kpss_stat);
    fv.set_named("arch_stat", st.arch_stat);

    let sm = smoothing::smoothing_param_features(ts);
    fv.set_named("holt_alpha", sm.holt_alpha);
    fv.set_named("holt_beta", sm.holt_beta);
    fv.set_named("hw_alpha", sm.hw_alpha);
    fv.set_named("hw_beta", sm.hw_beta);
    fv.set_named("hw_gamma", sm.hw_gamma);

    fv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::rng::StreamRng;

    fn ar1_series(n: usize, seed: u64) -> TimeSeries {
        let mut rng = StreamRng::new(seed).with_str("fv-ar1");
        let mut x = 0.0;
        let values: Vec<f64> = (0..n)
            .map(|_| {
                x = 0.6 * x + rng.normal();
                x + 30.0
            })
            .collect();
        series_from_values("ar1", &values, 12).unwrap()
    }

    #[test]
    fn forty_finite_entries_always() {
        let cases = [
            ar1_series(150, 1),
            series_from_values("c", &[5.0; 30], 4).unwrap(),
            series_from_values("tiny", &[1.0, 2.0, 3.0, 2.0, 1.0], 1).unwrap(),
        ];
        for ts in cases {
            let fv = extract_features(&ts);
            assert_eq!(fv.values().len(), FEATURE_COUNT);
            assert!(fv.values().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn constant_series_masks_zeroed() {
        let ts = series_from_values("c", &[5.0; 40], 4).unwrap();
        let fv = extract_features(&ts);
        assert_eq!(fv.get("mean").unwrap().value, 5.0);
        assert_eq!(fv.get("variance").unwrap().value, 0.0);
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            if !fv.defined()[i] {
                assert_eq!(fv.values()[i], 0.0, "masked {name} must be zeroed");
            }
        }
        assert!(!fv.get("spectral_entropy").unwrap().defined);
        assert!(!fv.get("acf_y_1").unwrap().defined);
    }

    #[test]
    fn composition_matches_individual_operations_bitwise() {
        let ts = ar1_series(200, 42);
        let fv = extract_features(&ts);
        let d = decompose::decompose(&ts);
        let s = stl::stl_features(&d);
        assert_eq!(
            fv.get("trend_strength").unwrap().value.to_bits(),
            s.trend_strength.value.to_bits()
        );
        let dep = dependence::dependence_features(&ts);
        assert_eq!(
            fv.get("hurst").unwrap().value.to_bits(),
            dep.hurst.value.to_bits()
        );
        let ac = autocorr::acf_pacf_features(&ts);
        assert_eq!(
            fv.get("acf_y_sumsq5").unwrap().value.to_bits(),
            ac.acf_y_sumsq5.value.to_bits()
        );
        let sm = smoothing::smoothing_param_features(&ts);
        assert_eq!(
            fv.get("hw_gamma").unwrap().value.to_bits(),
            sm.hw_gamma.value.to_bits()
        );
        assert_eq!(fv.get("length").unwrap().value, 200.0);
        assert_eq!(
            fv.get("mean").unwrap().value.to_bits(),
            mean(ts.values()).to_bits()
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let ts = ar1_series(120, 7);
        let a = extract_features(&ts);
        let b = extract_features(&ts);
        for i in 0..FEATURE_COUNT {
            assert_eq!(a.values()[i].to_bits(), b.values()[i].to_bits());
            assert_eq!(a.defined()[i], b.defined()[i]);
        }
    }

    #[test]
    fn shift_leaves_shape_features_unchanged() {
        let ts = ar1_series(180, 3);
        let shifted_values: Vec<f64> = ts.values().iter().map(|v| v + 1000.0).collect();
        let ts_shifted = series_from_values(ts.id(), &shifted_values, ts.period()).unwrap();
        let a = extract_features(&ts);
        let b = extract_features(&ts_shifted);
        for name in [
            "spectral_entropy",
            "lumpiness",
            "acf_y_1",
            "acf_y_sumsq5",
            "pacf_y_sumsq5",
            "acf_seasonal",
            "hurst",
            "crossing_points",
            "linearity",
            "std_deriv1",
            "arch_stat",
            "kpss_stat",
        ] {
            let va = a.get(name).unwrap().value;
            let vb = b.get(name).unwrap().value;
            assert!(
                (va - vb).abs() <= 1e-9 * va.abs().max(1.0),
                "{name}: {va} vs {vb}"
            );
        }
    }

    #[test]
    fn scale_covariance() {
        let ts = ar1_series(180, 5);
        let k = 7.5;
        let scaled_values: Vec<f64> = ts.values().iter().map(|v| v * k).collect();
        let ts_scaled = series_from_values(ts.id(), &scaled_values, ts.period()).unwrap();
        let a = extract_features(&ts);
        let b = extract_features(&ts_scaled);
        for name in [
            "spectral_entropy",
            "acf_y_1",
            "acf_y_sumsq5",
            "pacf_y_sumsq5",
            "hurst",
            "linearity",
            "binarize_mean",
            "crossing_points",
        ] {
            let va = a.get(name).unwrap().value;
            let vb = b.get(name).unwrap().value;
            assert!(
                (va - vb).abs() <= 1e-9 * va.abs().max(1.0),
                "{name}: {va} vs {vb}"
            );
        }
        let var_a = a.get("variance").unwrap().value;
        let var_b = b.get("variance").unwrap().value;
        assert!((var_b - k * k * var_a).abs() <= 1e-9 * var_b.abs().max(1.0));
    }

    #[test]
    fn serde_round_trip_preserves_bits_and_order() {
        let ts = ar1_series(100, 11);
        let fv = extract_features(&ts);
        let json = serde_json::to_string(&fv).unwrap();
        // Schema order on the wire.
        let first = json.find("\"length\"").unwrap();
        let second = json.find("\"mean\"").unwrap();
        let last = json.find("\"hw_gamma\"").unwrap();
        assert!(first < second && second < last);
        let back: FeatureVector = serde_json::from_str(&json).unwrap();
        for i in 0..FEATURE_COUNT {
            assert_eq!(fv.values()[i].to_bits(), back.values()[i].to_bits());
            assert_eq!(fv.defined()[i], back.defined()[i]);
        }
    }
}
