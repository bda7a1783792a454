//! Per-feature z-scoring fitted on the training meta-set. Masked entries
//! pass through as zero in both directions; zero-variance features keep
//! divisor one so the transform stays invertible.

use serde::{Deserialize, Serialize};

use crate::features::{FeatureVector, FEATURE_COUNT};
use crate::learners::LearnError;
use crate::metadata::MetaRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

/// Fit means and standard deviations over the entries that are defined
/// in each record's mask.
pub fn fit_standardizer(records: &[MetaRecord]) -> Result<Standardizer, LearnError> {
    if records.len() < 2 {
        return Err(LearnError::TooFewRecords(records.len()));
    }
    let mut means = vec![0.0; FEATURE_COUNT];
    let mut sds = vec![1.0; FEATURE_COUNT];
    for i in 0..FEATURE_COUNT {
        let defined: Vec<f64> = records
            .iter()
            .filter(|r| r.features.defined()[i])
            .map(|r| r.features.values()[i])
            .collect();
        if defined.is_empty() {
            continue;
        }
        let m = crate::numeric::mean(&defined);
        let sd = crate::numeric::variance(&defined).sqrt();
        means[i] = m;
        sds[i] = if sd > 1e-12 { sd } else { 1.0 };
    }
    Ok(Standardizer { means, sds })
}

impl Standardizer {
    /// Z-score the defined entries; masked entries stay zero.
    pub fn apply(&self, fv: &FeatureVector) -> Vec<f64> {
        (0..FEATURE_COUNT)
            .map(|i| {
                if fv.defined()[i] {
                    (fv.values()[i] - self.means[i]) / self.sds[i]
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Undo `apply` on the entries the mask marks as defined.
    pub fn inverse(&self, x: &[f64], defined: &[bool; FEATURE_COUNT]) -> Vec<f64> {
        (0..FEATURE_COUNT)
            .map(|i| {
                if defined[i] {
                    x[i] * self.sds[i] + self.means[i]
                } else {
                    0.0
                }
            })
            .collect()
    }
}
