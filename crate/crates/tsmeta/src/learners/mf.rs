//! Model recommendation by matrix factorization: with the feature matrix
//! as fixed row embeddings, learn one ridge-regressed embedding per model
//! so the product approximates the observed error matrix, then rank
//! models for a new series by predicted error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::ModelId;
use crate::numeric::solve_dense;

#[derive(Debug, Error, PartialEq)]
pub enum MfError {
    #[error("singular normal equations for model column {0} (lambda = 0)")]
    SingularSystem(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MFModel {
    /// One embedding row per model, each of feature dimension.
    pub v: Vec<Vec<f64>>,
    pub model_ids: Vec<ModelId>,
    pub lambda: f64,
}

/// Ridge least squares per model column, missing entries excluded:
/// v_k = argmin sum over observed i of (a_ik - u_i . v)^2 + lambda |v|^2.
pub fn mf_fit(
    a: &[Vec<Option<f64>>],
    u: &[Vec<f64>],
    model_ids: &[ModelId],
    lambda: f64,
) -> Result<MFModel, MfError> {
    if a.len() != u.len() {
        return Err(MfError::Shape(format!(
            "{} error rows vs {} feature rows",
            a.len(),
            u.len()
        )));
    }
    let k = model_ids.len();
    if a.iter().any(|row| row.len() != k) {
        return Err(MfError::Shape(format!("error rows must have {k} columns")));
    }
    let d = u.first().map(|r| r.len()).unwrap_or(0);
    let mut v = Vec::with_capacity(k);
    for col in 0..k {
        let mut gram = vec![0.0; d * d];
        let mut rhs = vec![0.0; d];
        for (row_a, row_u) in a.iter().zip(u) {
            let Some(target) = row_a[col] else { continue };
            for i in 0..d {
                rhs[i] += target * row_u[i];
                for j in i..d {
                    gram[i * d + j] += row_u[i] * row_u[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                gram[i * d + j] = gram[j * d + i];
            }
            gram[i * d + i] += lambda;
        }
        let solution = solve_dense(&mut gram, &mut rhs, d).ok_or(MfError::SingularSystem(col))?;
        v.push(solution);
    }
    Ok(MFModel {
        v,
        model_ids: model_ids.to_vec(),
        lambda,
    })
}

impl MFModel {
    /// Predicted error per model for one feature vector.
    pub fn scores(&self, u_star: &[f64]) -> Vec<f64> {
        self.v
            .iter()
            .map(|row| row.iter().zip(u_star).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.v
            .iter()
            .flat_map(|row| row.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }
}

/// Models ordered by ascending predicted error; stable on ties so equal
/// scores keep model order.
pub fn mf_rank(mf: &MFModel, u_star: &[f64]) -> Vec<(ModelId, f64)> {
    let scores = mf.scores(u_star);
    let mut out: Vec<(ModelId, f64)> = mf.model_ids.iter().copied().zip(scores).collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}
