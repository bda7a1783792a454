//! ARIMA(p, d, q) by Hannan-Rissanen two-stage least squares followed by
//! Nelder-Mead refinement of the conditional sum of squares. A mean term
//! is included only when d = 0, so ARIMA(0,1,0) forecasts the last value
//! with no drift.

use serde::{Deserialize, Serialize};

use crate::core::TimeSeries;
use crate::models::{FitFailure, ModelId};
use crate::numeric::{mean, min_root_modulus, nelder_mead, ols};
use crate::tuning::HyperParamAssignment;

const MAX_ORDER: i64 = 5;
const MAX_DIFF: i64 = 2;
const CSS_STEPS: usize = 200;
const STATIONARITY_RADIUS: f64 = 1.001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaState {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub mu: f64,
    /// Demeaned differenced series the recursion ran on.
    pub z: Vec<f64>,
    /// Conditional residuals aligned with `z` (zero before index p).
    pub residuals: Vec<f64>,
    /// Last value of diff^j(y) for j = 0..d, used to re-integrate.
    pub integrate_lasts: Vec<f64>,
}

fn order(params: &HyperParamAssignment, name: &str, hi: i64) -> Result<usize, FitFailure> {
    let v = params.int(name).ok_or_else(|| FitFailure::BadParams {
        model: ModelId::Arima,
        detail: format!("missing integer {name}"),
    })?;
    if !(0..=hi).contains(&v) {
        return Err(FitFailure::BadParams {
            model: ModelId::Arima,
            detail: format!("{name}={v} outside 0..={hi}"),
        });
    }
    Ok(v as usize)
}

/// Conditional residuals of an ARMA(p, q) recursion on z, zero before
/// index p. Returns None on numeric blow-up.
fn css_residuals(z: &[f64], phi: &[f64], theta: &[f64]) -> Option<Vec<f64>> {
    let p = phi.len();
    let mut e = vec![0.0; z.len()];
    for t in p..z.len() {
        let mut pred = 0.0;
        for (i, &ph) in phi.iter().enumerate() {
            pred += ph * z[t - 1 - i];
        }
        for (j, &th) in theta.iter().enumerate() {
            if t > j {
                pred += th * e[t - 1 - j];
            }
        }
        let r = z[t] - pred;
        if !r.is_finite() {
            return None;
        }
        e[t] = r;
    }
    Some(e)
}

fn css(z: &[f64], phi: &[f64], theta: &[f64]) -> f64 {
    if !phi.is_empty() {
        let coeffs: Vec<f64> = phi.iter().map(|p| -p).collect();
        let min_mod = min_root_modulus(&coeffs);
        if min_mod <= STATIONARITY_RADIUS {
            // Smooth penalty pushes the simplex back inside the
            // stationarity region.
            return 1e12 * (1.0 + (STATIONARITY_RADIUS - min_mod).max(0.0));
        }
    }
    match css_residuals(z, phi, theta) {
        Some(e) => {
            let s: f64 = e.iter().map(|v| v * v).sum();
            if s.is_finite() {
                s
            } else {
                1e12
            }
        }
        None => 1e12,
    }
}

/// Two-stage Hannan-Rissanen start values: a long autoregression supplies
/// residual estimates, then one joint regression on p lags of z and q
/// lags of those residuals.
fn hannan_rissanen(z: &[f64], p: usize, q: usize) -> Result<(Vec<f64>, Vec<f64>), FitFailure> {
    let n = z.len();
    let long_order = 8.max(p + q);
    let t0 = long_order.max(p).max(q);
    if n < t0 + p + q + 2 || n <= long_order + long_order {
        return Err(FitFailure::TooShort {
            model: ModelId::Arima,
            detail: format!("{n} differenced points for long-AR order {long_order}"),
        });
    }
    // Stage 1: long AR by OLS.
    let rows = n - long_order;
    let mut columns: Vec<Vec<f64>> = (1..=long_order)
        .map(|lag| (long_order..n).map(|t| z[t - lag]).collect())
        .collect();
    let target: Vec<f64> = z[long_order..].to_vec();
    let col_refs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
    let long_ar = ols(&col_refs, &target).ok_or(FitFailure::SingularSystem {
        model: ModelId::Arima,
    })?;
    let mut e_hat = vec![0.0; n];
    for t in long_order..n {
        let mut pred = 0.0;
        for (i, &a) in long_ar.iter().enumerate() {
            pred += a * z[t - 1 - i];
        }
        e_hat[t] = z[t] - pred;
    }
    debug_assert_eq!(rows, target.len());

    // Stage 2: regress z on p lags of z and q lags of the residuals.
    let t_start = (long_order + q).max(p);
    if n - t_start < p + q + 2 {
        return Err(FitFailure::TooShort {
            model: ModelId::Arima,
            detail: format!("{} usable rows for {} coefficients", n - t_start, p + q),
        });
    }
    columns = Vec::with_capacity(p + q);
    for lag in 1..=p {
        columns.push((t_start..n).map(|t| z[t - lag]).collect());
    }
    for lag in 1..=q {
        columns.push((t_start..n).map(|t| e_hat[t - lag]).collect());
    }
    let target: Vec<f64> = z[t_start..].to_vec();
    let col_refs: Vec<&[f64]> = columns.iter().map(|c| c.as_slice()).collect();
    let coef = ols(&col_refs, &target).ok_or(FitFailure::SingularSystem {
        model: ModelId::Arima,
    })?;
    Ok((coef[..p].to_vec(), coef[p..].to_vec()))
}

pub fn fit(ts: &TimeSeries, params: &HyperParamAssignment) -> Result<ArimaState, FitFailure> {
    let p = order(params, "p", MAX_ORDER)?;
    let d = order(params, "d", MAX_DIFF)?;
    let q = order(params, "q", MAX_ORDER)?;

    // Difference d times, remembering the tail needed for integration.
    let mut integrate_lasts = Vec::with_capacity(d);
    let mut w = ts.values().to_vec();
    for _ in 0..d {
        integrate_lasts.push(*w.last().unwrap());
        if w.len() < 2 {
            return Err(FitFailure::TooShort {
                model: ModelId::Arima,
                detail: "cannot difference".to_string(),
            });
        }
        w = w.windows(2).map(|pair| pair[1] - pair[0]).collect();
    }
    if w.len() < (p + q + 3).max(5) {
        return Err(FitFailure::TooShort {
            model: ModelId::Arima,
            detail: format!("{} points after differencing", w.len()),
        });
    }
    let mu = if d == 0 { mean(&w) } else { 0.0 };
    let z: Vec<f64> = w.iter().map(|v| v - mu).collect();

    let (phi, theta) = if p + q == 0 {
        (Vec::new(), Vec::new())
    } else {
        let (phi0, theta0) = hannan_rissanen(&z, p, q)?;
        let mut x0 = phi0;
        x0.extend_from_slice(&theta0);
        // If the start point is already non-stationary, pull it toward
        // the origin until the objective is finite.
        if css(&z, &x0[..p], &x0[p..]) >= 1e12 {
            for v in x0.iter_mut() {
                *v *= 0.5;
            }
            if css(&z, &x0[..p], &x0[p..]) >= 1e12 {
                x0 = vec![0.0; p + q];
            }
        }
        let zc = z.clone();
        let best = nelder_mead(move |x| css(&zc, &x[..p], &x[p..]), &x0, 0.1, CSS_STEPS);
        (best[..p].to_vec(), best[p..].to_vec())
    };

    if !phi.is_empty() {
        let coeffs: Vec<f64> = phi.iter().map(|v| -v).collect();
        if min_root_modulus(&coeffs) <= STATIONARITY_RADIUS {
            return Err(FitFailure::NonStationary {
                model: ModelId::Arima,
            });
        }
    }
    if phi.iter().chain(&theta).any(|v| !v.is_finite()) {
        return Err(FitFailure::NonFinite {
            model: ModelId::Arima,
        });
    }
    let residuals = css_residuals(&z, &phi, &theta).ok_or(FitFailure::NonFinite {
        model: ModelId::Arima,
    })?;
    Ok(ArimaState {
        p,
        d,
        q,
        phi,
        theta,
        mu,
        z,
        residuals,
        integrate_lasts,
    })
}

pub fn forecast(state: &ArimaState, h: usize) -> Vec<f64> {
    let n = state.z.len();
    // Forecast the stationary component with future shocks at zero.
    let mut z_ext = state.z.clone();
    for k in 0..h {
        let t = n + k;
        let mut pred = 0.0;
        for (i, &ph) in state.phi.iter().enumerate() {
            pred += ph * z_ext[t - 1 - i];
        }
        for (j, &th) in state.theta.iter().enumerate() {
            let idx = t - 1 - j;
            if idx < n {
                pred += th * state.residuals[idx];
            }
        }
        z_ext.push(pred);
    }
    let mut out: Vec<f64> = z_ext[n..].iter().map(|v| v + state.mu).collect();
    // Undo the d differences, innermost last.
    for &last in state.integrate_lasts.iter().rev() {
        let mut acc = last;
        for v in out.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;
    use crate::rng::StreamRng;
    use crate::tuning::ParamValue;

    fn arima_params(p: i64, d: i64, q: i64) -> HyperParamAssignment {
        HyperParamAssignment::empty(ModelId::Arima)
            .set("p", ParamValue::Int(p))
            .set("d", ParamValue::Int(d))
            .set("q", ParamValue::Int(q))
    }

    fn ar1_series(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = StreamRng::new(seed).with_str("ar1");
        let mut x = 0.0;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            x = phi * x + rng.normal();
            out.push(x + 50.0);
        }
        out
    }

    #[test]
    fn recovers_ar1_coefficient() {
        let values = ar1_series(0.7, 600, 4);
        let ts = series_from_values("ar1", &values, 1).unwrap();
        let state = fit(&ts, &arima_params(1, 0, 0)).unwrap();
        assert!(
            (state.phi[0] - 0.7).abs() < 0.12,
            "phi estimate {}",
            state.phi[0]
        );
    }

    #[test]
    fn arma11_residual_variance_near_one() {
        // x_t = 0.6 x_{t-1} + eps_t + 0.3 eps_{t-1}, unit shocks.
        let mut rng = StreamRng::new(9).with_str("arma");
        let mut x = 0.0;
        let mut prev_eps = 0.0;
        let mut values = Vec::with_capacity(800);
        for _ in 0..800 {
            let eps = rng.normal();
            x = 0.6 * x + eps + 0.3 * prev_eps;
            prev_eps = eps;
            values.push(x + 10.0);
        }
        let ts = series_from_values("arma", &values, 1).unwrap();
        let state = fit(&ts, &arima_params(1, 0, 1)).unwrap();
        let tail = &state.residuals[state.p..];
        let var = crate::numeric::variance(tail);
        assert!((var - 1.0).abs() < 0.2, "residual variance {var}");
        assert!((state.phi[0] - 0.6).abs() < 0.15, "phi {}", state.phi[0]);
    }

    #[test]
    fn double_difference_integration_round_trip() {
        // Quadratic series: second difference is constant, so (0,2,0)
        // forecasts continue the quadratic's last difference pattern.
        let values: Vec<f64> = (0..30).map(|t| (t * t) as f64).collect();
        let ts = series_from_values("quad", &values, 1).unwrap();
        let state = fit(&ts, &arima_params(0, 2, 0)).unwrap();
        let fc = forecast(&state, 3);
        // diff^2 forecast 0 keeps the last first-difference (57) constant:
        // 841+57, +57, +57.
        assert_eq!(fc, vec![898.0, 955.0, 1012.0]);
    }

    #[test]
    fn mean_included_only_when_undifferenced() {
        let values = ar1_series(0.3, 200, 7);
        let ts = series_from_values("m", &values, 1).unwrap();
        let s0 = fit(&ts, &arima_params(0, 0, 0)).unwrap();
        assert!((s0.mu - mean(&values)).abs() < 1e-12);
        let fc = forecast(&s0, 3);
        for v in fc {
            assert!((v - s0.mu).abs() < 1e-12);
        }
        let s1 = fit(&ts, &arima_params(0, 1, 0)).unwrap();
        assert_eq!(s1.mu, 0.0);
    }

    #[test]
    fn too_short_after_differencing() {
        let values: Vec<f64> = (0..10).map(|t| t as f64).collect();
        let ts = series_from_values("short", &values, 1).unwrap();
        assert!(matches!(
            fit(&ts, &arima_params(3, 2, 3)),
            Err(FitFailure::TooShort { .. })
        ));
    }

    #[test]
    fn css_penalizes_explosive_coefficients() {
        let z: Vec<f64> = (0..50).map(|t| (t as f64 * 0.37).sin()).collect();
        assert!(css(&z, &[1.01], &[]) >= 1e12);
        assert!(css(&z, &[0.9995], &[]) >= 1e12, "inside the 1.001 radius");
        assert!(css(&z, &[0.95], &[]) < 1e12);
    }

    #[test]
    fn css_prefers_true_parameters_over_perturbed() {
        let values = ar1_series(0.8, 1000, 11);
        let ts = series_from_values("css", &values, 1).unwrap();
        let state = fit(&ts, &arima_params(1, 0, 0)).unwrap();
        let fitted_css = css(&state.z, &state.phi, &state.theta);
        for bad in [0.3, 0.99, -0.5] {
            assert!(fitted_css <= css(&state.z, &[bad], &[]), "phi={bad}");
        }
    }
}
