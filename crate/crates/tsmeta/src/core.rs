//! Validated series, train/test splitting, and the error metric shared by
//! every other module.
//!
//! All types are immutable after construction and every operation is a
//! pure function, so concurrent use needs no coordination.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::tuning::HyperParamAssignment;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("duplicate timestamp at position {0}")]
    DuplicateTimestamp(usize),
    #[error("non-uniform timestamp spacing at position {0}")]
    NonUniformSpacing(usize),
    #[error("non-finite value at position {0}")]
    NonFiniteValue(usize),
    #[error("series too short: {got} points, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("period must be >= 1, got {0}")]
    BadPeriod(usize),
    #[error("bad horizon {h} for series of length {n}")]
    BadHorizon { h: usize, n: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("actual value is zero at position {0}; MAPE undefined")]
    ZeroActual(usize),
    #[error("cannot parse timestamp {0:?}")]
    BadTimestamp(String),
    #[error("malformed csv line {line}: {reason}")]
    BadCsv { line: usize, reason: String },
}

const MIN_LEN: usize = 5;

/// A validated univariate series: strictly increasing, uniformly spaced
/// timestamps, finite values, length >= 5, and a caller-supplied seasonal
/// period (1 = non-seasonal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    id: String,
    timestamps: Vec<i64>,
    values: Vec<f64>,
    period: usize,
    seasonal_usable: bool,
}

impl TimeSeries {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// True when period > 1 and the series spans at least 2*period + 1
    /// points, enough to estimate a seasonal pattern.
    pub fn seasonal_usable(&self) -> bool {
        self.seasonal_usable
    }

    /// Effective period for seasonal computations: the declared period
    /// when usable, else 1.
    pub fn effective_period(&self) -> usize {
        if self.seasonal_usable {
            self.period
        } else {
            1
        }
    }

    /// The first `len` points as a new validated series (same id, period).
    pub fn prefix(&self, len: usize) -> Result<TimeSeries, CoreError> {
        if len > self.len() {
            return Err(CoreError::BadHorizon {
                h: len,
                n: self.len(),
            });
        }
        let raw: Vec<(i64, f64)> = self.timestamps[..len]
            .iter()
            .copied()
            .zip(self.values[..len].iter().copied())
            .collect();
        validate_series(&self.id, &raw, self.period)
    }
}

/// Validate raw (instant, value) pairs into a [`TimeSeries`].
///
/// Checks, in order: period >= 1, length >= 5, finite values, strictly
/// increasing timestamps (equal adjacent -> duplicate), constant spacing.
pub fn validate_series(
    id: &str,
    raw: &[(i64, f64)],
    period: usize,
) -> Result<TimeSeries, CoreError> {
    if period < 1 {
        return Err(CoreError::BadPeriod(period));
    }
    if raw.len() < MIN_LEN {
        return Err(CoreError::TooShort {
            got: raw.len(),
            need: MIN_LEN,
        });
    }
    for (i, &(_, v)) in raw.iter().enumerate() {
        if !v.is_finite() {
            return Err(CoreError::NonFiniteValue(i));
        }
    }
    let step = raw[1].0 - raw[0].0;
    for i in 1..raw.len() {
        let d = raw[i].0 - raw[i - 1].0;
        if d == 0 {
            return Err(CoreError::DuplicateTimestamp(i));
        }
        if d != step || d < 0 {
            return Err(CoreError::NonUniformSpacing(i));
        }
    }
    let n = raw.len();
    Ok(TimeSeries {
        id: id.to_string(),
        timestamps: raw.iter().map(|&(t, _)| t).collect(),
        values: raw.iter().map(|&(_, v)| v).collect(),
        period,
        seasonal_usable: period > 1 && n > 2 * period,
    })
}

/// Convenience constructor with integer timestamps 0..n.
pub fn series_from_values(
    id: &str,
    values: &[f64],
    period: usize,
) -> Result<TimeSeries, CoreError> {
    let raw: Vec<(i64, f64)> = values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, v)| (i as i64, v))
        .collect();
    validate_series(id, &raw, period)
}

/// Test-horizon configuration for holdout evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub horizon: usize,
}

impl SplitConfig {
    pub fn new(horizon: usize) -> Self {
        SplitConfig { horizon }
    }
}

/// Default holdout horizon: a quarter of the series capped at two full
/// seasonal cycles, always leaving at least MIN_LEN training points.
pub fn default_horizon(n: usize, period: usize) -> usize {
    let mut h = n / 4;
    if period > 1 {
        h = h.min(2 * period);
    }
    h = h.min(n.saturating_sub(MIN_LEN));
    h.max(1)
}

/// Split into (first n-h points, last h points). The two parts partition
/// the series; concatenating them reconstructs it bitwise.
pub fn train_test_split(
    ts: &TimeSeries,
    cfg: SplitConfig,
) -> Result<(TimeSeries, TimeSeries), CoreError> {
    let n = ts.len();
    let h = cfg.horizon;
    // Train length 4 is allowed: the shortest valid series (n = 5)
    // must still admit an h = 1 holdout.
    if h < 1 || h >= n || n - h < MIN_LEN - 1 {
        return Err(CoreError::BadHorizon { h, n });
    }
    let cut = n - h;
    let mk = |ids: &str, ts_slice: &[i64], v_slice: &[f64]| TimeSeries {
        id: ids.to_string(),
        timestamps: ts_slice.to_vec(),
        values: v_slice.to_vec(),
        period: ts.period,
        seasonal_usable: ts.period > 1 && v_slice.len() > 2 * ts.period,
    };
    Ok((
        mk(&ts.id, &ts.timestamps[..cut], &ts.values[..cut]),
        mk(&ts.id, &ts.timestamps[cut..], &ts.values[cut..]),
    ))
}

/// Mean absolute percentage error: mean over t of |a_t - f_t| / |a_t|.
pub fn mape(actual: &[f64], forecast: &[f64]) -> Result<f64, CoreError> {
    if actual.len() != forecast.len() || actual.is_empty() {
        return Err(CoreError::LengthMismatch(actual.len(), forecast.len()));
    }
    let mut acc = 0.0;
    for (i, (&a, &f)) in actual.iter().zip(forecast).enumerate() {
        if a == 0.0 {
            return Err(CoreError::ZeroActual(i));
        }
        acc += (a - f).abs() / a.abs();
    }
    Ok(acc / actual.len() as f64)
}

/// Point forecasts for a fixed horizon, tagged with the producing model
/// and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub horizon: usize,
    pub point_forecasts: Vec<f64>,
    pub model_id: crate::models::ModelId,
    pub params: HyperParamAssignment,
    /// Set when the requested model failed to fit and a fallback
    /// produced these values instead.
    #[serde(default)]
    pub fallback: bool,
}

impl ForecastResult {
    pub fn new(
        model_id: crate::models::ModelId,
        params: HyperParamAssignment,
        point_forecasts: Vec<f64>,
    ) -> Self {
        debug_assert!(point_forecasts.iter().all(|v| v.is_finite()));
        ForecastResult {
            horizon: point_forecasts.len(),
            point_forecasts,
            model_id,
            params,
            fallback: false,
        }
    }
}

// --- CSV ingestion -------------------------------------------------------

/// Parse a timestamp token: a base-10 integer, `YYYY-MM` (month count),
/// `YYYY-MM-DD` (day count), or `YYYY-MM-DDTHH:MM:SS[Z]` (second count).
pub fn parse_timestamp(tok: &str) -> Result<i64, CoreError> {
    let tok = tok.trim();
    if let Ok(v) = tok.parse::<i64>() {
        return Ok(v);
    }
    let bad = || CoreError::BadTimestamp(tok.to_string());
    let bytes = tok.as_bytes();
    let digits = |s: &str| -> Result<i64, CoreError> { s.parse::<i64>().map_err(|_| bad()) };
    if bytes.len() >= 7 && bytes[4] == b'-' {
        let year = digits(&tok[0..4])?;
        let month = digits(&tok[5..7])?;
        if !(1..=12).contains(&month) {
            return Err(bad());
        }
        if bytes.len() == 7 {
            return Ok(year * 12 + (month - 1));
        }
        if bytes.len() >= 10 && bytes[7] == b'-' {
            let day = digits(&tok[8..10])?;
            if !(1..=31).contains(&day) {
                return Err(bad());
            }
            let days = days_from_civil(year, month as u32, day as u32);
            if bytes.len() == 10 {
                return Ok(days);
            }
            if bytes.len() >= 19 && (bytes[10] == b'T' || bytes[10] == b' ') {
                let hh = digits(&tok[11..13])?;
                let mm = digits(&tok[14..16])?;
                let ss = digits(&tok[17..19])?;
                let rest = &tok[19..];
                if !(rest.is_empty() || rest == "Z") {
                    return Err(bad());
                }
                if hh > 23 || mm > 59 || ss > 60 {
                    return Err(bad());
                }
                return Ok(days * 86_400 + hh * 3600 + mm * 60 + ss);
            }
        }
    }
    Err(bad())
}

/// Days since 1970-01-01 for a proleptic Gregorian civil date.
fn days_from_civil(mut y: i64, m: u32, d: u32) -> i64 {
    if m <= 2 {
        y -= 1;
    }
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = (m as i64 + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Read one series from a `timestamp,value` CSV. The filename stem is the
/// series id.
pub fn read_series_csv(path: &Path, period: usize) -> Result<TimeSeries, CoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::BadCsv {
        line: 0,
        reason: e.to_string(),
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".to_string());
    let mut raw = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("timestamp,value") => {}
        _ => {
            return Err(CoreError::BadCsv {
                line: 1,
                reason: "expected header `timestamp,value`".to_string(),
            })
        }
    }
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (t_tok, v_tok) = line.split_once(',').ok_or_else(|| CoreError::BadCsv {
            line: idx + 1,
            reason: "expected two comma-separated fields".to_string(),
        })?;
        let t = parse_timestamp(t_tok)?;
        let v = v_tok.trim().parse::<f64>().map_err(|_| CoreError::BadCsv {
            line: idx + 1,
            reason: format!("bad value {v_tok:?}"),
        })?;
        raw.push((t, v));
    }
    validate_series(&id, &raw, period)
}

/// Write a series back out in the ingestion format.
pub fn write_series_csv(path: &Path, ts: &TimeSeries) -> std::io::Result<()> {
    let mut out = String::from("timestamp,value\n");
    for (t, v) in ts.timestamps().iter().zip(ts.values()) {
        out.push_str(&format!("{t},{v}\n"));
    }
    std::fs::write(path, out)
}
