//! Seasonal naive: repeat the last observed cycle.

use serde::{Deserialize, Serialize};

use crate::core::TimeSeries;
use crate::models::{FitFailure, ModelId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalNaiveState {
    pub last_cycle: Vec<f64>,
}

pub fn fit(ts: &TimeSeries) -> Result<SeasonalNaiveState, FitFailure> {
    if !ts.seasonal_usable() {
        return Err(FitFailure::SeasonalityRequired {
            model: ModelId::SeasonalNaive,
        });
    }
    Ok(SeasonalNaiveState {
        last_cycle: ts.values()[ts.len() - ts.period()..].to_vec(),
    })
}

/// Fallback state that always exists: the last cycle when the period is
/// usable, otherwise the last value alone.
pub fn fallback_state(ts: &TimeSeries) -> SeasonalNaiveState {
    let m = ts.effective_period();
    SeasonalNaiveState {
        last_cycle: ts.values()[ts.len() - m..].to_vec(),
    }
}

pub fn forecast(state: &SeasonalNaiveState, h: usize) -> Vec<f64> {
    let m = state.last_cycle.len();
    (0..h).map(|k| state.last_cycle[k % m]).collect()
}
