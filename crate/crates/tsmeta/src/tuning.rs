//! Hyper-parameter spaces, trial evaluation, and the two search
//! baselines: random search and grid search.
//!
//! Trials are keyed off (seed, series id, model id, trial index), so a
//! search is reproducible regardless of execution order or thread count,
//! and a longer search extends a shorter one (prefix property).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{mape, train_test_split, SplitConfig, TimeSeries};
use crate::models::{self, ModelId};
use crate::rng::StreamRng;

#[derive(Debug, Error, PartialEq)]
pub enum TuneError {
    #[error("search needs at least one trial")]
    EmptySearch,
    #[error("grid of {0} points exceeds the 100000-point cap")]
    GridTooLarge(usize),
    #[error("parameter {name} invalid for this space: {reason}")]
    InvalidAssignment { name: String, reason: String },
}

/// One hyper-parameter's domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub name: String,
    pub kind: ParamKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamKind {
    Categorical { labels: Vec<String> },
    Integer { lo: i64, hi: i64 },
    Continuous { lo: f64, hi: f64 },
}

impl ParamDomain {
    pub fn categorical(name: &str, labels: &[&str]) -> Self {
        ParamDomain {
            name: name.to_string(),
            kind: ParamKind::Categorical {
                labels: labels.iter().map(|s| s.to_string()).collect(),
            },
        }
    }

    pub fn integer(name: &str, lo: i64, hi: i64) -> Self {
        debug_assert!(lo <= hi);
        ParamDomain {
            name: name.to_string(),
            kind: ParamKind::Integer { lo, hi },
        }
    }

    pub fn continuous(name: &str, lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        ParamDomain {
            name: name.to_string(),
            kind: ParamKind::Continuous { lo, hi },
        }
    }

    fn contains(&self, value: &ParamValue) -> bool {
        match (&self.kind, value) {
            (ParamKind::Categorical { labels }, ParamValue::Cat(v)) => labels.contains(v),
            (ParamKind::Integer { lo, hi }, ParamValue::Int(v)) => (lo..=hi).contains(&v),
            (ParamKind::Continuous { lo, hi }, ParamValue::Num(v)) => *v >= *lo && *v <= *hi,
            _ => false,
        }
    }
}

/// Ordered list of domains for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParamSpace {
    pub model_id: ModelId,
    pub domains: Vec<ParamDomain>,
}

impl HyperParamSpace {
    /// The default search space per model.
    pub fn default_for(model_id: ModelId) -> Self {
        let domains = match model_id {
            ModelId::Theta => vec![ParamDomain::continuous("theta", 0.0, 3.0)],
            ModelId::HoltLinear => vec![
                ParamDomain::continuous("alpha", 0.05, 0.95),
                ParamDomain::continuous("beta", 0.05, 0.95),
            ],
            ModelId::HoltWinters => vec![
                ParamDomain::continuous("alpha", 0.05, 0.95),
                ParamDomain::continuous("beta", 0.05, 0.95),
                ParamDomain::continuous("gamma", 0.05, 0.95),
            ],
            ModelId::Stlf => vec![
                ParamDomain::categorical("base_method", &["naive", "ses", "linear"]),
                ParamDomain::continuous("alpha", 0.05, 0.95),
            ],
            ModelId::Arima => vec![
                ParamDomain::integer("p", 0, 3),
                ParamDomain::integer("d", 0, 2),
                ParamDomain::integer("q", 0, 3),
            ],
            ModelId::SeasonalNaive => vec![],
        };
        HyperParamSpace { model_id, domains }
    }

    /// All six default spaces, in model order.
    pub fn all_defaults() -> Vec<HyperParamSpace> {
        ModelId::ALL.iter().map(|&m| Self::default_for(m)).collect()
    }

    pub fn validate(&self, assignment: &HyperParamAssignment) -> Result<(), TuneError> {
        if assignment.model_id != self.model_id {
            return Err(TuneError::InvalidAssignment {
                name: "model_id".to_string(),
                reason: format!("{} vs {}", assignment.model_id, self.model_id),
            });
        }
        if assignment.values.len() != self.domains.len() {
            return Err(TuneError::InvalidAssignment {
                name: "arity".to_string(),
                reason: format!(
                    "{} values for {} domains",
                    assignment.values.len(),
                    self.domains.len()
                ),
            });
        }
        for domain in &self.domains {
            match assignment.values.iter().find(|(n, _)| n == &domain.name) {
                Some((_, value)) if domain.contains(value) => {}
                Some((_, value)) => {
                    return Err(TuneError::InvalidAssignment {
                        name: domain.name.clone(),
                        reason: format!("{value:?} outside domain"),
                    })
                }
                None => {
                    return Err(TuneError::InvalidAssignment {
                        name: domain.name.clone(),
                        reason: "missing".to_string(),
                    })
                }
            }
        }
        Ok(())
    }

    /// Draw a uniform assignment: continuous uniform on [lo, hi], integer
    /// and categorical uniform over their finite sets.
    pub fn draw(&self, rng: &mut StreamRng) -> HyperParamAssignment {
        let values = self
            .domains
            .iter()
            .map(|d| {
                let v = match &d.kind {
                    ParamKind::Categorical { labels } => {
                        ParamValue::Cat(labels[rng.index(labels.len())].clone())
                    }
                    ParamKind::Integer { lo, hi } => ParamValue::Int(rng.uniform_int(*lo, *hi)),
                    ParamKind::Continuous { lo, hi } => ParamValue::Num(rng.uniform(*lo, *hi)),
                };
                (d.name.clone(), v)
            })
            .collect();
        HyperParamAssignment {
            model_id: self.model_id,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Cat(String),
    Int(i64),
    Num(f64),
}

/// A concrete parameter setting, ordered as the space declares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperParamAssignment {
    pub model_id: ModelId,
    pub values: Vec<(String, ParamValue)>,
}

impl HyperParamAssignment {
    pub fn empty(model_id: ModelId) -> Self {
        HyperParamAssignment {
            model_id,
            values: Vec::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn num(&self, name: &str) -> Option<f64> {
        match self.get(name)? {
            ParamValue::Num(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Cat(_) => None,
        }
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        match self.get(name)? {
            ParamValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn cat(&self, name: &str) -> Option<&str> {
        match self.get(name)? {
            ParamValue::Cat(v) => Some(v.as_str()),
            _ => None,
        }
    }

    pub fn set(mut self, name: &str, value: ParamValue) -> Self {
        self.values.push((name.to_string(), value));
        self
    }
}

/// Parameter values keyed by name, serialized as a plain ordered JSON
/// object. The owning context (a per-model map key, a model field)
/// supplies the model identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamMap(pub Vec<(String, ParamValue)>);

impl ParamMap {
    pub fn from_assignment(a: &HyperParamAssignment) -> Self {
        ParamMap(a.values.clone())
    }

    pub fn into_assignment(&self, model_id: ModelId) -> HyperParamAssignment {
        HyperParamAssignment {
            model_id,
            values: self.0.clone(),
        }
    }
}

impl Serialize for ParamMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for ParamMap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> serde::de::Visitor<'de> for V {
            type Value = ParamMap;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a map of parameter name to value")
            }
            fn visit_map<A: serde::de::MapAccess<'de>>(
                self,
                mut access: A,
            ) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, ParamValue>()? {
                    out.push((k, v));
                }
                Ok(ParamMap(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

/// One evaluated parameter setting. `failed` implies no error value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub assignment: HyperParamAssignment,
    pub error: Option<f64>,
    pub failed: bool,
}

impl TrialResult {
    fn ok(assignment: HyperParamAssignment, error: f64) -> Self {
        TrialResult {
            assignment,
            error: Some(error),
            failed: false,
        }
    }

    fn fail(assignment: HyperParamAssignment) -> Self {
        TrialResult {
            assignment,
            error: None,
            failed: true,
        }
    }
}

/// Fit on the train split, forecast the holdout, score with MAPE. Fit or
/// scoring failures become `failed = true` values, never panics.
pub fn evaluate_params(
    model_id: ModelId,
    assignment: &HyperParamAssignment,
    ts: &TimeSeries,
    cfg: SplitConfig,
) -> TrialResult {
    let (train, test) = match train_test_split(ts, cfg) {
        Ok(parts) => parts,
        Err(_) => return TrialResult::fail(assignment.clone()),
    };
    let fitted = match models::fit(model_id, &train, assignment) {
        Ok(f) => f,
        Err(_) => return TrialResult::fail(assignment.clone()),
    };
    let forecast = models::predict(&fitted, test.len());
    match mape(test.values(), &forecast.point_forecasts) {
        Ok(err) if err.is_finite() => TrialResult::ok(assignment.clone(), err),
        _ => TrialResult::fail(assignment.clone()),
    }
}

fn pick_best(all: &[TrialResult]) -> TrialResult {
    let mut best: Option<&TrialResult> = None;
    for trial in all {
        if trial.failed {
            continue;
        }
        let better = match best {
            None => true,
            // Strict comparison keeps the earlier trial on ties.
            Some(b) => trial.error.unwrap() < b.error.unwrap(),
        };
        if better {
            best = Some(trial);
        }
    }
    best.cloned().unwrap_or_else(|| all[0].clone())
}

/// Random search driven by an arbitrary objective; the public
/// [`random_search`] plugs in holdout evaluation.
pub fn random_search_with<F>(
    space: &HyperParamSpace,
    trials: usize,
    seed: u64,
    stream_tag: &str,
    mut eval: F,
) -> Result<(TrialResult, Vec<TrialResult>), TuneError>
where
    F: FnMut(&HyperParamAssignment) -> TrialResult,
{
    if trials == 0 {
        return Err(TuneError::EmptySearch);
    }
    let mut all = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = StreamRng::new(seed)
            .with_str("trial")
            .with_str(stream_tag)
            .with_str(space.model_id.name())
            .with_u64(t as u64);
        let assignment = space.draw(&mut rng);
        all.push(eval(&assignment));
    }
    Ok((pick_best(&all), all))
}

/// Draw `trials` uniform assignments and return the best non-failed one
/// (ties to the lower trial index).
pub fn random_search(
    model_id: ModelId,
    ts: &TimeSeries,
    space: &HyperParamSpace,
    trials: usize,
    seed: u64,
    cfg: SplitConfig,
) -> Result<(TrialResult, Vec<TrialResult>), TuneError> {
    debug_assert_eq!(model_id, space.model_id);
    random_search_with(space, trials, seed, ts.id(), |assignment| {
        evaluate_params(model_id, assignment, ts, cfg)
    })
}

/// A single uniform draw from the space, outside any search stream.
pub fn random_assignment(
    space: &HyperParamSpace,
    seed: u64,
    series_id: &str,
) -> HyperParamAssignment {
    let mut rng = StreamRng::new(seed)
        .with_str("random_hp")
        .with_str(series_id)
        .with_str(space.model_id.name());
    space.draw(&mut rng)
}

const GRID_CAP: usize = 100_000;

fn grid_values(domain: &ParamDomain, resolution: usize) -> Vec<ParamValue> {
    match &domain.kind {
        ParamKind::Categorical { labels } => labels.iter().cloned().map(ParamValue::Cat).collect(),
        ParamKind::Integer { lo, hi } => (*lo..=*hi).map(ParamValue::Int).collect(),
        ParamKind::Continuous { lo, hi } => {
            if resolution <= 1 || hi == lo {
                vec![ParamValue::Num(0.5 * (lo + hi))]
            } else {
                (0..resolution)
                    .map(|i| ParamValue::Num(lo + (hi - lo) * i as f64 / (resolution - 1) as f64))
                    .collect()
            }
        }
    }
}

/// Grid search driven by an arbitrary objective; see [`grid_search`].
pub fn grid_search_with<F>(
    space: &HyperParamSpace,
    resolution: usize,
    mut eval: F,
) -> Result<(TrialResult, Vec<TrialResult>), TuneError>
where
    F: FnMut(&HyperParamAssignment) -> TrialResult,
{
    let per_domain: Vec<Vec<ParamValue>> = space
        .domains
        .iter()
        .map(|d| grid_values(d, resolution))
        .collect();
    let total: usize = per_domain.iter().map(|v| v.len()).product();
    if total > GRID_CAP {
        return Err(TuneError::GridTooLarge(total));
    }
    let mut all = Vec::with_capacity(total.max(1));
    // Odometer over the cartesian product, first domain most significant,
    // so iteration order is lexicographic in the ordered domain values.
    let mut idx = vec![0usize; per_domain.len()];
    loop {
        let assignment = HyperParamAssignment {
            model_id: space.model_id,
            values: space
                .domains
                .iter()
                .enumerate()
                .map(|(pos, d)| (d.name.clone(), per_domain[pos][idx[pos]].clone()))
                .collect(),
        };
        all.push(eval(&assignment));
        if per_domain.is_empty() {
            break;
        }
        let mut pos = per_domain.len() - 1;
        loop {
            idx[pos] += 1;
            if idx[pos] < per_domain[pos].len() {
                break;
            }
            idx[pos] = 0;
            if pos == 0 {
                break;
            }
            pos -= 1;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    Ok((pick_best(&all), all))
}

/// Evaluate the full cartesian product of the space, continuous domains
/// discretized to `resolution` equal steps inclusive of both endpoints.
/// Ties break lexicographically in the ordered domain values.
pub fn grid_search(
    model_id: ModelId,
    ts: &TimeSeries,
    space: &HyperParamSpace,
    resolution: usize,
    cfg: SplitConfig,
) -> Result<(TrialResult, Vec<TrialResult>), TuneError> {
    debug_assert_eq!(model_id, space.model_id);
    grid_search_with(space, resolution, |assignment| {
        evaluate_params(model_id, assignment, ts, cfg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::series_from_values;

    fn trending_noisy(n: usize, seed: u64) -> TimeSeries {
        let mut rng = StreamRng::new(seed).with_str("tune-test");
        let values: Vec<f64> = (0..n)
            .map(|t| 50.0 + 0.8 * t as f64 + 3.0 * rng.normal())
            .collect();
        series_from_values("tune-test", &values, 1).unwrap()
    }

    fn periodic(n: usize, m: usize) -> TimeSeries {
        let pattern = [5.0, 6.0, 7.0, 8.0];
        let values: Vec<f64> = (0..n).map(|t| pattern[t % m]).collect();
        series_from_values("periodic", &values, m).unwrap()
    }

    #[test]
    fn seasonal_naive_perfect_on_periodic() {
        let ts = periodic(40, 4);
        let space = HyperParamSpace::default_for(ModelId::SeasonalNaive);
        let (best, all) = random_search(
            ModelId::SeasonalNaive,
            &ts,
            &space,
            3,
            0,
            SplitConfig::new(8),
        )
        .unwrap();
        assert!(!best.failed);
        assert!(best.error.unwrap() <= 1e-9);
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn arima_too_short_fails_as_value() {
        let ts = series_from_values(
            "tiny",
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
            1,
        )
        .unwrap();
        let assignment = HyperParamAssignment::empty(ModelId::Arima)
            .set("p", ParamValue::Int(3))
            .set("d", ParamValue::Int(2))
            .set("q", ParamValue::Int(3));
        let trial = evaluate_params(ModelId::Arima, &assignment, &ts, SplitConfig::new(2));
        assert!(trial.failed);
        assert_eq!(trial.error, None);
    }

    #[test]
    fn error_equals_direct_composition_bitwise() {
        let ts = trending_noisy(80, 9);
        let cfg = SplitConfig::new(10);
        let assignment = HyperParamAssignment::empty(ModelId::HoltLinear)
            .set("alpha", ParamValue::Num(0.4))
            .set("beta", ParamValue::Num(0.2));
        let trial = evaluate_params(ModelId::HoltLinear, &assignment, &ts, cfg);
        let (train, test) = train_test_split(&ts, cfg).unwrap();
        let fitted = models::fit(ModelId::HoltLinear, &train, &assignment).unwrap();
        let fc = models::predict(&fitted, test.len());
        let direct = mape(test.values(), &fc.point_forecasts).unwrap();
        assert_eq!(trial.error.unwrap().to_bits(), direct.to_bits());
    }

    #[test]
    fn single_point_space_best_is_that_point() {
        let ts = periodic(40, 4);
        let space = HyperParamSpace {
            model_id: ModelId::Stlf,
            domains: vec![
                ParamDomain::categorical("base_method", &["naive"]),
                ParamDomain::continuous("alpha", 0.3, 0.3),
            ],
        };
        for trials in [1, 7] {
            let (best, _) =
                random_search(ModelId::Stlf, &ts, &space, trials, 5, SplitConfig::new(8)).unwrap();
            assert_eq!(best.assignment.cat("base_method"), Some("naive"));
            assert_eq!(best.assignment.num("alpha"), Some(0.3));
        }
    }

    #[test]
    fn same_seed_bitwise_identical() {
        let ts = trending_noisy(60, 4);
        let space = HyperParamSpace::default_for(ModelId::HoltLinear);
        let cfg = SplitConfig::new(8);
        let a = random_search(ModelId::HoltLinear, &ts, &space, 10, 99, cfg).unwrap();
        let b = random_search(ModelId::HoltLinear, &ts, &space, 10, 99, cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn prefix_property_more_trials_never_worse() {
        let ts = trending_noisy(90, 17);
        let space = HyperParamSpace::default_for(ModelId::HoltLinear);
        let cfg = SplitConfig::new(12);
        let (best5, all5) = random_search(ModelId::HoltLinear, &ts, &space, 5, 123, cfg).unwrap();
        let (best50, all50) =
            random_search(ModelId::HoltLinear, &ts, &space, 50, 123, cfg).unwrap();
        assert_eq!(&all50[..5], &all5[..]);
        assert!(best50.error.unwrap() <= best5.error.unwrap());
    }

    #[test]
    fn zero_trials_is_an_error() {
        let ts = periodic(20, 4);
        let space = HyperParamSpace::default_for(ModelId::SeasonalNaive);
        assert_eq!(
            random_search(
                ModelId::SeasonalNaive,
                &ts,
                &space,
                0,
                1,
                SplitConfig::new(4)
            )
            .unwrap_err(),
            TuneError::EmptySearch
        );
    }

    #[test]
    fn grid_discretization_endpoints() {
        let space = HyperParamSpace {
            model_id: ModelId::Theta,
            domains: vec![ParamDomain::continuous("theta", 0.0, 1.0)],
        };
        let (_, all) = grid_search_with(&space, 5, |a| TrialResult::ok(a.clone(), 0.0)).unwrap();
        let points: Vec<f64> = all
            .iter()
            .map(|t| t.assignment.num("theta").unwrap())
            .collect();
        assert_eq!(points, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn grid_empty_space_single_trial() {
        let space = HyperParamSpace {
            model_id: ModelId::SeasonalNaive,
            domains: vec![],
        };
        let (best, all) = grid_search_with(&space, 5, |a| TrialResult::ok(a.clone(), 0.5)).unwrap();
        assert_eq!(all.len(), 1);
        assert!(best.assignment.values.is_empty());
    }

    #[test]
    fn grid_too_large() {
        let space = HyperParamSpace {
            model_id: ModelId::HoltWinters,
            domains: (0..3)
                .map(|i| ParamDomain::continuous(&format!("p{i}"), 0.0, 1.0))
                .collect(),
        };
        assert_eq!(
            grid_search_with(&space, 100, |a| TrialResult::ok(a.clone(), 0.0)).unwrap_err(),
            TuneError::GridTooLarge(1_000_000)
        );
    }

    #[test]
    fn grid_beats_random_on_convex_objective() {
        // Convex objective over one continuous parameter; the brute-force
        // minimum over the grid must equal grid_search's answer, and a
        // fine grid cannot lose to 20 random draws.
        let space = HyperParamSpace {
            model_id: ModelId::Theta,
            domains: vec![ParamDomain::continuous("theta", 0.0, 1.0)],
        };
        let objective = |a: &HyperParamAssignment| {
            let x = a.num("theta").unwrap();
            TrialResult::ok(a.clone(), (x - 0.37) * (x - 0.37))
        };
        let (grid_best, grid_all) = grid_search_with(&space, 101, objective).unwrap();
        let brute = grid_all
            .iter()
            .map(|t| t.error.unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(grid_best.error.unwrap(), brute);
        let (rand_best, _) = random_search_with(&space, 20, 7, "convex", objective).unwrap();
        assert!(grid_best.error.unwrap() <= rand_best.error.unwrap());
    }

    #[test]
    fn grid_tie_breaks_lexicographically() {
        let space = HyperParamSpace {
            model_id: ModelId::Stlf,
            domains: vec![
                ParamDomain::categorical("base_method", &["naive", "ses"]),
                ParamDomain::continuous("alpha", 0.0, 1.0),
            ],
        };
        // Constant objective: every point ties; the first lexicographic
        // point must win.
        let (best, all) = grid_search_with(&space, 3, |a| TrialResult::ok(a.clone(), 1.0)).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(best.assignment.cat("base_method"), Some("naive"));
        assert_eq!(best.assignment.num("alpha"), Some(0.0));
    }

    #[test]
    fn drawn_assignments_validate() {
        for model in ModelId::ALL {
            let space = HyperParamSpace::default_for(model);
            for t in 0..50 {
                let mut rng = StreamRng::new(3).with_str("draw").with_u64(t);
                let a = space.draw(&mut rng);
                space.validate(&a).unwrap();
            }
        }
    }

    #[test]
    fn all_failed_search_reports_failed_best() {
        let ts = series_from_values("short", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 1).unwrap();
        // HoltWinters needs a usable seasonal period; period 1 never has one.
        let space = HyperParamSpace::default_for(ModelId::HoltWinters);
        let (best, all) =
            random_search(ModelId::HoltWinters, &ts, &space, 4, 0, SplitConfig::new(1)).unwrap();
        assert!(best.failed);
        assert!(all.iter().all(|t| t.failed));
    }
}
