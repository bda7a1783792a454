//! Online path: constant-time model selection and hyper-parameter
//! prediction, then a single fit and forecast.
//!
//! Run with: cargo run --example auto_forecast

use tsmeta::core::{series_from_values, SplitConfig, TimeSeries};
use tsmeta::learners::{train_learners, LearnerConfig};
use tsmeta::metadata::build_meta_record;
use tsmeta::pipeline::forecast_auto;
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn make_series(id: &str, seed: u64, seasonal: bool) -> TimeSeries {
    let mut rng = StreamRng::new(seed).with_str("auto-example");
    let values: Vec<f64> = if seasonal {
        (0..64)
            .map(|t| 80.0 + 0.3 * t as f64 + [9.0, -4.0, 1.0, -6.0][t % 4] + 0.4 * rng.normal())
            .collect()
    } else {
        (0..64)
            .map(|t| 25.0 + 1.1 * t as f64 + 1.2 * rng.normal())
            .collect()
    };
    series_from_values(id, &values, 4).unwrap()
}

fn main() {
    println!("=== Learned Model + Learned Parameters ===\n");

    // Offline: build a small meta corpus and train the learners.
    let spaces = HyperParamSpace::all_defaults();
    let records: Vec<_> = (0..30)
        .map(|i| {
            let ts = make_series(&format!("train{i:02}"), i, i % 2 == 0);
            build_meta_record(&ts, &spaces, 6, 0, SplitConfig::new(12)).unwrap()
        })
        .collect();
    let learners = train_learners(
        &records,
        &LearnerConfig {
            n_trees: 50,
            epochs: 60,
            seed: 1,
            ..LearnerConfig::default()
        },
    )
    .unwrap();
    println!("Trained learners on {} series\n", records.len());

    // Online: new series arrive; selection and parameters are one
    // forward pass each.
    for (id, seasonal) in [("new_seasonal", true), ("new_trending", false)] {
        let ts = make_series(id, 999, seasonal);
        let started = std::time::Instant::now();
        let fc = forecast_auto(&ts, &learners, 8);
        let elapsed = started.elapsed();
        println!("{id}:");
        println!("  model     {}", fc.model_id.name());
        for (name, value) in &fc.params.values {
            println!("  param     {name} = {value:?}");
        }
        println!("  fallback  {}", fc.fallback);
        println!(
            "  forecast  {:?}",
            fc.point_forecasts
                .iter()
                .map(|v| (v * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        );
        println!("  took      {elapsed:?}\n");
    }
}
