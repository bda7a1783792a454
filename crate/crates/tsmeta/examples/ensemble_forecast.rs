//! Median ensemble across all six models, with the three ways of
//! obtaining per-model hyper-parameters.
//!
//! Run with: cargo run --example ensemble_forecast

use tsmeta::core::{series_from_values, SplitConfig};
use tsmeta::learners::{train_learners, LearnerConfig};
use tsmeta::metadata::build_meta_record;
use tsmeta::pipeline::{forecast_ensemble, HptMode, TuneContext};
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn main() {
    println!("=== Median Ensemble ===\n");

    let spaces = HyperParamSpace::all_defaults();
    let records: Vec<_> = (0..24)
        .map(|i| {
            let mut rng = StreamRng::new(i).with_str("ens-example");
            let values: Vec<f64> = (0..60)
                .map(|t| 45.0 + 0.4 * t as f64 + [5.0, -2.0, 3.0, -6.0][t % 4] + 0.6 * rng.normal())
                .collect();
            let ts = series_from_values(&format!("t{i:02}"), &values, 4).unwrap();
            build_meta_record(&ts, &spaces, 5, 0, SplitConfig::new(10)).unwrap()
        })
        .collect();
    let learners = train_learners(
        &records,
        &LearnerConfig {
            n_trees: 40,
            epochs: 50,
            seed: 2,
            ..LearnerConfig::default()
        },
    )
    .unwrap();

    let mut rng = StreamRng::new(100).with_str("ens-target");
    let values: Vec<f64> = (0..60)
        .map(|t| 45.0 + 0.4 * t as f64 + [5.0, -2.0, 3.0, -6.0][t % 4] + 0.6 * rng.normal())
        .collect();
    let ts = series_from_values("target", &values, 4).unwrap();
    let ctx = TuneContext {
        trials: 20,
        seed: 5,
    };

    for (label, mode) in [
        ("learned parameters", HptMode::SslHpt),
        ("random parameters", HptMode::RandomHp),
        ("searched parameters (20 trials/model)", HptMode::Exhaustive),
    ] {
        let started = std::time::Instant::now();
        let out = forecast_ensemble(&ts, &learners, 6, mode, ctx).unwrap();
        let elapsed = started.elapsed();
        println!("--- {label} ---");
        println!(
            "  members used: {:?}",
            out.used.iter().map(|m| m.name()).collect::<Vec<_>>()
        );
        if !out.dropped.is_empty() {
            println!(
                "  dropped:      {:?}",
                out.dropped.iter().map(|m| m.name()).collect::<Vec<_>>()
            );
        }
        println!(
            "  median forecast: {:?}",
            out.forecast
                .point_forecasts
                .iter()
                .map(|v| (v * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        );
        println!("  took {elapsed:?}\n");
    }
}
