//! The nine-method comparison: {ensemble, random model, learned
//! selection} x {searched, random, learned parameters}.
//!
//! Run with: cargo run --example compare_methods

use tsmeta::core::{series_from_values, SplitConfig, TimeSeries};
use tsmeta::learners::{train_learners, LearnerConfig};
use tsmeta::metadata::build_meta_record;
use tsmeta::pipeline::{evaluate_methods, report_to_csv, EvalConfig};
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn make_series(id: &str, seed: u64) -> TimeSeries {
    let mut rng = StreamRng::new(seed).with_str("compare-example");
    let family = seed % 3;
    let values: Vec<f64> = match family {
        0 => (0..72)
            .map(|t| 60.0 + 0.5 * t as f64 + [8.0, -3.0, 2.0, -7.0][t % 4] + 0.7 * rng.normal())
            .collect(),
        1 => (0..72)
            .map(|t| 35.0 + 1.0 * t as f64 + 2.0 * rng.normal())
            .collect(),
        _ => {
            let mut x = 0.0;
            (0..72)
                .map(|_| {
                    x = 0.8 * x + rng.normal();
                    90.0 + 4.0 * x
                })
                .collect()
        }
    };
    series_from_values(id, &values, 4).unwrap()
}

fn main() {
    println!("=== Nine-Method Comparison ===\n");

    // Offline: meta corpus and learners from the training half.
    let spaces = HyperParamSpace::all_defaults();
    let records: Vec<_> = (0..36)
        .map(|i| {
            let ts = make_series(&format!("train{i:02}"), i);
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

    // Fresh test corpus, disjoint ids.
    let corpus: Vec<TimeSeries> = (0..12)
        .map(|i| make_series(&format!("test{i:02}"), 1000 + i))
        .collect();

    let cfg = EvalConfig {
        trials: 10,
        seed: 9,
        jobs: 2,
        ..EvalConfig::default()
    };
    let report = evaluate_methods(&corpus, &learners, &cfg).unwrap();

    println!("{}", report_to_csv(&report));
    println!(
        "Corpus: {} series evaluated, {} screened out",
        report.corpus_size,
        report.screened_out.len()
    );
    println!("\nRuntime units mirror the per-series tuning cost of each");
    println!("method (models fitted x search evaluations per model).");
}
