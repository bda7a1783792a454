//! Label stability: re-classify the same series at growing prefixes and
//! report the change rate between checkpoints.
//!
//! Run with: cargo run --example consistency_check

use tsmeta::core::{series_from_values, SplitConfig, TimeSeries};
use tsmeta::learners::{train_learners, LearnerConfig};
use tsmeta::metadata::build_meta_record;
use tsmeta::pipeline::corpus_consistency;
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn stationary_series(id: &str, seed: u64, n: usize) -> TimeSeries {
    let mut rng = StreamRng::new(seed).with_str("consistency-example");
    let mut x = 0.0;
    let values: Vec<f64> = (0..n)
        .map(|_| {
            x = 0.6 * x + rng.normal();
            50.0 + 2.0 * x
        })
        .collect();
    series_from_values(id, &values, 4).unwrap()
}

fn main() {
    println!("=== Model-Selection Consistency ===\n");

    let spaces = HyperParamSpace::all_defaults();
    let records: Vec<_> = (0..30)
        .map(|i| {
            let mut rng = StreamRng::new(i).with_str("cons-train");
            let values: Vec<f64> = if i % 2 == 0 {
                (0..80)
                    .map(|t| 20.0 + [6.0, -2.0, 1.0, -5.0][t % 4] + 0.4 * rng.normal())
                    .collect()
            } else {
                (0..80)
                    .map(|t| 15.0 + 0.7 * t as f64 + 1.0 * rng.normal())
                    .collect()
            };
            let ts = series_from_values(&format!("c{i:02}"), &values, 4).unwrap();
            build_meta_record(&ts, &spaces, 5, 0, SplitConfig::new(12)).unwrap()
        })
        .collect();
    let learners = train_learners(
        &records,
        &LearnerConfig {
            n_trees: 50,
            epochs: 40,
            seed: 4,
            ..LearnerConfig::default()
        },
    )
    .unwrap();

    let corpus: Vec<TimeSeries> = (0..50)
        .map(|i| stationary_series(&format!("s{i:02}"), 500 + i, 120))
        .collect();
    let checkpoints = vec![60, 80, 100, 120];
    let matrix = corpus_consistency(&corpus, &checkpoints, &learners, 2).unwrap();

    println!(
        "Change rate (%) between prefix lengths, {} series:\n",
        corpus.len()
    );
    print!("{:>8}", "prefix");
    for &c in &checkpoints[1..] {
        print!("{c:>8}");
    }
    println!();
    for i in 0..checkpoints.len() - 1 {
        print!("{:>8}", checkpoints[i]);
        for j in 1..checkpoints.len() {
            match matrix.change[i][j] {
                Some(v) => print!("{v:>8.1}"),
                None => print!("{:>8}", "NA"),
            }
        }
        println!();
    }
    println!("\nEntry (i, j): share of series whose predicted model at");
    println!("prefix i differs from the prediction at prefix j.");
}
