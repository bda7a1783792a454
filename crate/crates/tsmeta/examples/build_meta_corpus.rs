//! Offline step one: exhaustively tune every model per series and
//! assemble the meta-dataset (features + best params + best-model label).
//!
//! Run with: cargo run --example build_meta_corpus

use tsmeta::core::{series_from_values, SplitConfig, TimeSeries};
use tsmeta::metadata::{build_meta_record, write_meta_file};
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn synthetic_corpus(n: usize) -> Vec<TimeSeries> {
    (0..n)
        .map(|i| {
            let mut rng = StreamRng::new(i as u64).with_str("meta-example");
            let values: Vec<f64> = match i % 3 {
                // Seasonal with trend.
                0 => (0..60)
                    .map(|t| {
                        40.0 + 0.5 * t as f64 + [6.0, -2.0, 1.0, -5.0][t % 4] + 0.5 * rng.normal()
                    })
                    .collect(),
                // Noisy ramp.
                1 => (0..60)
                    .map(|t| 20.0 + 1.2 * t as f64 + 2.0 * rng.normal())
                    .collect(),
                // Autocorrelated level.
                _ => {
                    let mut x = 0.0;
                    (0..60)
                        .map(|_| {
                            x = 0.7 * x + rng.normal();
                            60.0 + 3.0 * x
                        })
                        .collect()
                }
            };
            series_from_values(&format!("series_{i:02}"), &values, 4).unwrap()
        })
        .collect()
}

fn main() {
    println!("=== Meta-Dataset Construction ===\n");

    let corpus = synthetic_corpus(12);
    let spaces = HyperParamSpace::all_defaults();
    let trials = 8;
    let seed = 0;

    let mut records = Vec::new();
    println!("{:<12} {:<16} {:>10}", "series", "best model", "best MAPE");
    println!("{:-<40}", "");
    for ts in &corpus {
        let cfg = SplitConfig::new(12);
        match build_meta_record(ts, &spaces, trials, seed, cfg) {
            Ok(record) => {
                let best = &record.per_model[&record.best_model];
                println!(
                    "{:<12} {:<16} {:>10.5}",
                    record.id,
                    record.best_model.name(),
                    best.mape.unwrap()
                );
                records.push(record);
            }
            Err(e) => println!("{:<12} quarantined: {e}", ts.id()),
        }
    }

    let out = std::env::temp_dir().join("tsmeta_example_meta.jsonl");
    write_meta_file(&out, &records).unwrap();
    println!("\nWrote {} records to {}", records.len(), out.display());

    // Peek at one line of the on-disk format.
    let text = std::fs::read_to_string(&out).unwrap();
    let first_line = text.lines().next().unwrap();
    println!(
        "First record (truncated): {}...",
        &first_line[..first_line.len().min(160)]
    );
}
