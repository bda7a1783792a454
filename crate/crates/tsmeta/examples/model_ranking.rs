//! Model recommendation: rank all candidates by predicted error with the
//! matrix-factorization extension instead of picking a single winner.
//!
//! Run with: cargo run --example model_ranking

use tsmeta::core::{series_from_values, SplitConfig};
use tsmeta::features::extract_features;
use tsmeta::learners::mf::mf_rank;
use tsmeta::learners::{train_learners, LearnerConfig};
use tsmeta::metadata::build_meta_record;
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn main() {
    println!("=== Model Ranking via Matrix Factorization ===\n");

    let spaces = HyperParamSpace::all_defaults();
    let records: Vec<_> = (0..50)
        .map(|i| {
            let mut rng = StreamRng::new(i).with_str("mf-example");
            let values: Vec<f64> = match i % 3 {
                0 => (0..64)
                    .map(|t| 50.0 + [7.0, -2.0, 1.0, -6.0][t % 4] + 0.4 * rng.normal())
                    .collect(),
                1 => (0..64)
                    .map(|t| 25.0 + 0.8 * t as f64 + 1.5 * rng.normal())
                    .collect(),
                _ => {
                    let mut x = 0.0;
                    (0..64)
                        .map(|_| {
                            x = 0.75 * x + rng.normal();
                            70.0 + 3.0 * x
                        })
                        .collect()
                }
            };
            let ts = series_from_values(&format!("m{i:02}"), &values, 4).unwrap();
            build_meta_record(&ts, &spaces, 5, 0, SplitConfig::new(10)).unwrap()
        })
        .collect();

    // with_mf fits the per-model embeddings alongside the other learners.
    let learners = train_learners(
        &records,
        &LearnerConfig {
            n_trees: 30,
            epochs: 30,
            with_mf: true,
            mf_lambda: 1.0,
            seed: 6,
            ..LearnerConfig::default()
        },
    )
    .unwrap();
    let mf = learners.mf.as_ref().expect("trained with with_mf");

    // Rank candidates for a fresh seasonal series.
    let mut rng = StreamRng::new(777).with_str("mf-target");
    let values: Vec<f64> = (0..64)
        .map(|t| 50.0 + [7.0, -2.0, 1.0, -6.0][t % 4] + 0.4 * rng.normal())
        .collect();
    let ts = series_from_values("target", &values, 4).unwrap();
    let features = extract_features(&ts);
    let x = learners.standardizer.apply(&features);

    println!("Predicted error ranking for a seasonal target series:\n");
    println!("{:<6} {:<16} {:>16}", "rank", "model", "predicted MAPE");
    println!("{:-<40}", "");
    for (rank, (model, score)) in mf_rank(mf, &x).iter().enumerate() {
        println!("{:<6} {:<16} {:>16.5}", rank + 1, model.name(), score);
    }
    println!("\nLower predicted error ranks first; ties keep model order.");
}
