//! Random search and grid search over a model's parameter space.
//!
//! Run with: cargo run --example search_hyperparams

use tsmeta::core::{series_from_values, SplitConfig};
use tsmeta::models::ModelId;
use tsmeta::rng::StreamRng;
use tsmeta::tuning::{grid_search, random_search, HyperParamSpace};

fn main() {
    println!("=== Hyper-Parameter Search ===\n");

    let mut rng = StreamRng::new(5).with_str("search-example");
    let values: Vec<f64> = (0..80)
        .map(|t| 30.0 + 0.9 * t as f64 + 2.5 * rng.normal())
        .collect();
    let ts = series_from_values("demo", &values, 1).unwrap();
    let cfg = SplitConfig::new(12);
    let space = HyperParamSpace::default_for(ModelId::HoltLinear);

    println!("--- Random search, 20 trials ---");
    let (best, all) = random_search(ModelId::HoltLinear, &ts, &space, 20, 42, cfg).unwrap();
    for (i, trial) in all.iter().enumerate().take(5) {
        println!(
            "  trial {:>2}: alpha {:.3} beta {:.3} -> MAPE {:.5}",
            i,
            trial.assignment.num("alpha").unwrap(),
            trial.assignment.num("beta").unwrap(),
            trial.error.unwrap_or(f64::NAN)
        );
    }
    println!("  ... ({} trials total)", all.len());
    println!(
        "  best: alpha {:.3} beta {:.3} -> MAPE {:.5}\n",
        best.assignment.num("alpha").unwrap(),
        best.assignment.num("beta").unwrap(),
        best.error.unwrap()
    );

    println!("--- Grid search, resolution 5 (5x5 grid) ---");
    let (gbest, gall) = grid_search(ModelId::HoltLinear, &ts, &space, 5, cfg).unwrap();
    println!("  evaluated {} grid points", gall.len());
    println!(
        "  best: alpha {:.3} beta {:.3} -> MAPE {:.5}",
        gbest.assignment.num("alpha").unwrap(),
        gbest.assignment.num("beta").unwrap(),
        gbest.error.unwrap()
    );

    println!("\n--- Determinism: same seed, same trials ---");
    let (rerun, _) = random_search(ModelId::HoltLinear, &ts, &space, 20, 42, cfg).unwrap();
    println!("  identical best on rerun: {}", rerun == best);

    println!("\n--- Prefix property: 20 trials extend the first 5 ---");
    let (best5, _) = random_search(ModelId::HoltLinear, &ts, &space, 5, 42, cfg).unwrap();
    println!(
        "  best(5) = {:.5} >= best(20) = {:.5}",
        best5.error.unwrap(),
        best.error.unwrap()
    );
}
