//! Offline step two: train the model-selection forest and the per-model
//! hyper-parameter networks from a meta-dataset, then persist them.
//!
//! Run with: cargo run --example train_learners

use tsmeta::core::{series_from_values, SplitConfig, TimeSeries};
use tsmeta::learners::{
    load_learners, predict_hparams, predict_model, save_learners, train_learners, LearnerConfig,
};
use tsmeta::metadata::{build_meta_record, split_meta};
use tsmeta::rng::StreamRng;
use tsmeta::tuning::HyperParamSpace;

fn corpus(n: usize) -> Vec<TimeSeries> {
    (0..n)
        .map(|i| {
            let mut rng = StreamRng::new(i as u64).with_str("train-example");
            let values: Vec<f64> = if i % 2 == 0 {
                (0..56)
                    .map(|t| 30.0 + [7.0, -3.0, 2.0, -6.0][t % 4] + 0.3 * rng.normal())
                    .collect()
            } else {
                (0..56)
                    .map(|t| 10.0 + 0.9 * t as f64 + 1.5 * rng.normal())
                    .collect()
            };
            series_from_values(&format!("s{i:02}"), &values, 4).unwrap()
        })
        .collect()
}

fn main() {
    println!("=== Learner Training ===\n");

    let spaces = HyperParamSpace::all_defaults();
    let records: Vec<_> = corpus(40)
        .iter()
        .map(|ts| build_meta_record(ts, &spaces, 6, 1, SplitConfig::new(10)).unwrap())
        .collect();
    println!("Built {} meta records", records.len());

    let (train, test) = split_meta(&records, 0.75, 7).unwrap();
    println!("Split: {} train / {} test\n", train.len(), test.len());

    let cfg = LearnerConfig {
        n_trees: 50,
        epochs: 60,
        seed: 3,
        with_mf: true,
        ..LearnerConfig::default()
    };
    let learners = train_learners(&train, &cfg).unwrap();

    // Held-out behavior. Exact label agreement is a hard target when
    // several models forecast a series almost equally well, so also
    // report the regret: how much worse the predicted model's searched
    // error is than the argmin model's.
    let mut hits = 0;
    let mut regret = 0.0;
    let mut scored = 0;
    for record in &test {
        let x = learners.standardizer.apply(&record.features);
        let predicted = predict_model(&learners.forest, &x);
        if predicted == record.best_model {
            hits += 1;
        }
        let best = record.per_model[&record.best_model].mape.unwrap();
        if let Some(chosen) = record.per_model[&predicted].mape {
            regret += chosen - best;
            scored += 1;
        }
    }
    println!(
        "Forest held-out: exact label {}/{}; mean MAPE regret of the \
         predicted model {:.5}",
        hits,
        test.len(),
        regret / scored as f64
    );

    // Predicted hyper-parameters for one held-out series.
    let probe = &test[0];
    let x = learners.standardizer.apply(&probe.features);
    let model = predict_model(&learners.forest, &x);
    let space = HyperParamSpace::default_for(model);
    let params = predict_hparams(&learners.mtls[&model], &x, &space);
    println!("\nSeries {}: predicted model {}", probe.id, model.name());
    for (name, value) in &params.values {
        println!("  {name} = {value:?}");
    }

    // Round trip through the learner directory.
    let dir = std::env::temp_dir().join("tsmeta_example_learners");
    std::fs::remove_dir_all(&dir).ok();
    save_learners(&dir, &learners).unwrap();
    let back = load_learners(&dir).unwrap();
    println!(
        "\nSaved and reloaded learners from {}; identical forest: {}",
        dir.display(),
        back.forest == learners.forest
    );
}
