//! The six candidate models behind one fit/predict contract.
//!
//! Run with: cargo run --example forecast_models

use tsmeta::core::series_from_values;
use tsmeta::models::{fit, predict, ModelId};
use tsmeta::rng::StreamRng;
use tsmeta::tuning::{HyperParamAssignment, ParamValue};

fn main() {
    println!("=== Candidate Forecasting Models ===\n");

    let mut rng = StreamRng::new(11).with_str("models-example");
    let pattern = [6.0, -1.0, 2.0, -7.0];
    let values: Vec<f64> = (0..60)
        .map(|t| 50.0 + 0.4 * t as f64 + pattern[t % 4] + 0.8 * rng.normal())
        .collect();
    let ts = series_from_values("demo", &values, 4).unwrap();
    let h = 8;

    let configs: Vec<(ModelId, HyperParamAssignment)> = vec![
        (
            ModelId::Arima,
            HyperParamAssignment::empty(ModelId::Arima)
                .set("p", ParamValue::Int(1))
                .set("d", ParamValue::Int(1))
                .set("q", ParamValue::Int(1)),
        ),
        (
            ModelId::HoltLinear,
            HyperParamAssignment::empty(ModelId::HoltLinear)
                .set("alpha", ParamValue::Num(0.4))
                .set("beta", ParamValue::Num(0.2)),
        ),
        (
            ModelId::HoltWinters,
            HyperParamAssignment::empty(ModelId::HoltWinters)
                .set("alpha", ParamValue::Num(0.4))
                .set("beta", ParamValue::Num(0.1))
                .set("gamma", ParamValue::Num(0.2)),
        ),
        (
            ModelId::SeasonalNaive,
            HyperParamAssignment::empty(ModelId::SeasonalNaive),
        ),
        (
            ModelId::Stlf,
            HyperParamAssignment::empty(ModelId::Stlf)
                .set("base_method", ParamValue::Cat("linear".to_string()))
                .set("alpha", ParamValue::Num(0.3)),
        ),
        (
            ModelId::Theta,
            HyperParamAssignment::empty(ModelId::Theta).set("theta", ParamValue::Num(2.0)),
        ),
    ];

    println!(
        "{:<16} {:>9} {:>9} {:>9} {:>9}",
        "model", "h=1", "h=2", "h=4", "h=8"
    );
    println!("{:-<56}", "");
    for (model, params) in &configs {
        match fit(*model, &ts, params) {
            Ok(fm) => {
                let fc = predict(&fm, h);
                println!(
                    "{:<16} {:>9.3} {:>9.3} {:>9.3} {:>9.3}",
                    model.name(),
                    fc.point_forecasts[0],
                    fc.point_forecasts[1],
                    fc.point_forecasts[3],
                    fc.point_forecasts[7]
                );
            }
            Err(e) => println!("{:<16} failed: {e}", model.name()),
        }
    }

    // Failures are values, not panics: ARIMA(3,2,3) cannot fit 10 points.
    let short = series_from_values("short", &values[..10], 1).unwrap();
    let heavy = HyperParamAssignment::empty(ModelId::Arima)
        .set("p", ParamValue::Int(3))
        .set("d", ParamValue::Int(2))
        .set("q", ParamValue::Int(3));
    match fit(ModelId::Arima, &short, &heavy) {
        Ok(_) => println!("\nunexpected fit"),
        Err(e) => println!("\nFit failure is a value: {e}"),
    }
}
