//! Feature extraction walkthrough.
//!
//! Run with: cargo run --example extract_features

use tsmeta::core::series_from_values;
use tsmeta::features::{extract_features, FEATURE_NAMES};
use tsmeta::rng::StreamRng;

fn main() {
    println!("=== 40-Feature Extraction ===\n");

    // Monthly-style series: trend + seasonal cycle + noise.
    let mut rng = StreamRng::new(7).with_str("features-example");
    let period = 12;
    let values: Vec<f64> = (0..144)
        .map(|t| {
            100.0
                + 0.5 * t as f64
                + 15.0 * (2.0 * std::f64::consts::PI * t as f64 / period as f64).sin()
                + 3.0 * rng.normal()
        })
        .collect();
    let ts = series_from_values("demo", &values, period).unwrap();
    println!(
        "Series: {} points, period {}, seasonal usable: {}\n",
        ts.len(),
        ts.period(),
        ts.seasonal_usable()
    );

    let fv = extract_features(&ts);
    println!("{:<22} {:>14} {:>8}", "feature", "value", "defined");
    println!("{:-<46}", "");
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        println!(
            "{:<22} {:>14.5} {:>8}",
            name,
            fv.values()[i],
            fv.defined()[i]
        );
    }

    // Masked entries: a non-seasonal series has no seasonal features.
    let flat: Vec<f64> = (0..60).map(|t| 50.0 + 0.2 * t as f64).collect();
    let flat_ts = series_from_values("flat", &flat, 1).unwrap();
    let flat_fv = extract_features(&flat_ts);
    println!("\nNon-seasonal series masks the seasonal entries:");
    for name in ["seasonal_strength", "acf_seasonal", "hw_alpha"] {
        let f = flat_fv.get(name).unwrap();
        println!(
            "  {:<18} value {:>8.3}, defined {}",
            name, f.value, f.defined
        );
    }

    println!("\nStrong trend shows up where expected:");
    println!(
        "  linearity       {:.4}",
        flat_fv.get("linearity").unwrap().value
    );
    println!(
        "  trend_strength  {:.4}",
        flat_fv.get("trend_strength").unwrap().value
    );
}
