//! Additive decomposition: trend, seasonal, remainder.
//!
//! Run with: cargo run --example decompose_series

use tsmeta::core::series_from_values;
use tsmeta::features::decompose::decompose;
use tsmeta::features::stl::stl_features;
use tsmeta::rng::StreamRng;

fn main() {
    println!("=== Additive Decomposition ===\n");

    let mut rng = StreamRng::new(3).with_str("decompose-example");
    let pattern = [8.0, -2.0, 3.0, -9.0];
    let values: Vec<f64> = (0..48)
        .map(|t| 20.0 + 0.6 * t as f64 + pattern[t % 4] + 0.5 * rng.normal())
        .collect();
    let ts = series_from_values("demo", &values, 4).unwrap();

    let d = decompose(&ts);
    println!(
        "{:>4} {:>10} {:>10} {:>10} {:>10}",
        "t", "y", "trend", "seasonal", "remainder"
    );
    println!("{:-<48}", "");
    #[allow(clippy::needless_range_loop)]
    for t in 0..12 {
        println!(
            "{:>4} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
            t, values[t], d.trend[t], d.seasonal[t], d.remainder[t]
        );
    }

    let max_err = values
        .iter()
        .enumerate()
        .map(|(t, y)| (y - d.trend[t] - d.seasonal[t] - d.remainder[t]).abs())
        .fold(0.0f64, f64::max);
    println!("\nReconstruction error (max abs): {max_err:.2e}");

    let cycle_sum: f64 = d.seasonal[..4].iter().sum();
    println!("Seasonal cycle sum: {cycle_sum:.2e}");

    let f = stl_features(&d);
    println!("\nStrengths read off the decomposition:");
    println!("  trend_strength    {:.4}", f.trend_strength.value);
    println!("  seasonal_strength {:.4}", f.seasonal_strength.value);
    println!("  spikiness         {:.6}", f.spikiness.value);
    println!("  peak phase        {}", f.peak.value);
    println!("  trough phase      {}", f.trough.value);
}
