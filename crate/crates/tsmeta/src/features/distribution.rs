//! Value-distribution features: flat spots, histogram mode, binarized
//! mean, and median crossings.

use crate::core::TimeSeries;
use crate::features::Feat;
use crate::numeric::{mean, median};

pub const DEFAULT_NBINS: usize = 10;

pub struct DistributionFeatures {
    pub flat_spots: Feat,
    pub histogram_mode: Feat,
    pub binarize_mean: Feat,
    pub crossing_points: Feat,
}

fn bin_index(v: f64, min: f64, width: f64, nbins: usize) -> usize {
    if width <= 0.0 {
        return 0;
    }
    (((v - min) / width) as usize).min(nbins - 1)
}

pub fn distribution_features(ts: &TimeSeries, nbins: usize) -> DistributionFeatures {
    let y = ts.values();
    let n = y.len();
    let min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / nbins as f64;

    // Longest run of consecutive points falling in one bin.
    let mut flat = 1usize;
    let mut run = 1usize;
    let mut prev_bin = bin_index(y[0], min, width, nbins);
    for &v in &y[1..] {
        let b = bin_index(v, min, width, nbins);
        if b == prev_bin {
            run += 1;
            flat = flat.max(run);
        } else {
            run = 1;
            prev_bin = b;
        }
    }

    // Mode: center of the most populated bin, lowest bin on ties.
    let mut counts = vec![0usize; nbins];
    for &v in y {
        counts[bin_index(v, min, width, nbins)] += 1;
    }
    let mode_bin = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let histogram_mode = min + (mode_bin as f64 + 0.5) * width;

    let m = mean(y);
    let binarize_mean = y.iter().filter(|&&v| v > m).count() as f64 / n as f64;

    let med = median(y);
    let crossing_points = y
        .windows(2)
        .filter(|w| (w[0] - med) * (w[1] - med) < 0.0)
        .count() as f64;

    DistributionFeatures {
        flat_spots: Feat::ok(flat as f64),
        histogram_mode: Feat::ok(histogram_mode),
        binarize_mean: Feat::ok(binarize_mean),
        crossing_points: Feat::ok(crossing_points),
    }
}
