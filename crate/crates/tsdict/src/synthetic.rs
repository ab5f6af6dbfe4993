//! Seeded synthetic dataset generators.
//!
//! These produce small, fully reproducible classification problems used by
//! the desk-scale benchmarks and tests: problems where word-frequency
//! structure carries the signal (and raw Euclidean matching struggles), and
//! a location-shift problem where the classes share the same patterns and
//! only their temporal position differs.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, DatasetPair};
use crate::seeding::{self, stream};

fn build_pair<F>(
    name: &str,
    salt: u64,
    seed: u64,
    n_train: usize,
    n_test: usize,
    n_classes: usize,
    mut case: F,
) -> DatasetPair
where
    F: FnMut(&mut ChaCha8Rng, usize) -> Vec<f64>,
{
    assert!(n_train >= 2 && n_test >= 2, "need at least two cases per split");
    let mut rng = seeding::rng(seed, stream::SYNTHETIC, salt);
    let mut make = |n: usize, rng: &mut ChaCha8Rng| {
        let mut series = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let class = i % n_classes;
            series.push(case(rng, class));
            labels.push(format!("c{class}"));
        }
        Dataset::from_parts(name, series, labels).expect("generated data is well-formed")
    };
    let train = make(n_train, &mut rng);
    let test = make(n_test, &mut rng);
    DatasetPair {
        name: name.to_string(),
        train,
        test,
    }
}

fn gaussian_noise(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    // Box-Muller; one draw per call is plenty here.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    scale * (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

fn add_burst(series: &mut [f64], centre: usize, length: usize, cycles: f64, amplitude: f64) {
    let start = centre.saturating_sub(length / 2);
    for i in 0..length {
        let t = start + i;
        if t >= series.len() {
            break;
        }
        let envelope = (PI * i as f64 / length as f64).sin().powi(2);
        series[t] += amplitude * envelope * (TAU * cycles * i as f64 / length as f64).sin();
    }
}

/// Slow random-walk baseline wander; large under Euclidean distance, mostly
/// removed by per-window normalisation.
fn add_drift(rng: &mut ChaCha8Rng, series: &mut [f64], step: f64) {
    let mut level = 0.0;
    for v in series.iter_mut() {
        level += gaussian_noise(rng, step);
        *v += level;
    }
}

/// Two classes oscillating at different dominant frequencies with random
/// phase, amplitude and baseline offset. The jitter makes raw Euclidean
/// matching unreliable while the word distributions stay stable.
pub fn frequency_split(seed: u64, n_train: usize, n_test: usize, m: usize) -> DatasetPair {
    build_pair("FrequencySplit", 1, seed, n_train, n_test, 2, |rng, class| {
        let cycles = if class == 0 { 3.0 } else { 6.5 };
        let phase = rng.gen_range(0.0..TAU);
        let amplitude = rng.gen_range(0.6..1.6);
        let offset = rng.gen_range(-2.0..2.0);
        let mut x: Vec<f64> = (0..m)
            .map(|t| {
                offset
                    + amplitude * (TAU * cycles * t as f64 / m as f64 + phase).sin()
                    + gaussian_noise(rng, 0.4)
            })
            .collect();
        add_drift(rng, &mut x, 0.2);
        x
    })
}

/// One wide peak versus two narrow peaks, with the peak positions jittered
/// from case to case and a random baseline offset.
pub fn warped_peaks(seed: u64, n_train: usize, n_test: usize, m: usize) -> DatasetPair {
    build_pair("WarpedPeaks", 2, seed, n_train, n_test, 2, |rng, class| {
        let offset = rng.gen_range(-1.5..1.5);
        let mut x: Vec<f64> = (0..m)
            .map(|_| offset + gaussian_noise(rng, 0.2))
            .collect();
        let mf = m as f64;
        let peak = |x: &mut Vec<f64>, centre: f64, width: f64, height: f64| {
            for t in 0..m {
                let d = (t as f64 - centre) / width;
                x[t] += height * (-0.5 * d * d).exp();
            }
        };
        if class == 0 {
            let centre = mf * rng.gen_range(0.30..0.70);
            peak(&mut x, centre, mf * 0.10, 2.2);
        } else {
            let c1 = mf * rng.gen_range(0.18..0.42);
            let c2 = mf * rng.gen_range(0.58..0.82);
            peak(&mut x, c1, mf * 0.045, 2.0);
            peak(&mut x, c2, mf * 0.045, 2.0);
        }
        add_drift(rng, &mut x, 0.18);
        x
    })
}

/// Smooth two-harmonic profiles where the classes differ in a
/// high-frequency ripple, under phase jitter, baseline offset and noise.
pub fn harmonic_profiles(seed: u64, n_train: usize, n_test: usize, m: usize) -> DatasetPair {
    build_pair("HarmonicProfiles", 3, seed, n_train, n_test, 2, |rng, class| {
        let phase = rng.gen_range(-1.2..1.2);
        let ripple_phase = rng.gen_range(0.0..TAU);
        let offset = rng.gen_range(-1.8..1.8);
        let mut x: Vec<f64> = (0..m)
            .map(|t| {
                let u = t as f64 / m as f64;
                let mut v = (TAU * u + phase).sin() + 0.5 * (2.0 * TAU * u + 2.0 * phase).cos();
                if class == 1 {
                    v += 0.5 * (6.0 * TAU * u + ripple_phase).sin();
                }
                offset + v + gaussian_noise(rng, 0.25)
            })
            .collect();
        add_drift(rng, &mut x, 0.15);
        x
    })
}

/// Both classes contain the same burst; only the half of the series it
/// lands in differs. A random two-harmonic background masks whole-series
/// phase cues, so flat bags carry almost no signal while pyramid regions
/// carry all of it.
pub fn location_shift(seed: u64, n_train: usize, n_test: usize, m: usize) -> DatasetPair {
    build_pair("LocationShift", 4, seed, n_train, n_test, 2, |rng, class| {
        let a1 = rng.gen_range(0.6..1.0);
        let a2 = rng.gen_range(0.4..0.8);
        let p1 = rng.gen_range(0.0..TAU);
        let p2 = rng.gen_range(0.0..TAU);
        let mut x: Vec<f64> = (0..m)
            .map(|t| {
                let u = t as f64 / m as f64;
                a1 * (TAU * u + p1).sin()
                    + a2 * (2.0 * TAU * u + p2).sin()
                    + gaussian_noise(rng, 0.25)
            })
            .collect();
        // The burst oscillates fast enough to be invisible in the retained
        // coefficients of very long windows, so only windows near its own
        // scale can see it and flat bags cannot place it.
        let length = (m / 6).max(6);
        let range = if class == 0 { 0.10..0.40 } else { 0.60..0.90 };
        let centre = (m as f64 * rng.gen_range(range)) as usize;
        add_burst(&mut x, centre, length, 4.0, 2.2);
        x
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = frequency_split(9, 6, 4, 40);
        let b = frequency_split(9, 6, 4, 40);
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        let c = frequency_split(10, 6, 4, 40);
        assert_ne!(a.train, c.train);
    }

    #[test]
    fn shapes_and_balance() {
        for pair in [
            frequency_split(1, 10, 6, 32),
            warped_peaks(1, 10, 6, 48),
            harmonic_profiles(1, 10, 6, 48),
            location_shift(1, 10, 6, 64),
        ] {
            assert_eq!(pair.train.n_cases(), 10);
            assert_eq!(pair.test.n_cases(), 6);
            assert_eq!(pair.train.n_classes(), 2);
            let counts = pair.train.class_counts();
            assert_eq!(counts, vec![5, 5]);
            assert_eq!(pair.train.series_length(), pair.test.series_length());
        }
    }
}
