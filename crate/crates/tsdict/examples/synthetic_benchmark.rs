//! Benchmark every classifier variant on the bundled synthetic problems and
//! print one line per (dataset, classifier) cell.
//!
//! Run with: cargo run --release --example synthetic_benchmark

use std::time::Instant;

use tsdict::harness::{run_experiment, ClassifierSpec, ExperimentConfig};
use tsdict::synthetic;

fn main() {
    let pairs = vec![
        synthetic::frequency_split(1, 50, 80, 96),
        synthetic::warped_peaks(2, 50, 80, 128),
        synthetic::harmonic_profiles(3, 50, 80, 96),
        synthetic::location_shift(4, 50, 80, 96),
    ];
    let specs = vec![
        ClassifierSpec::from_name("ed1nn").unwrap(),
        ClassifierSpec::from_name("boss").unwrap(),
        ClassifierSpec::from_name("cboss").unwrap(),
        ClassifierSpec::from_name("csboss").unwrap(),
        ClassifierSpec::from_name("tde").unwrap(),
    ];
    let config = ExperimentConfig {
        n_resamples: 1,
        parameter_samples: 100,
        max_ensemble_size: 25,
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let results = run_experiment(&pairs, &specs, &config);
    for r in &results {
        println!(
            "{:18} {:8} acc={:.3} bal={:.3} f1={:.3} auroc={:.3} train={:.1}s",
            r.dataset, r.classifier, r.accuracy, r.balanced_accuracy, r.f1, r.auroc, r.train_seconds
        );
    }
    println!("total wall: {:.1}s", start.elapsed().as_secs_f64());
}
