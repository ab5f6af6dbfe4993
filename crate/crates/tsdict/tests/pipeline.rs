//! End-to-end flows through the public API: file round trips, model
//! persistence and harness determinism.

use tsdict::harness::{results_to_csv, run_experiment, ClassifierSpec, ExperimentConfig};
use tsdict::{
    build_ensemble, parse_ts_file, stratified_resample, synthetic, Ensemble, EnsembleConfig,
    EnsembleVariant,
};

#[test]
fn ts_files_round_trip_through_resampling() {
    let pair = synthetic::harmonic_profiles(11, 12, 8, 24);
    let train = parse_ts_file(&pair.train.to_ts_string()).unwrap();
    let test = parse_ts_file(&pair.test.to_ts_string()).unwrap();
    assert_eq!(train, pair.train);
    assert_eq!(test, pair.test);

    let (rtrain, rtest) = stratified_resample(&train, &test, 3, 7).unwrap();
    assert_eq!(rtrain.class_counts(), train.class_counts());
    assert_eq!(rtest.class_counts(), test.class_counts());
    // And the resampled splits serialise cleanly too.
    assert_eq!(parse_ts_file(&rtrain.to_ts_string()).unwrap(), rtrain);
}

#[test]
fn saved_model_file_reproduces_predictions() {
    let pair = synthetic::frequency_split(21, 16, 10, 36);
    let config = EnsembleConfig {
        variant: EnsembleVariant::Tde,
        parameter_samples: 8,
        max_ensemble_size: 4,
        seed: 5,
        ..EnsembleConfig::default()
    };
    let model = build_ensemble(&pair.train, &config).unwrap();

    let dir = std::env::temp_dir().join("tsdict-pipeline-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.json");
    model.save(&path).unwrap();
    let restored = Ensemble::load(&path).unwrap();
    std::fs::remove_file(&path).ok();

    assert_eq!(restored.config, model.config);
    assert_eq!(restored.members.len(), model.members.len());
    for i in 0..pair.test.n_cases() {
        assert_eq!(
            model.predict(pair.test.series(i)).unwrap(),
            restored.predict(pair.test.series(i)).unwrap()
        );
    }
}

#[test]
fn harness_output_is_seed_deterministic() {
    let pairs = vec![
        synthetic::frequency_split(2, 10, 6, 30),
        synthetic::warped_peaks(3, 10, 6, 32),
    ];
    let specs = vec![
        ClassifierSpec::from_name("cboss").unwrap(),
        ClassifierSpec::from_name("ed1nn").unwrap(),
    ];
    let config = ExperimentConfig {
        n_resamples: 2,
        parameter_samples: 6,
        max_ensemble_size: 3,
        base_seed: 9,
        ..ExperimentConfig::default()
    };
    let strip = |mut rows: Vec<tsdict::ExperimentResult>| {
        for r in &mut rows {
            r.train_seconds = 0.0;
        }
        results_to_csv(&rows)
    };
    let a = strip(run_experiment(&pairs, &specs, &config));
    let b = strip(run_experiment(&pairs, &specs, &config));
    assert_eq!(a, b);
}
