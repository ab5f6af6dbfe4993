//! Dictionary-based time series classification.
//!
//! `tsdict` implements the BOSS family of bag-of-words classifiers (BOSS,
//! cBOSS, S-BOSS, cS-BOSS) and the Temporal Dictionary Ensemble (TDE), which
//! augments the contractable ensemble with spatial pyramids, bigrams,
//! information gain binning and a Gaussian-process model over the parameter
//! space that guides member selection after a random warm-up.
//!
//! The crate also ships the supporting machinery needed to run experiments:
//! a UCR `.ts` loader with seeded stratified resampling, accuracy/AUROC/F1
//! metrics, pairwise Wilcoxon signed-rank comparisons with Holm correction,
//! and synthetic dataset generators for desk-scale benchmarks.
//!
//! ```
//! use tsdict::{build_ensemble, EnsembleConfig, EnsembleVariant};
//!
//! let pair = tsdict::synthetic::frequency_split(7, 20, 20, 60);
//! let config = EnsembleConfig {
//!     variant: EnsembleVariant::CBoss,
//!     parameter_samples: 20,
//!     max_ensemble_size: 10,
//!     ..EnsembleConfig::default()
//! };
//! let model = build_ensemble(&pair.train, &config).unwrap();
//! let (label, distribution) = model.predict(pair.test.series(0)).unwrap();
//! assert!(label < pair.train.n_classes());
//! assert!((distribution.iter().sum::<f64>() - 1.0).abs() < 1e-12);
//! ```

pub mod baseline;
pub mod dataset;
pub mod dictionary;
pub mod ensemble;
mod error;
pub mod gp;
pub mod harness;
pub mod metrics;
pub mod seeding;
pub mod sfa;
pub mod stats;
pub mod synthetic;

pub use dataset::{parse_ts_file, stratified_resample, subsample_train, Dataset, DatasetPair};
pub use dictionary::{
    boss_distance, build_individual, histogram_intersection, pyramid_bags, DistanceMeasure,
    IndividualBoss, IndividualConfig,
};
pub use ensemble::{
    build_boss_ensemble, build_cboss, build_csboss, build_ensemble, build_ensemble_with_space,
    build_sboss, build_tde, build_tde_with_options, CandidateParams, Ensemble, EnsembleConfig,
    EnsembleVariant, ParamRecord, SpaceOptions, TdeOptions,
};
pub use error::Error;
pub use gp::{choose_parameters, encode_params, gp_fit, gp_predict, GpHyperparameters, GpModel};
pub use harness::{run_experiment, ClassifierKind, ClassifierSpec, ExperimentConfig, ExperimentResult};
pub use sfa::{Bag, Binning, BreakpointTable, SfaParameters};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
