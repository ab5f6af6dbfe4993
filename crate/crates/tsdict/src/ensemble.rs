//! Ensemble construction for the BOSS family and TDE.
//!
//! BOSS and S-BOSS evaluate a full parameter grid on the whole training set
//! and retain every member within 92% of the best train accuracy, with
//! uniform vote weights. cBOSS, cS-BOSS and TDE instead sample up to `k`
//! parameter combinations without replacement, build each member on a fresh
//! 70% training subsample, keep the top `s` members by leave-one-out
//! accuracy under lowest-accuracy replacement, and weight votes by
//! `accuracy^4`. TDE additionally samples pyramid height and discretisation,
//! always uses bigrams and histogram intersection, and after a 50-iteration
//! random warm-up lets a Gaussian process over the parameter space pick the
//! combination with the highest predicted accuracy.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{subsample_train, Dataset};
use crate::dictionary::{build_individual, DistanceMeasure, IndividualBoss, IndividualConfig};
use crate::gp::{self, GpHyperparameters};
use crate::seeding::{self, stream};
use crate::sfa::{Binning, SfaParameters};
use crate::{Error, Result};

/// Fraction of the training data each sampled-ensemble member is built on.
pub const SUBSAMPLE_PROPORTION: f64 = 0.7;

/// Grid ensembles keep members within this fraction of the best accuracy.
pub const RETENTION_THRESHOLD: f64 = 0.92;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleVariant {
    Boss,
    CBoss,
    SBoss,
    CSBoss,
    Tde,
}

impl EnsembleVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleVariant::Boss => "boss",
            EnsembleVariant::CBoss => "cboss",
            EnsembleVariant::SBoss => "sboss",
            EnsembleVariant::CSBoss => "csboss",
            EnsembleVariant::Tde => "tde",
        }
    }
}

impl std::str::FromStr for EnsembleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "boss" => Ok(EnsembleVariant::Boss),
            "cboss" => Ok(EnsembleVariant::CBoss),
            "sboss" => Ok(EnsembleVariant::SBoss),
            "csboss" => Ok(EnsembleVariant::CSBoss),
            "tde" => Ok(EnsembleVariant::Tde),
            other => Err(Error::InvalidParameters(format!(
                "unknown classifier variant '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub variant: EnsembleVariant,
    /// Number of parameter combinations to sample (`k`).
    pub parameter_samples: usize,
    /// Maximum ensemble size (`s`).
    pub max_ensemble_size: usize,
    /// Upper bound on model construction time, checked between member builds.
    pub time_contract: Option<Duration>,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            variant: EnsembleVariant::Tde,
            parameter_samples: 250,
            max_ensemble_size: 50,
            time_contract: None,
            seed: 0,
        }
    }
}

/// One point of the member parameter space (alphabet size is fixed at 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CandidateParams {
    pub word_length: usize,
    pub window_length: usize,
    pub normalise: bool,
    pub pyramid_height: usize,
    pub binning: Binning,
}

impl CandidateParams {
    fn to_config(self, use_bigrams: bool, distance: DistanceMeasure) -> Result<IndividualConfig> {
        Ok(IndividualConfig {
            sfa: SfaParameters::new(
                self.word_length,
                4,
                self.window_length,
                self.normalise,
                self.binning,
            )?,
            pyramid_height: self.pyramid_height,
            use_bigrams,
            distance,
        })
    }
}

/// A parameter combination and the train accuracy its member achieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub candidate: CandidateParams,
    pub accuracy: f64,
}

/// Restrictions on the searched parameter space, mirroring the selection
/// ranges (word lengths {8,10,12,14,16}, pyramid heights up to 3).
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceOptions {
    pub word_lengths: Vec<usize>,
    pub max_height: usize,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        Self {
            word_lengths: vec![16, 14, 12, 10, 8],
            max_height: 3,
        }
    }
}

/// Knobs for the TDE build loop. The defaults are the real classifier;
/// the other settings exist so that TDE restricted to a smaller space can be
/// checked against cBOSS and cS-BOSS.
#[derive(Debug, Clone, PartialEq)]
pub struct TdeOptions {
    pub use_gp: bool,
    pub heights: Vec<usize>,
    pub binnings: Vec<Binning>,
    pub use_bigrams: bool,
    pub distance: DistanceMeasure,
    pub gp_hyper: GpHyperparameters,
}

impl Default for TdeOptions {
    fn default() -> Self {
        Self {
            use_gp: true,
            heights: vec![1, 2, 3],
            binnings: vec![Binning::Mcb, Binning::Igb],
            use_bigrams: true,
            distance: DistanceMeasure::HistogramIntersection,
            gp_hyper: GpHyperparameters::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub individual: IndividualBoss,
    pub weight: f64,
    pub accuracy: f64,
    /// Iteration at which this member was built; breaks accuracy ties.
    pub arrival: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BuildStats {
    pub wall_seconds: f64,
    pub member_seconds: Vec<f64>,
}

/// A built ensemble: weighted voting over individual dictionary classifiers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ensemble {
    pub config: EnsembleConfig,
    pub class_names: Vec<String>,
    pub series_length: usize,
    pub members: Vec<EnsembleMember>,
    /// Every (parameters, accuracy) pair evaluated during the build, in
    /// evaluation order.
    pub history: Vec<ParamRecord>,
    pub build: BuildStats,
}

const MODEL_FORMAT: &str = "tsdict-model";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    ensemble: Ensemble,
}

impl Ensemble {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Weighted vote distribution over classes and the argmax label
    /// (ties broken by the lowest class id).
    pub fn predict(&self, series: &[f64]) -> Result<(usize, Vec<f64>)> {
        if series.len() != self.series_length {
            return Err(Error::SeriesLengthMismatch {
                expected: self.series_length,
                found: series.len(),
            });
        }
        debug_assert!(!self.members.is_empty());
        let total_weight: f64 = self.members.iter().map(|m| m.weight).sum();
        let mut distribution = vec![0.0; self.n_classes()];
        for member in &self.members {
            let label = member.individual.predict_1nn(series)?;
            // If every member has zero weight fall back to unweighted votes.
            distribution[label] += if total_weight > 0.0 { member.weight } else { 1.0 };
        }
        let sum: f64 = distribution.iter().sum();
        for p in &mut distribution {
            *p /= sum;
        }
        let mut label = 0;
        for (c, &p) in distribution.iter().enumerate() {
            if p > distribution[label] {
                label = c;
            }
        }
        Ok((label, distribution))
    }

    /// Weighted mean of the members' leave-one-out accuracies; the summary
    /// figure printed after fitting.
    pub fn train_accuracy_estimate(&self) -> f64 {
        let total: f64 = self.members.iter().map(|m| m.weight).sum();
        if total > 0.0 {
            self.members.iter().map(|m| m.weight * m.accuracy).sum::<f64>() / total
        } else {
            self.members.iter().map(|m| m.accuracy).sum::<f64>() / self.members.len() as f64
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            ensemble: self.clone(),
        };
        serde_json::to_string(&file).map_err(|e| Error::Model(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Model(format!("unexpected format '{}'", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Model(format!("unsupported version {}", file.version)));
        }
        Ok(file.ensemble)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Window lengths for the grid ensembles: `m/4` evenly spaced values over
/// `{10..m}`, deduplicated; series shorter than 10 collapse to `{m}`.
fn boss_window_grid(series_length: usize) -> Vec<usize> {
    if series_length < 10 {
        return vec![series_length];
    }
    let count = (series_length / 4).max(2);
    let mut windows = Vec::with_capacity(count);
    for i in 0..count {
        let w = 10.0 + (series_length - 10) as f64 * i as f64 / (count - 1) as f64;
        windows.push(w.round() as usize);
    }
    windows.dedup();
    windows
}

/// Enumerate all legal parameter combinations in canonical order.
fn parameter_space(
    series_length: usize,
    word_lengths: &[usize],
    heights: &[usize],
    binnings: &[Binning],
) -> Vec<CandidateParams> {
    let windows: Vec<usize> = if series_length < 10 {
        vec![series_length]
    } else {
        (10..=series_length).collect()
    };
    let mut out = Vec::new();
    for &word_length in word_lengths {
        for &window_length in &windows {
            for normalise in [false, true] {
                if window_length < word_length / 2 + usize::from(normalise) {
                    continue;
                }
                for &pyramid_height in heights {
                    for &binning in binnings {
                        out.push(CandidateParams {
                            word_length,
                            window_length,
                            normalise,
                            pyramid_height,
                            binning,
                        });
                    }
                }
            }
        }
    }
    out
}

/// `(lowest accuracy, slot)` among current members; accuracy ties go to the
/// latest arrival so the retained set is always the top `s` by accuracy with
/// earlier arrivals preferred.
fn find_lowest(members: &[EnsembleMember]) -> Option<(f64, usize)> {
    members
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.accuracy
                .total_cmp(&b.accuracy)
                .then(b.arrival.cmp(&a.arrival))
        })
        .map(|(slot, member)| (member.accuracy, slot))
}

struct SampledSpec<'a> {
    word_lengths: &'a [usize],
    heights: Vec<usize>,
    binnings: Vec<Binning>,
    use_bigrams: bool,
    distance: DistanceMeasure,
    use_gp: bool,
    gp_hyper: GpHyperparameters,
}

fn build_sampled(
    train: &Dataset,
    config: &EnsembleConfig,
    spec: &SampledSpec<'_>,
) -> Result<Ensemble> {
    let start = Instant::now();
    if config.max_ensemble_size == 0 || config.max_ensemble_size > config.parameter_samples {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= max ensemble size <= parameter samples, got s={} k={}",
            config.max_ensemble_size, config.parameter_samples
        )));
    }
    let m = train.series_length();
    let mut remaining = parameter_space(m, spec.word_lengths, &spec.heights, &spec.binnings);
    if remaining.is_empty() {
        return Err(Error::NoLegalParameters);
    }

    let mut rng = seeding::rng(config.seed, stream::PARAMETERS, 0);
    let mut members: Vec<EnsembleMember> = Vec::new();
    let mut lowest: Option<(f64, usize)> = None;
    let mut history: Vec<ParamRecord> = Vec::new();
    let mut member_seconds = Vec::new();

    let mut i = 0;
    while i < config.parameter_samples && !remaining.is_empty() {
        if i > 0 {
            if let Some(limit) = config.time_contract {
                if start.elapsed() >= limit {
                    break;
                }
            }
        }
        let idx = if spec.use_gp {
            gp::choose_parameters(&remaining, &history, i, m, &spec.gp_hyper, &mut rng)?
        } else {
            rng.gen_range(0..remaining.len())
        };
        let candidate = remaining.swap_remove(idx);

        let subsample_seed = seeding::derive_seed(config.seed, stream::SUBSAMPLE, i as u64);
        let subsample = subsample_train(train, SUBSAMPLE_PROPORTION, subsample_seed);
        let member_start = Instant::now();
        let individual = build_individual(
            &subsample,
            &candidate.to_config(spec.use_bigrams, spec.distance)?,
        )?;
        member_seconds.push(member_start.elapsed().as_secs_f64());
        let accuracy = individual.train_accuracy;

        if members.len() < config.max_ensemble_size {
            if lowest.map_or(true, |(acc, _)| accuracy <= acc) {
                lowest = Some((accuracy, members.len()));
            }
            members.push(EnsembleMember {
                individual,
                weight: accuracy.powi(4),
                accuracy,
                arrival: i,
            });
        } else if let Some((lowest_acc, slot)) = lowest {
            if accuracy > lowest_acc {
                members[slot] = EnsembleMember {
                    individual,
                    weight: accuracy.powi(4),
                    accuracy,
                    arrival: i,
                };
                lowest = find_lowest(&members);
            }
        }
        history.push(ParamRecord {
            candidate,
            accuracy,
        });
        i += 1;
    }

    Ok(Ensemble {
        config: *config,
        class_names: train.class_names().to_vec(),
        series_length: m,
        members,
        history,
        build: BuildStats {
            wall_seconds: start.elapsed().as_secs_f64(),
            member_seconds,
        },
    })
}

/// cBOSS: random `[l, a, w, p]` sampling without replacement, subsampled
/// members, BOSS distance, `accuracy^4` weights.
pub fn build_cboss(train: &Dataset, config: &EnsembleConfig) -> Result<Ensemble> {
    build_cboss_with_space(train, config, &SpaceOptions::default())
}

pub fn build_cboss_with_space(
    train: &Dataset,
    config: &EnsembleConfig,
    space: &SpaceOptions,
) -> Result<Ensemble> {
    build_sampled(
        train,
        config,
        &SampledSpec {
            word_lengths: &space.word_lengths,
            heights: vec![1],
            binnings: vec![Binning::Mcb],
            use_bigrams: false,
            distance: DistanceMeasure::BossDistance,
            use_gp: false,
            gp_hyper: GpHyperparameters::default(),
        },
    )
}

/// cS-BOSS: cBOSS with the pyramid height added to the sampled parameters
/// and histogram intersection as the distance.
pub fn build_csboss(train: &Dataset, config: &EnsembleConfig) -> Result<Ensemble> {
    build_csboss_with_space(train, config, &SpaceOptions::default())
}

pub fn build_csboss_with_space(
    train: &Dataset,
    config: &EnsembleConfig,
    space: &SpaceOptions,
) -> Result<Ensemble> {
    build_sampled(
        train,
        config,
        &SampledSpec {
            word_lengths: &space.word_lengths,
            heights: (1..=space.max_height.clamp(1, 3)).collect(),
            binnings: vec![Binning::Mcb],
            use_bigrams: false,
            distance: DistanceMeasure::HistogramIntersection,
            use_gp: false,
            gp_hyper: GpHyperparameters::default(),
        },
    )
}

/// TDE with the standard settings: sampled `[l, a, w, p, h, b]`, bigrams,
/// histogram intersection, GP-guided choice after the random warm-up.
pub fn build_tde(train: &Dataset, config: &EnsembleConfig) -> Result<Ensemble> {
    build_tde_with_options(train, config, &TdeOptions::default(), &SpaceOptions::default())
}

pub fn build_tde_with_options(
    train: &Dataset,
    config: &EnsembleConfig,
    options: &TdeOptions,
    space: &SpaceOptions,
) -> Result<Ensemble> {
    let heights: Vec<usize> = options
        .heights
        .iter()
        .copied()
        .filter(|&h| h <= space.max_height.clamp(1, 3))
        .collect();
    build_sampled(
        train,
        config,
        &SampledSpec {
            word_lengths: &space.word_lengths,
            heights,
            binnings: options.binnings.clone(),
            use_bigrams: options.use_bigrams,
            distance: options.distance,
            use_gp: options.use_gp,
            gp_hyper: options.gp_hyper,
        },
    )
}

/// The original BOSS ensemble: full grid over `(w, l, p)` built on the whole
/// training set, retaining everything within 92% of the best accuracy, with
/// uniform weights.
pub fn build_boss_ensemble(train: &Dataset) -> Result<Ensemble> {
    build_boss_ensemble_with_space(train, &SpaceOptions::default())
}

pub fn build_boss_ensemble_with_space(train: &Dataset, space: &SpaceOptions) -> Result<Ensemble> {
    let start = Instant::now();
    let m = train.series_length();
    let windows = boss_window_grid(m);
    let mut members = Vec::new();
    let mut history = Vec::new();
    let mut member_seconds = Vec::new();
    let mut arrival = 0;
    for &word_length in &space.word_lengths {
        for &window_length in &windows {
            for normalise in [false, true] {
                if window_length < word_length / 2 + usize::from(normalise) || window_length > m {
                    continue;
                }
                let candidate = CandidateParams {
                    word_length,
                    window_length,
                    normalise,
                    pyramid_height: 1,
                    binning: Binning::Mcb,
                };
                let member_start = Instant::now();
                let individual = build_individual(
                    train,
                    &candidate.to_config(false, DistanceMeasure::BossDistance)?,
                )?;
                member_seconds.push(member_start.elapsed().as_secs_f64());
                let accuracy = individual.train_accuracy;
                history.push(ParamRecord {
                    candidate,
                    accuracy,
                });
                members.push(EnsembleMember {
                    individual,
                    weight: 1.0,
                    accuracy,
                    arrival,
                });
                arrival += 1;
            }
        }
    }
    if members.is_empty() {
        return Err(Error::NoLegalParameters);
    }
    let best = members
        .iter()
        .map(|m| m.accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    members.retain(|m| m.accuracy >= RETENTION_THRESHOLD * best);

    Ok(Ensemble {
        config: EnsembleConfig {
            variant: EnsembleVariant::Boss,
            ..EnsembleConfig::default()
        },
        class_names: train.class_names().to_vec(),
        series_length: m,
        members,
        history,
        build: BuildStats {
            wall_seconds: start.elapsed().as_secs_f64(),
            member_seconds,
        },
    })
}

/// S-BOSS: per word length, grid-search `(w, p)` for the best flat member,
/// then greedily search pyramid heights, keeping the best; final retention
/// at 92% of the best accuracy across the per-word-length winners.
pub fn build_sboss(train: &Dataset) -> Result<Ensemble> {
    build_sboss_with_space(train, &SpaceOptions::default())
}

pub fn build_sboss_with_space(train: &Dataset, space: &SpaceOptions) -> Result<Ensemble> {
    let start = Instant::now();
    let m = train.series_length();
    let windows = boss_window_grid(m);
    let mut winners: Vec<EnsembleMember> = Vec::new();
    let mut history = Vec::new();
    let mut member_seconds = Vec::new();
    let mut arrival = 0;

    for &word_length in &space.word_lengths {
        let mut best: Option<(IndividualBoss, f64, CandidateParams)> = None;
        for &window_length in &windows {
            for normalise in [false, true] {
                if window_length < word_length / 2 + usize::from(normalise) || window_length > m {
                    continue;
                }
                let candidate = CandidateParams {
                    word_length,
                    window_length,
                    normalise,
                    pyramid_height: 1,
                    binning: Binning::Mcb,
                };
                let member_start = Instant::now();
                let individual = build_individual(
                    train,
                    &candidate.to_config(false, DistanceMeasure::HistogramIntersection)?,
                )?;
                member_seconds.push(member_start.elapsed().as_secs_f64());
                let accuracy = individual.train_accuracy;
                history.push(ParamRecord {
                    candidate,
                    accuracy,
                });
                if best.as_ref().map_or(true, |&(_, acc, _)| accuracy > acc) {
                    best = Some((individual, accuracy, candidate));
                }
            }
        }
        let Some((mut best_cls, mut best_acc, base)) = best else {
            continue;
        };
        for pyramid_height in 2..=space.max_height.clamp(1, 3) {
            let candidate = CandidateParams {
                pyramid_height,
                ..base
            };
            let member_start = Instant::now();
            let individual = build_individual(
                train,
                &candidate.to_config(false, DistanceMeasure::HistogramIntersection)?,
            )?;
            member_seconds.push(member_start.elapsed().as_secs_f64());
            let accuracy = individual.train_accuracy;
            history.push(ParamRecord {
                candidate,
                accuracy,
            });
            if accuracy > best_acc {
                best_cls = individual;
                best_acc = accuracy;
            }
        }
        winners.push(EnsembleMember {
            individual: best_cls,
            weight: 1.0,
            accuracy: best_acc,
            arrival,
        });
        arrival += 1;
    }

    if winners.is_empty() {
        return Err(Error::NoLegalParameters);
    }
    let best = winners
        .iter()
        .map(|m| m.accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    winners.retain(|m| m.accuracy >= RETENTION_THRESHOLD * best);

    Ok(Ensemble {
        config: EnsembleConfig {
            variant: EnsembleVariant::SBoss,
            ..EnsembleConfig::default()
        },
        class_names: train.class_names().to_vec(),
        series_length: m,
        members: winners,
        history,
        build: BuildStats {
            wall_seconds: start.elapsed().as_secs_f64(),
            member_seconds,
        },
    })
}

/// Build the ensemble named by `config.variant` with default space options.
pub fn build_ensemble(train: &Dataset, config: &EnsembleConfig) -> Result<Ensemble> {
    build_ensemble_with_space(train, config, &SpaceOptions::default())
}

pub fn build_ensemble_with_space(
    train: &Dataset,
    config: &EnsembleConfig,
    space: &SpaceOptions,
) -> Result<Ensemble> {
    match config.variant {
        EnsembleVariant::Boss => build_boss_ensemble_with_space(train, space),
        EnsembleVariant::SBoss => build_sboss_with_space(train, space),
        EnsembleVariant::CBoss => build_cboss_with_space(train, config, space),
        EnsembleVariant::CSBoss => build_csboss_with_space(train, config, space),
        EnsembleVariant::Tde => {
            build_tde_with_options(train, config, &TdeOptions::default(), space)
        }
    }
}
