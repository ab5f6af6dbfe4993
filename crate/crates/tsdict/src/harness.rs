//! Seeded multi-resample experiment harness.
//!
//! Runs every (dataset, classifier, resample) cell, evaluating the resampled
//! test split with accuracy, balanced accuracy, macro-F1 and AUROC, and
//! emits rows sorted by key so output is independent of scheduling. Cell `r`
//! of a dataset uses the stratified resample with id `r` and seeds its
//! classifier with `base_seed + r`.

use std::time::Instant;

use rayon::prelude::*;

use crate::baseline::EuclideanNearestNeighbour;
use crate::dataset::{stratified_resample, DatasetPair};
use crate::ensemble::{build_ensemble_with_space, EnsembleConfig, EnsembleVariant, SpaceOptions};
use crate::metrics::{compute_metrics, Metrics};
use crate::stats::ScoreMatrix;
use crate::{Error, Result};

/// What to run in a cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierKind {
    Ensemble(EnsembleVariant),
    /// 1-NN on raw series under Euclidean distance.
    EuclideanNn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub name: String,
    pub kind: ClassifierKind,
}

impl ClassifierSpec {
    /// Parse a spec from its CSV name: an ensemble variant or `ed1nn`.
    pub fn from_name(name: &str) -> Result<Self> {
        let kind = if name.eq_ignore_ascii_case("ed1nn") {
            ClassifierKind::EuclideanNn
        } else {
            ClassifierKind::Ensemble(name.parse()?)
        };
        Ok(Self {
            name: name.to_ascii_lowercase(),
            kind,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_resamples: u64,
    pub base_seed: u64,
    pub parameter_samples: usize,
    pub max_ensemble_size: usize,
    pub time_contract: Option<std::time::Duration>,
    pub space: SpaceOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_resamples: 1,
            base_seed: 0,
            parameter_samples: 250,
            max_ensemble_size: 50,
            time_contract: None,
            space: SpaceOptions::default(),
        }
    }
}

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub dataset: String,
    pub classifier: String,
    pub resample: u64,
    pub seed: u64,
    pub train_seconds: f64,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub f1: f64,
    pub auroc: f64,
}

fn evaluate_cell(
    pair: &DatasetPair,
    spec: &ClassifierSpec,
    resample: u64,
    config: &ExperimentConfig,
) -> Result<(f64, Metrics)> {
    let (train, test) = stratified_resample(&pair.train, &pair.test, resample, config.base_seed)?;
    let seed = config.base_seed.wrapping_add(resample);
    let start = Instant::now();
    let distributions: Vec<Vec<f64>> = match &spec.kind {
        ClassifierKind::Ensemble(variant) => {
            let ensemble_config = EnsembleConfig {
                variant: *variant,
                parameter_samples: config.parameter_samples,
                max_ensemble_size: config.max_ensemble_size,
                time_contract: config.time_contract,
                seed,
            };
            let model = build_ensemble_with_space(&train, &ensemble_config, &config.space)?;
            let train_seconds = start.elapsed().as_secs_f64();
            let d = (0..test.n_cases())
                .map(|i| model.predict(test.series(i)).map(|(_, d)| d))
                .collect::<Result<Vec<_>>>()?;
            return Ok((
                train_seconds,
                compute_metrics(test.labels(), &d, train.n_classes()),
            ));
        }
        ClassifierKind::EuclideanNn => {
            let model = EuclideanNearestNeighbour::fit(&train);
            (0..test.n_cases())
                .map(|i| model.predict_distribution(test.series(i)).map(|(_, d)| d))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let train_seconds = start.elapsed().as_secs_f64();
    Ok((
        train_seconds,
        compute_metrics(test.labels(), &distributions, train.n_classes()),
    ))
}

/// Run every (dataset, classifier, resample) combination.
///
/// Cells execute in parallel on the current rayon pool; a failed build is
/// recorded as a row of NaN metrics and the run continues. Rows come back
/// sorted by (dataset, classifier, resample).
pub fn run_experiment(
    pairs: &[DatasetPair],
    specs: &[ClassifierSpec],
    config: &ExperimentConfig,
) -> Vec<ExperimentResult> {
    let mut cells = Vec::new();
    for p in 0..pairs.len() {
        for s in 0..specs.len() {
            for resample in 0..config.n_resamples {
                cells.push((p, s, resample));
            }
        }
    }

    let mut results: Vec<ExperimentResult> = cells
        .par_iter()
        .map(|&(p, s, resample)| {
            let pair = &pairs[p];
            let spec = &specs[s];
            let seed = config.base_seed.wrapping_add(resample);
            match evaluate_cell(pair, spec, resample, config) {
                Ok((train_seconds, metrics)) => ExperimentResult {
                    dataset: pair.name.clone(),
                    classifier: spec.name.clone(),
                    resample,
                    seed,
                    train_seconds,
                    accuracy: metrics.accuracy,
                    balanced_accuracy: metrics.balanced_accuracy,
                    f1: metrics.f1,
                    auroc: metrics.auroc,
                },
                Err(err) => {
                    log::warn!(
                        "cell ({}, {}, {resample}) failed: {err}",
                        pair.name,
                        spec.name
                    );
                    ExperimentResult {
                        dataset: pair.name.clone(),
                        classifier: spec.name.clone(),
                        resample,
                        seed,
                        train_seconds: f64::NAN,
                        accuracy: f64::NAN,
                        balanced_accuracy: f64::NAN,
                        f1: f64::NAN,
                        auroc: f64::NAN,
                    }
                }
            }
        })
        .collect();

    results.sort_by(|a, b| {
        a.dataset
            .cmp(&b.dataset)
            .then_with(|| a.classifier.cmp(&b.classifier))
            .then(a.resample.cmp(&b.resample))
    });
    results
}

pub const RESULTS_CSV_HEADER: &str =
    "dataset,classifier,resample,seed,train_seconds,accuracy,balanced_accuracy,f1,auroc";

/// Serialise rows to CSV with shortest-round-trip float formatting, so
/// parsing the output reproduces the rows exactly.
pub fn results_to_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.dataset,
            r.classifier,
            r.resample,
            r.seed,
            r.train_seconds,
            r.accuracy,
            r.balanced_accuracy,
            r.f1,
            r.auroc
        ));
    }
    out
}

pub fn parse_results_csv(text: &str) -> Result<Vec<ExperimentResult>> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line_no == 0 {
            if line != RESULTS_CSV_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: "unexpected results CSV header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse {
                line: line_no + 1,
                message: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let num = |i: usize| -> Result<f64> {
            fields[i].parse().map_err(|_| Error::Parse {
                line: line_no + 1,
                message: format!("bad number '{}'", fields[i]),
            })
        };
        rows.push(ExperimentResult {
            dataset: fields[0].to_string(),
            classifier: fields[1].to_string(),
            resample: fields[2].parse().map_err(|_| Error::Parse {
                line: line_no + 1,
                message: "bad resample id".into(),
            })?,
            seed: fields[3].parse().map_err(|_| Error::Parse {
                line: line_no + 1,
                message: "bad seed".into(),
            })?,
            train_seconds: num(4)?,
            accuracy: num(5)?,
            balanced_accuracy: num(6)?,
            f1: num(7)?,
            auroc: num(8)?,
        });
    }
    Ok(rows)
}

/// Which metric column feeds the rank comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Accuracy,
    BalancedAccuracy,
    F1,
    Auroc,
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "accuracy" => Ok(MetricKind::Accuracy),
            "balanced_accuracy" | "balanced-accuracy" => Ok(MetricKind::BalancedAccuracy),
            "f1" => Ok(MetricKind::F1),
            "auroc" => Ok(MetricKind::Auroc),
            other => Err(Error::InvalidParameters(format!("unknown metric '{other}'"))),
        }
    }
}

/// Mean metric per (dataset, classifier) over resamples, as a score matrix.
/// NaN rows (failed cells) count as missing.
pub fn score_matrix(results: &[ExperimentResult], metric: MetricKind) -> Result<ScoreMatrix> {
    let mut datasets: Vec<String> = results.iter().map(|r| r.dataset.clone()).collect();
    datasets.sort();
    datasets.dedup();
    let mut classifiers: Vec<String> = results.iter().map(|r| r.classifier.clone()).collect();
    classifiers.sort();
    classifiers.dedup();

    let value = |r: &ExperimentResult| match metric {
        MetricKind::Accuracy => r.accuracy,
        MetricKind::BalancedAccuracy => r.balanced_accuracy,
        MetricKind::F1 => r.f1,
        MetricKind::Auroc => r.auroc,
    };

    let mut scores = vec![vec![f64::NAN; classifiers.len()]; datasets.len()];
    let mut missing = Vec::new();
    for (d, dataset) in datasets.iter().enumerate() {
        for (c, classifier) in classifiers.iter().enumerate() {
            let values: Vec<f64> = results
                .iter()
                .filter(|r| &r.dataset == dataset && &r.classifier == classifier)
                .map(&value)
                .filter(|v| !v.is_nan())
                .collect();
            if values.is_empty() {
                missing.push(format!("{dataset}/{classifier}"));
            } else {
                scores[d][c] = values.iter().sum::<f64>() / values.len() as f64;
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteMatrix { missing });
    }
    Ok(ScoreMatrix {
        classifiers,
        datasets,
        scores,
    })
}
