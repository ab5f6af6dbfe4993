//! UCR-style dataset loading, stratified resampling and train subsampling.
//!
//! Datasets are collections of equal-length univariate series with class
//! labels. Labels are opaque strings in the files; they are mapped to dense
//! integer ids (sorted lexicographically) at parse time so that two files
//! sharing a class set always agree on the id assignment.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::seeding::{self, stream};
use crate::{Error, Result};

/// A labelled collection of equal-length series.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    series: Vec<Vec<f64>>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

/// A named train/test split, the unit the experiment harness works on.
#[derive(Debug, Clone)]
pub struct DatasetPair {
    pub name: String,
    pub train: Dataset,
    pub test: Dataset,
}

impl Dataset {
    /// Build a dataset from raw parts, assigning dense ids to the labels in
    /// lexicographic order of the label strings.
    pub fn from_parts(
        name: impl Into<String>,
        series: Vec<Vec<f64>>,
        label_strings: Vec<String>,
    ) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if series.len() != label_strings.len() {
            return Err(Error::IncompatibleDatasets(format!(
                "{} series but {} labels",
                series.len(),
                label_strings.len()
            )));
        }
        let m = series[0].len();
        for (i, s) in series.iter().enumerate() {
            if s.len() != m {
                return Err(Error::UnequalLength {
                    line: i + 1,
                    expected: m,
                    found: s.len(),
                });
            }
        }
        if m == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut class_names: Vec<String> = label_strings.clone();
        class_names.sort();
        class_names.dedup();
        let index: BTreeMap<&str, usize> = class_names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), i))
            .collect();
        let labels = label_strings.iter().map(|l| index[l.as_str()]).collect();
        Ok(Self {
            name: name.into(),
            series,
            labels,
            class_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of cases.
    pub fn n_cases(&self) -> usize {
        self.series.len()
    }

    /// Length of every series.
    pub fn series_length(&self) -> usize {
        self.series[0].len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.series[i]
    }

    pub fn all_series(&self) -> &[Vec<f64>] {
        &self.series
    }

    /// Dense class id of case `i`.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_name(&self, id: usize) -> &str {
        &self.class_names[id]
    }

    /// Per-class case counts, indexed by class id.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    fn take(&self, indices: &[usize], class_names: Vec<String>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            series: indices.iter().map(|&i| self.series[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names,
        }
    }

    /// Serialise to the UCR `.ts` text format.
    pub fn to_ts_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("@problemName {}\n", self.name));
        out.push_str("@timeStamps false\n");
        out.push_str("@univariate true\n");
        out.push_str(&format!("@classLabel true {}\n", self.class_names.join(" ")));
        out.push_str("@data\n");
        for (s, &l) in self.series.iter().zip(&self.labels) {
            let values: Vec<String> = s.iter().map(|v| format!("{v}")).collect();
            out.push_str(&values.join(","));
            out.push(':');
            out.push_str(&self.class_names[l]);
            out.push('\n');
        }
        out
    }

    /// Debug CSV export: one case per row, label string in the final column.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (s, &l) in self.series.iter().zip(&self.labels) {
            for v in s {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&self.class_names[l]);
            out.push('\n');
        }
        out
    }
}

/// Parse the UCR `.ts` text format.
///
/// Header lines are prefixed with `@` (`#` comment lines are skipped); the
/// body starts after `@data`. Each body line is one case: comma-separated
/// values with the class label after the final `:`.
pub fn parse_ts_file(text: &str) -> Result<Dataset> {
    let mut name = String::from("unnamed");
    let mut series: Vec<Vec<f64>> = Vec::new();
    let mut label_strings: Vec<String> = Vec::new();
    let mut in_data = false;
    let mut expected_len: Option<usize> = None;

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !in_data {
            if let Some(rest) = line.strip_prefix('@') {
                let lower = rest.to_ascii_lowercase();
                if lower == "data" {
                    in_data = true;
                } else if let Some(value) = rest.strip_prefix("problemName ") {
                    name = value.trim().to_string();
                }
                continue;
            }
            return Err(Error::Parse {
                line: line_no,
                message: "expected @-prefixed header before @data".into(),
            });
        }

        let colon = line.rfind(':').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "case line has no ':' label separator".into(),
        })?;
        let (body, label) = line.split_at(colon);
        let label = label[1..].trim();
        if label.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty class label".into(),
            });
        }
        if body.contains(':') {
            return Err(Error::Parse {
                line: line_no,
                message: "multivariate cases are not supported".into(),
            });
        }

        let mut values = Vec::new();
        for token in body.split(',') {
            let token = token.trim();
            if token == "?" || token.eq_ignore_ascii_case("nan") {
                return Err(Error::MissingValues { line: line_no });
            }
            let v: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("cannot parse value '{token}'"),
            })?;
            if v.is_nan() {
                return Err(Error::MissingValues { line: line_no });
            }
            values.push(v);
        }
        match expected_len {
            None => expected_len = Some(values.len()),
            Some(m) if values.len() != m => {
                return Err(Error::UnequalLength {
                    line: line_no,
                    expected: m,
                    found: values.len(),
                });
            }
            _ => {}
        }
        series.push(values);
        label_strings.push(label.to_string());
    }

    if series.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::from_parts(name, series, label_strings)
}

/// Redraw a stratified train/test split from the pooled cases.
///
/// `resample_id == 0` returns the original split unchanged. Otherwise the
/// pooled cases are grouped by class, each group is shuffled with a generator
/// seeded from `(seed, resample_id)`, and the first `original train count`
/// cases of each class form the new train set; the rest form the test set.
pub fn stratified_resample(
    train: &Dataset,
    test: &Dataset,
    resample_id: u64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if train.series_length() != test.series_length() {
        return Err(Error::IncompatibleDatasets(format!(
            "series lengths differ: {} vs {}",
            train.series_length(),
            test.series_length()
        )));
    }
    if train.class_names != test.class_names {
        return Err(Error::IncompatibleDatasets(
            "train and test class sets differ".into(),
        ));
    }
    if resample_id == 0 {
        return Ok((train.clone(), test.clone()));
    }

    // Pool in (train, test) order; indices >= train.n_cases() refer to test.
    let n_train = train.n_cases();
    let pooled_label = |i: usize| {
        if i < n_train {
            train.labels[i]
        } else {
            test.labels[i - n_train]
        }
    };
    let n_pool = n_train + test.n_cases();
    let train_counts = train.class_counts();

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); train.n_classes()];
    for i in 0..n_pool {
        by_class[pooled_label(i)].push(i);
    }

    let mut rng = seeding::rng(seed, stream::RESAMPLE, resample_id);
    let mut new_train = Vec::new();
    let mut new_test = Vec::new();
    for (class, group) in by_class.iter_mut().enumerate() {
        let required = train_counts[class];
        // A pool formed from (train, test) always covers the train counts;
        // this guards inconsistently constructed inputs.
        if group.len() < required {
            return Err(Error::StratificationImpossible {
                class: train.class_names[class].clone(),
                required,
                available: group.len(),
            });
        }
        group.shuffle(&mut rng);
        new_train.extend_from_slice(&group[..required]);
        new_test.extend_from_slice(&group[required..]);
    }

    let pick = |indices: &[usize]| {
        let series = indices
            .iter()
            .map(|&i| {
                if i < n_train {
                    train.series[i].clone()
                } else {
                    test.series[i - n_train].clone()
                }
            })
            .collect();
        let labels = indices.iter().map(|&i| pooled_label(i)).collect();
        Dataset {
            name: train.name.clone(),
            series,
            labels,
            class_names: train.class_names.clone(),
        }
    };
    Ok((pick(&new_train), pick(&new_test)))
}

/// Draw `ceil(proportion * n)` distinct cases without replacement.
///
/// Deterministic under `seed`; `proportion` must be in `(0, 1]`.
pub fn subsample_train(train: &Dataset, proportion: f64, seed: u64) -> Dataset {
    assert!(
        proportion > 0.0 && proportion <= 1.0,
        "proportion must be in (0, 1], got {proportion}"
    );
    let n = train.n_cases();
    let count = ((proportion * n as f64).ceil() as usize).min(n).max(1);
    let mut rng = seeding::rng(seed, stream::SUBSAMPLE, 0);
    // Partial Fisher-Yates: the first `count` slots are the sample.
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    indices.truncate(count);
    train.take(&indices, train.class_names.clone())
}
