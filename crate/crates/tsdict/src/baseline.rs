//! 1-NN Euclidean baseline used as a reference point in benchmarks.

use crate::dataset::Dataset;
use crate::{Error, Result};

/// Nearest neighbour on raw series under squared Euclidean distance,
/// ties broken by the lowest training index.
#[derive(Debug, Clone)]
pub struct EuclideanNearestNeighbour {
    train: Vec<Vec<f64>>,
    labels: Vec<usize>,
    n_classes: usize,
}

impl EuclideanNearestNeighbour {
    pub fn fit(train: &Dataset) -> Self {
        Self {
            train: train.all_series().to_vec(),
            labels: train.labels().to_vec(),
            n_classes: train.n_classes(),
        }
    }

    pub fn predict(&self, series: &[f64]) -> Result<usize> {
        let expected = self.train[0].len();
        if series.len() != expected {
            return Err(Error::SeriesLengthMismatch {
                expected,
                found: series.len(),
            });
        }
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, candidate) in self.train.iter().enumerate() {
            let dist: f64 = candidate
                .iter()
                .zip(series)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if dist < best_dist {
                best_dist = dist;
                best = i;
            }
        }
        Ok(self.labels[best])
    }

    /// One-hot distribution over classes for the predicted label.
    pub fn predict_distribution(&self, series: &[f64]) -> Result<(usize, Vec<f64>)> {
        let label = self.predict(series)?;
        let mut distribution = vec![0.0; self.n_classes];
        distribution[label] = 1.0;
        Ok((label, distribution))
    }
}
