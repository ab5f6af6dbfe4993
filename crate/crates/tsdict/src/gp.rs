//! Gaussian process regression over encoded parameter vectors.
//!
//! TDE models the map from transform parameters to train accuracy with a GP
//! using a squared-exponential covariance on min-max scaled parameter
//! vectors. After a random warm-up, each new ensemble member uses the
//! remaining parameter combination with the highest predicted mean accuracy.
//!
//! Hyperparameters are fixed by default (`length_scale` 0.5 in the unit
//! cube, unit signal variance, noise variance 0.05), which keeps builds
//! deterministic; marginal-likelihood tuning over a small grid is available
//! via [`gp_fit_tuned`] but is not used by the ensemble builders.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{CandidateParams, ParamRecord};
use crate::sfa::Binning;
use crate::{Error, Result};

/// Iterations of uniform-random sampling before the GP takes over.
pub const GP_WARMUP: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpHyperparameters {
    pub length_scale: f64,
    pub signal_variance: f64,
    pub noise_variance: f64,
}

impl Default for GpHyperparameters {
    fn default() -> Self {
        Self {
            length_scale: 0.5,
            signal_variance: 1.0,
            noise_variance: 0.05,
        }
    }
}

/// Squared-exponential covariance on the squared Euclidean distance.
pub fn squared_exponential(a: &[f64], b: &[f64], hyper: &GpHyperparameters) -> f64 {
    let dist_sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    hyper.signal_variance * (-dist_sq / (2.0 * hyper.length_scale * hyper.length_scale)).exp()
}

/// A fitted GP posterior with a constant prior mean equal to the target mean.
#[derive(Debug, Clone)]
pub struct GpModel {
    inputs: Vec<Vec<f64>>,
    residuals: DVector<f64>,
    prior_mean: f64,
    hyper: GpHyperparameters,
    factor: Cholesky<f64, Dyn>,
    /// `(K + noise I)^-1 (y - prior_mean)`.
    weights: DVector<f64>,
}

/// Fit a GP to `(inputs, targets)` with the given hyperparameters.
///
/// Fails with [`Error::SingularKernel`] when two inputs coincide under zero
/// noise, or when the kernel matrix cannot be factorised even after a single
/// jitter retry.
pub fn gp_fit(
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    hyper: GpHyperparameters,
) -> Result<GpModel> {
    if inputs.is_empty() || inputs.len() != targets.len() {
        return Err(Error::InvalidParameters(
            "gp_fit needs matching, non-empty inputs and targets".into(),
        ));
    }
    let dim = inputs[0].len();
    if inputs.iter().any(|x| x.len() != dim) {
        return Err(Error::InvalidParameters(
            "gp inputs must share one dimension".into(),
        ));
    }
    if hyper.noise_variance == 0.0 {
        for i in 0..inputs.len() {
            for j in i + 1..inputs.len() {
                if inputs[i] == inputs[j] {
                    return Err(Error::SingularKernel);
                }
            }
        }
    }

    let n = inputs.len();
    let prior_mean = targets.iter().sum::<f64>() / n as f64;
    let residuals = DVector::from_iterator(n, targets.iter().map(|&y| y - prior_mean));
    let kernel = DMatrix::from_fn(n, n, |i, j| {
        let k = squared_exponential(&inputs[i], &inputs[j], &hyper);
        if i == j {
            k + hyper.noise_variance
        } else {
            k
        }
    });

    let factor = Cholesky::new(kernel.clone()).or_else(|| {
        let jittered = kernel + DMatrix::identity(n, n) * 1e-10;
        Cholesky::new(jittered)
    });
    let factor = factor.ok_or(Error::SingularKernel)?;
    let weights = factor.solve(&residuals);
    Ok(GpModel {
        inputs,
        residuals,
        prior_mean,
        hyper,
        factor,
        weights,
    })
}

/// Predictive mean and variance at a query point. The variance is clamped at
/// zero against round-off.
pub fn gp_predict(model: &GpModel, query: &[f64]) -> (f64, f64) {
    let k_star = DVector::from_iterator(
        model.inputs.len(),
        model
            .inputs
            .iter()
            .map(|x| squared_exponential(x, query, &model.hyper)),
    );
    let mean = model.prior_mean + k_star.dot(&model.weights);
    let solved = model.factor.solve(&k_star);
    let variance = model.hyper.signal_variance - k_star.dot(&solved);
    debug_assert!(variance >= -1e-8, "variance {variance} below round-off floor");
    (mean, variance.max(0.0))
}

impl GpModel {
    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    pub fn hyperparameters(&self) -> &GpHyperparameters {
        &self.hyper
    }

    /// Log marginal likelihood of the training targets under the model.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.residuals.len() as f64;
        let data_fit = -0.5 * self.residuals.dot(&self.weights);
        let log_det: f64 = self.factor.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
        data_fit - log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Fit with hyperparameters chosen by maximising the log marginal likelihood
/// over a small grid. Off by default everywhere; the ensemble builders use
/// the fixed defaults.
pub fn gp_fit_tuned(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<(GpModel, GpHyperparameters)> {
    let mut best: Option<(f64, GpHyperparameters)> = None;
    for &length_scale in &[0.25, 0.5, 1.0, 2.0] {
        for &noise_variance in &[0.01, 0.05, 0.2] {
            let hyper = GpHyperparameters {
                length_scale,
                signal_variance: 1.0,
                noise_variance,
            };
            let model = gp_fit(inputs.clone(), targets.clone(), hyper)?;
            let lml = model.log_marginal_likelihood();
            if best.map_or(true, |(b, _)| lml > b) {
                best = Some((lml, hyper));
            }
        }
    }
    let (_, hyper) = best.expect("grid is non-empty");
    Ok((gp_fit(inputs, targets, hyper)?, hyper))
}

/// Min-max scale a parameter tuple into the unit cube.
///
/// Order is `[word length, alphabet size, window length, normalise,
/// pyramid height, binning]`. Word length scales over `[8, 16]`, window
/// length over `[10, m]` (degenerate when `m <= 10`), pyramid height over
/// `[1, 3]`; the two booleans map to 0/1 and the fixed alphabet size to 0.
pub fn encode_params(candidate: &CandidateParams, series_length: usize) -> Result<[f64; 6]> {
    let l = candidate.word_length;
    if !(8..=16).contains(&l) || l % 2 != 0 {
        return Err(Error::EncodingError(format!("word length {l} out of range")));
    }
    let w = candidate.window_length;
    let w_max = series_length;
    let legal_w = if series_length < 10 {
        w == series_length
    } else {
        (10..=w_max).contains(&w)
    };
    if !legal_w {
        return Err(Error::EncodingError(format!(
            "window length {w} out of range for series length {series_length}"
        )));
    }
    let h = candidate.pyramid_height;
    if !(1..=3).contains(&h) {
        return Err(Error::EncodingError(format!("pyramid height {h} out of range")));
    }
    let w_scaled = if series_length <= 10 {
        0.0
    } else {
        (w - 10) as f64 / (series_length - 10) as f64
    };
    Ok([
        (l - 8) as f64 / 8.0,
        0.0,
        w_scaled,
        f64::from(candidate.normalise),
        (h - 1) as f64 / 2.0,
        match candidate.binning {
            Binning::Mcb => 0.0,
            Binning::Igb => 1.0,
        },
    ])
}

fn lexicographically_less(a: &[f64; 6], b: &[f64; 6]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Pick the next parameter combination to evaluate.
///
/// Before [`GP_WARMUP`] iterations this is a uniform draw from `remaining`
/// (consuming the generator); afterwards a GP is fitted to `history` and the
/// combination with the highest predicted mean accuracy is returned, ties
/// resolved by the lowest encoded vector in lexicographic order. Returns an
/// index into `remaining`; the caller removes the element.
pub fn choose_parameters(
    remaining: &[CandidateParams],
    history: &[ParamRecord],
    iteration: usize,
    series_length: usize,
    hyper: &GpHyperparameters,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    assert!(!remaining.is_empty(), "choose_parameters needs candidates");
    if iteration < GP_WARMUP {
        return Ok(rng.gen_range(0..remaining.len()));
    }

    let inputs = history
        .iter()
        .map(|r| encode_params(&r.candidate, series_length).map(|e| e.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let targets = history.iter().map(|r| r.accuracy).collect();
    let model = gp_fit(inputs, targets, *hyper)?;

    let mut best: Option<(usize, f64, [f64; 6])> = None;
    for (i, candidate) in remaining.iter().enumerate() {
        let encoded = encode_params(candidate, series_length)?;
        let (mean, _) = gp_predict(&model, &encoded);
        let better = match &best {
            None => true,
            Some((_, best_mean, best_encoded)) => {
                mean > *best_mean
                    || (mean == *best_mean && lexicographically_less(&encoded, best_encoded))
            }
        };
        if better {
            best = Some((i, mean, encoded));
        }
    }
    Ok(best.expect("remaining is non-empty").0)
}
