//! Classifier comparison statistics: Wilcoxon signed-rank tests, Holm
//! correction, mean ranks and cliques.
//!
//! The Wilcoxon test drops zero differences, averages tied ranks, uses the
//! exact sign-assignment distribution up to 20 non-zero differences and a
//! tie-corrected normal approximation (with continuity correction) above.
//! Cliques are maximal groups of classifiers, contiguous in mean-rank order,
//! in which no pair differs significantly after Holm correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::{Error, Result};

/// Two-sided Wilcoxon signed-rank p-value for paired scores.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameters(format!(
            "paired scores must have equal lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let differences: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = differences.len();
    if n == 0 {
        return Ok(1.0);
    }

    // Rank absolute differences, averaging ties. Doubled ranks stay integral.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| differences[i].abs().total_cmp(&differences[j].abs()));
    let mut doubled_ranks = vec![0u64; n];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && differences[order[j]].abs() == differences[order[i]].abs() {
            j += 1;
        }
        // Ranks i+1 ..= j averaged; doubled average = i + j + 1.
        let doubled = (i + j + 1) as u64;
        for k in i..j {
            doubled_ranks[order[k]] = doubled;
        }
        tie_sizes.push(j - i);
        i = j;
    }

    let doubled_total: u64 = doubled_ranks.iter().sum();
    let doubled_w_plus: u64 = differences
        .iter()
        .zip(&doubled_ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, &r)| r)
        .sum();
    let doubled_w_min = doubled_w_plus.min(doubled_total - doubled_w_plus);

    let p = if n <= 20 {
        exact_two_sided(&doubled_ranks, doubled_w_min)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_correction: f64 = tie_sizes
            .iter()
            .map(|&t| {
                let t = t as f64;
                (t * t * t - t) / 48.0
            })
            .sum();
        let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_correction;
        let w = doubled_w_min as f64 / 2.0;
        let z = (w - mean + 0.5) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        2.0 * normal.cdf(z)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Exact two-sided p-value: subset-sum counting over the doubled ranks.
fn exact_two_sided(doubled_ranks: &[u64], doubled_w_min: u64) -> f64 {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    for &r in doubled_ranks {
        for s in (r as usize..counts.len()).rev() {
            counts[s] += counts[s - r as usize];
        }
    }
    let at_most: u64 = counts[..=doubled_w_min as usize].iter().sum();
    let assignments = (1u64) << doubled_ranks.len();
    2.0 * at_most as f64 / assignments as f64
}

/// Holm step-down adjustment. Returns adjusted p-values in input order,
/// monotone non-decreasing along the sorted raw order and capped at 1.
pub fn holm_adjust(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]));
    let mut adjusted = vec![0.0; m];
    let mut running_max = 0.0f64;
    for (rank, &idx) in order.iter().enumerate() {
        let scaled = ((m - rank) as f64) * p_values[idx];
        running_max = running_max.max(scaled);
        adjusted[idx] = running_max.min(1.0);
    }
    adjusted
}

/// Scores arranged datasets x classifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    pub classifiers: Vec<String>,
    pub datasets: Vec<String>,
    /// `scores[dataset][classifier]`.
    pub scores: Vec<Vec<f64>>,
}

/// Per-row ranks (rank 1 = highest score, ties averaged).
fn row_ranks(row: &[f64]) -> Vec<f64> {
    let k = row.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| row[j].total_cmp(&row[i]));
    let mut ranks = vec![0.0; k];
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j < k && row[order[j]] == row[order[i]] {
            j += 1;
        }
        let average = (i + j + 1) as f64 / 2.0;
        for t in i..j {
            ranks[order[t]] = average;
        }
        i = j;
    }
    ranks
}

/// Mean rank per classifier over all datasets.
pub fn mean_ranks(matrix: &ScoreMatrix) -> Vec<f64> {
    let k = matrix.classifiers.len();
    let mut sums = vec![0.0; k];
    for row in &matrix.scores {
        for (c, rank) in row_ranks(row).into_iter().enumerate() {
            sums[c] += rank;
        }
    }
    sums.iter().map(|s| s / matrix.datasets.len() as f64).collect()
}

/// A pairwise comparison with its raw and Holm-adjusted p-value.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseComparison {
    pub first: String,
    pub second: String,
    pub p_raw: f64,
    pub p_holm: f64,
}

/// Mean ranks, pairwise tests and cliques for a score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    /// `(classifier, mean rank)` sorted best (lowest rank) first.
    pub mean_ranks: Vec<(String, f64)>,
    pub pairwise: Vec<PairwiseComparison>,
    /// Classifier names per clique, in mean-rank order.
    pub cliques: Vec<Vec<String>>,
    pub alpha: f64,
}

impl RankReport {
    /// Machine-parseable text: one `rank`, `p` or `clique` record per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("alpha {}\n", self.alpha));
        for (name, rank) in &self.mean_ranks {
            out.push_str(&format!("rank {rank:.4} {name}\n"));
        }
        for c in &self.pairwise {
            out.push_str(&format!(
                "p {} {} {:.6} {:.6}\n",
                c.first, c.second, c.p_raw, c.p_holm
            ));
        }
        for clique in &self.cliques {
            out.push_str(&format!("clique {}\n", clique.join(" ")));
        }
        out
    }
}

/// Rank all classifiers, run all pairwise Wilcoxon tests with Holm
/// correction at family level `alpha`, and form cliques.
pub fn mean_ranks_and_cliques(matrix: &ScoreMatrix, alpha: f64) -> Result<RankReport> {
    let k = matrix.classifiers.len();
    if k == 0 || matrix.datasets.is_empty() {
        return Err(Error::InvalidParameters("empty score matrix".into()));
    }
    for row in &matrix.scores {
        if row.len() != k {
            return Err(Error::IncompleteMatrix {
                missing: vec!["ragged score matrix".into()],
            });
        }
    }

    let means = mean_ranks(matrix);
    // Best first; ties by name so the ordering is reproducible.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        means[i]
            .total_cmp(&means[j])
            .then_with(|| matrix.classifiers[i].cmp(&matrix.classifiers[j]))
    });

    // Pairwise tests over the ordered classifiers.
    let mut raw = Vec::new();
    let mut pairs = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let (ia, ib) = (order[a], order[b]);
            let col = |c: usize| -> Vec<f64> {
                matrix.scores.iter().map(|row| row[c]).collect()
            };
            raw.push(wilcoxon_signed_rank(&col(ia), &col(ib))?);
            pairs.push((a, b));
        }
    }
    let adjusted = holm_adjust(&raw);
    let mut significant = vec![vec![false; k]; k];
    let mut pairwise = Vec::new();
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        let sig = adjusted[idx] < alpha;
        significant[a][b] = sig;
        significant[b][a] = sig;
        pairwise.push(PairwiseComparison {
            first: matrix.classifiers[order[a]].clone(),
            second: matrix.classifiers[order[b]].clone(),
            p_raw: raw[idx],
            p_holm: adjusted[idx],
        });
    }

    // Maximal runs, contiguous in rank order, with no internal difference.
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    for start in 0..k {
        let mut end = start;
        'grow: for next in start + 1..k {
            for inside in start..next {
                if significant[inside][next] {
                    break 'grow;
                }
            }
            end = next;
        }
        intervals.push((start, end));
    }
    intervals.dedup();
    let maximal: Vec<(usize, usize)> = intervals
        .iter()
        .filter(|&&(s, e)| {
            !intervals
                .iter()
                .any(|&(s2, e2)| (s2, e2) != (s, e) && s2 <= s && e <= e2)
        })
        .copied()
        .collect();
    let cliques = maximal
        .into_iter()
        .map(|(s, e)| {
            (s..=e)
                .map(|i| matrix.classifiers[order[i]].clone())
                .collect()
        })
        .collect();

    Ok(RankReport {
        mean_ranks: order
            .iter()
            .map(|&i| (matrix.classifiers[i].clone(), means[i]))
            .collect(),
        pairwise,
        cliques,
        alpha,
    })
}
