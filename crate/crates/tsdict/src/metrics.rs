//! Classification metrics computed from predicted class distributions.

/// Metrics for one evaluated test split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    /// Mean per-class recall over classes present in the truth.
    pub balanced_accuracy: f64,
    /// Macro-averaged F1 over classes present in the truth.
    pub f1: f64,
    /// One-vs-rest AUROC (trapezoidal) averaged over classes with both
    /// positive and negative cases.
    pub auroc: f64,
}

/// Predicted label of one distribution: argmax, ties to the lowest class id.
pub fn argmax_label(distribution: &[f64]) -> usize {
    let mut best = 0;
    for (c, &p) in distribution.iter().enumerate() {
        if p > distribution[best] {
            best = c;
        }
    }
    best
}

/// Compute accuracy, balanced accuracy, macro-F1 and mean one-vs-rest AUROC.
///
/// Classes absent from `truth` contribute no recall/F1/AUROC terms (a
/// warning is logged); a class without negatives is likewise skipped for
/// AUROC.
pub fn compute_metrics(truth: &[usize], distributions: &[Vec<f64>], n_classes: usize) -> Metrics {
    assert_eq!(truth.len(), distributions.len(), "misaligned predictions");
    assert!(!truth.is_empty(), "no cases to score");
    let n = truth.len();
    let predicted: Vec<usize> = distributions.iter().map(|d| argmax_label(d)).collect();

    let correct = truth
        .iter()
        .zip(&predicted)
        .filter(|(t, p)| t == p)
        .count();
    let accuracy = correct as f64 / n as f64;

    // Confusion counts.
    let mut true_pos = vec![0usize; n_classes];
    let mut false_pos = vec![0usize; n_classes];
    let mut false_neg = vec![0usize; n_classes];
    let mut support = vec![0usize; n_classes];
    for (&t, &p) in truth.iter().zip(&predicted) {
        support[t] += 1;
        if t == p {
            true_pos[t] += 1;
        } else {
            false_pos[p] += 1;
            false_neg[t] += 1;
        }
    }

    let mut recall_sum = 0.0;
    let mut f1_sum = 0.0;
    let mut present = 0usize;
    for c in 0..n_classes {
        if support[c] == 0 {
            log::warn!("class {c} absent from truth; skipping its recall/F1/AUROC terms");
            continue;
        }
        present += 1;
        let recall = true_pos[c] as f64 / support[c] as f64;
        recall_sum += recall;
        let denom_p = true_pos[c] + false_pos[c];
        let precision = if denom_p == 0 {
            0.0
        } else {
            true_pos[c] as f64 / denom_p as f64
        };
        f1_sum += if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
    }
    let balanced_accuracy = recall_sum / present as f64;
    let f1 = f1_sum / present as f64;

    let mut auroc_sum = 0.0;
    let mut auroc_terms = 0usize;
    for c in 0..n_classes {
        if support[c] == 0 || support[c] == n {
            continue;
        }
        let scores: Vec<f64> = distributions.iter().map(|d| d[c]).collect();
        let positives: Vec<bool> = truth.iter().map(|&t| t == c).collect();
        auroc_sum += binary_auroc(&scores, &positives);
        auroc_terms += 1;
    }
    let auroc = if auroc_terms > 0 {
        auroc_sum / auroc_terms as f64
    } else {
        log::warn!("no class has both positive and negative cases; AUROC undefined");
        f64::NAN
    };

    Metrics {
        accuracy,
        balanced_accuracy,
        f1,
        auroc,
    }
}

/// Trapezoidal ROC area with tied scores handled as one group.
fn binary_auroc(scores: &[f64], positives: &[bool]) -> f64 {
    let p = positives.iter().filter(|&&x| x).count() as f64;
    let n = positives.len() as f64 - p;
    debug_assert!(p > 0.0 && n > 0.0);
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut area = 0.0;
    let mut tp = 0.0;
    let mut fp = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut tp_step = 0.0;
        let mut fp_step = 0.0;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if positives[order[j]] {
                tp_step += 1.0;
            } else {
                fp_step += 1.0;
            }
            j += 1;
        }
        // Trapezoid over the tied block.
        area += (fp_step / n) * (tp + tp_step / 2.0) / p;
        tp += tp_step;
        fp += fp_step;
        i = j;
    }
    let _ = fp;
    area
}
