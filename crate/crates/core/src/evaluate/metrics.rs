//! Confusion matrices and macro F-scores over class indices.
//!
//! Everything here works on `usize` class indices into a caller-held class
//! list; `k` is that list's length. Classes without a single true or
//! predicted instance score zero rather than poisoning the mean with NaN.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Precision, recall and F1 of one class, plus its test support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// `k × k` confusion matrix; rows are truth, columns are prediction.
pub fn confusion(y_true: &[usize], y_pred: &[usize], k: usize) -> Result<Vec<Vec<usize>>> {
    if y_true.is_empty() {
        return Err(Error::invalid("cannot score an empty prediction set"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "{} labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if k == 0 {
        return Err(Error::invalid("class set is empty"));
    }
    let mut m = vec![vec![0usize; k]; k];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= k || p >= k {
            return Err(Error::invalid(format!(
                "class index out of range: truth {t}, prediction {p}, {k} classes"
            )));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Per-class precision/recall/F1 from a confusion matrix.
pub fn per_class_scores(conf: &[Vec<usize>]) -> Vec<ClassScores> {
    let k = conf.len();
    (0..k)
        .map(|c| {
            let tp = conf[c][c];
            let support: usize = conf[c].iter().sum();
            let predicted: usize = conf.iter().map(|row| row[c]).sum();
            let precision = if predicted > 0 {
                tp as f64 / predicted as f64
            } else {
                0.0
            };
            let recall = if support > 0 {
                tp as f64 / support as f64
            } else {
                0.0
            };
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassScores {
                precision,
                recall,
                f1,
                support,
            }
        })
        .collect()
}

/// Unweighted mean F1 over all `k` classes, absent classes scoring zero.
pub fn macro_f(y_true: &[usize], y_pred: &[usize], k: usize) -> Result<f64> {
    let conf = confusion(y_true, y_pred, k)?;
    let scores = per_class_scores(&conf);
    Ok(scores.iter().map(|s| s.f1).sum::<f64>() / k as f64)
}
