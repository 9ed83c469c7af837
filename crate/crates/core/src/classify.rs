//! Class-weighted one-vs-all logistic regression with temporal smoothing.
//!
//! One binary logistic model per target class, trained by full-batch gradient
//! descent from zero initialisation — deterministic, no tuning loop. Class
//! imbalance and label noise are handled through per-instance weights
//! (inverse class frequency times window purity). Predictions are normalised
//! per-class sigmoid scores; sequences of predictions are cleaned up by soft
//! voting over a sliding neighbourhood.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureSchema, Standardizer};
use crate::preprocess::TargetClass;

// ---------------------------------------------------------------------------
// hyperparameters
// ---------------------------------------------------------------------------

/// Training settings. The optimiser is full-batch and zero-initialised, so
/// it draws no random numbers; `seed` is carried for config plumbing and
/// report provenance only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 0.1,
            epochs: 300,
            l2: 1e-3,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            problems.push(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.epochs == 0 {
            problems.push("epochs must be at least 1".to_string());
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            problems.push(format!("l2 must be non-negative, got {}", self.l2));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

// ---------------------------------------------------------------------------
// instance weighting
// ---------------------------------------------------------------------------

/// Class frequencies of one training set, under a fixed task class set.
#[derive(Debug, Clone)]
pub struct ClassCounts {
    counts: BTreeMap<TargetClass, usize>,
    total: usize,
    /// Number of classes in the task, whether or not all occur.
    k: usize,
}

impl ClassCounts {
    pub fn from_labels(labels: &[TargetClass], classes: &[TargetClass]) -> Result<ClassCounts> {
        if labels.is_empty() {
            return Err(Error::invalid("cannot count classes of an empty label set"));
        }
        if classes.is_empty() {
            return Err(Error::invalid("the task class set is empty"));
        }
        let mut counts = BTreeMap::new();
        for &label in labels {
            if !classes.contains(&label) {
                return Err(Error::invalid(format!(
                    "label {label} is outside the task class set"
                )));
            }
            *counts.entry(label).or_insert(0) += 1;
        }
        Ok(ClassCounts {
            counts,
            total: labels.len(),
            k: classes.len(),
        })
    }

    pub fn count(&self, class: TargetClass) -> usize {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

/// Weight of one training instance before mean-normalisation:
/// `purity × N / (K × count(target))`. Balanced classes at purity 1 give 1.
pub fn instance_weight(purity: f64, target: TargetClass, counts: &ClassCounts) -> Result<f64> {
    if !(purity > 0.0 && purity <= 1.0) {
        return Err(Error::invalid(format!(
            "purity must lie in (0, 1], got {purity}"
        )));
    }
    let count = counts.count(target);
    if count == 0 {
        return Err(Error::invalid(format!(
            "no training instance carries class {target}, cannot weight it"
        )));
    }
    Ok(purity * counts.total as f64 / (counts.k as f64 * count as f64))
}

/// Rescales weights so their mean is exactly 1.
pub fn normalize_weights(weights: &mut [f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::invalid("cannot normalize an empty weight vector"));
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::invalid(format!(
            "weights must have a positive finite mean, got {mean}"
        )));
    }
    for w in weights.iter_mut() {
        *w /= mean;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// binary trainer
// ---------------------------------------------------------------------------

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Weighted binary cross-entropy plus an L2 term on the weights (never the
/// bias): `(1/N) Σ wᵢ (softplus(zᵢ) − tᵢ zᵢ) + (l2/2) ‖w‖²`.
///
/// Exposed so external checks can compare [`binary_gradient`] against
/// numerical differentiation of this exact function.
pub fn binary_loss(
    x: &[Vec<f64>],
    targets: &[f64],
    inst_w: &[f64],
    w: &[f64],
    b: f64,
    l2: f64,
) -> f64 {
    let n = x.len() as f64;
    let data: f64 = x
        .iter()
        .zip(targets)
        .zip(inst_w)
        .map(|((xi, &ti), &wi)| {
            let z = dot(w, xi) + b;
            wi * (softplus(z) - ti * z)
        })
        .sum::<f64>()
        / n;
    data + 0.5 * l2 * dot(w, w)
}

/// Analytic gradient of [`binary_loss`] in (weights, bias).
pub fn binary_gradient(
    x: &[Vec<f64>],
    targets: &[f64],
    inst_w: &[f64],
    w: &[f64],
    b: f64,
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut dw = vec![0.0; w.len()];
    let mut db = 0.0;
    for ((xi, &ti), &wi) in x.iter().zip(targets).zip(inst_w) {
        let z = dot(w, xi) + b;
        let r = wi * (sigmoid(z) - ti);
        for (d, &xij) in dw.iter_mut().zip(xi) {
            *d += r * xij;
        }
        db += r;
    }
    for (d, &wj) in dw.iter_mut().zip(w) {
        *d = *d / n + l2 * wj;
    }
    (dw, db / n)
}

/// Full-batch gradient descent from zero. If the loss ever rises, the
/// learning rate is halved for the remaining epochs.
fn fit_binary(
    x: &[Vec<f64>],
    targets: &[f64],
    inst_w: &[f64],
    hp: &Hyperparams,
    tag: &str,
) -> (Vec<f64>, f64) {
    let dim = x[0].len();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut lr = hp.learning_rate;
    let mut prev = binary_loss(x, targets, inst_w, &w, b, hp.l2);
    for epoch in 0..hp.epochs {
        let (dw, db) = binary_gradient(x, targets, inst_w, &w, b, hp.l2);
        for (wj, dj) in w.iter_mut().zip(&dw) {
            *wj -= lr * dj;
        }
        b -= lr * db;
        let cur = binary_loss(x, targets, inst_w, &w, b, hp.l2);
        if cur > prev {
            lr *= 0.5;
            log::debug!(
                "{tag}: loss rose at epoch {epoch} ({prev:.6e} -> {cur:.6e}), \
                 learning rate halved to {lr}"
            );
        }
        prev = cur;
    }
    (w, b)
}

// ---------------------------------------------------------------------------
// the one-vs-all model
// ---------------------------------------------------------------------------

pub const MODEL_VERSION: u32 = 1;

/// A trained one-vs-all model: per-class weights and bias, the class list
/// they index, the feature schema they expect, and the standardiser fitted
/// on the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvaModel {
    pub version: u32,
    pub classes: Vec<TargetClass>,
    pub schema: FeatureSchema,
    pub standardizer: Standardizer,
    /// One weight vector per class, in `classes` order.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub hyperparams: Hyperparams,
}

/// Trains one binary model per class. `y` entries must come from `classes`;
/// classes absent from `y` still get a (all-negative) binary model so the
/// prediction vector always covers the full task class set. The standardiser
/// is fitted on `x` here — callers pass training rows only.
pub fn train(
    x: &[Vec<f64>],
    y: &[TargetClass],
    inst_w: &[f64],
    classes: &[TargetClass],
    schema: &FeatureSchema,
    hp: &Hyperparams,
) -> Result<OvaModel> {
    hp.validate()?;
    if x.len() < 2 {
        return Err(Error::invalid(format!(
            "training needs at least 2 instances, got {}",
            x.len()
        )));
    }
    if x.len() != y.len() || x.len() != inst_w.len() {
        return Err(Error::invalid(format!(
            "training inputs disagree: {} rows, {} labels, {} weights",
            x.len(),
            y.len(),
            inst_w.len()
        )));
    }
    if classes.len() < 2 {
        return Err(Error::invalid("a task needs at least 2 classes"));
    }
    let dim = schema.len();
    if dim == 0 {
        return Err(Error::invalid("the feature schema is empty"));
    }
    if let Some(row) = x.iter().find(|r| r.len() != dim) {
        return Err(Error::invalid(format!(
            "feature row has {} values but the schema names {dim} columns",
            row.len()
        )));
    }
    if let Some(&label) = y.iter().find(|l| !classes.contains(l)) {
        return Err(Error::invalid(format!(
            "label {label} is outside the task class set"
        )));
    }
    let distinct: std::collections::BTreeSet<TargetClass> = y.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(Error::invalid(
            "training labels cover a single class; need at least 2",
        ));
    }
    if let Some(&w) = inst_w.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::invalid(format!(
            "instance weights must be finite and non-negative, got {w}"
        )));
    }

    let standardizer = Standardizer::fit(x)?;
    let z: Vec<Vec<f64>> = x
        .iter()
        .map(|row| standardizer.apply(row))
        .collect::<Result<_>>()?;

    let fitted: Vec<(Vec<f64>, f64)> = classes
        .par_iter()
        .map(|&class| {
            let targets: Vec<f64> = y
                .iter()
                .map(|&l| if l == class { 1.0 } else { 0.0 })
                .collect();
            fit_binary(&z, &targets, inst_w, hp, class.token())
        })
        .collect();

    let (weights, biases) = fitted.into_iter().unzip();
    Ok(OvaModel {
        version: MODEL_VERSION,
        classes: classes.to_vec(),
        schema: schema.clone(),
        standardizer,
        weights,
        biases,
        hyperparams: *hp,
    })
}

impl OvaModel {
    /// Normalised per-class probabilities for one raw (unstandardised)
    /// feature row. A degenerate all-zero score vector falls back to the
    /// uniform distribution.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.schema.len() {
            return Err(Error::invalid(format!(
                "feature row has {} values but the model expects {}",
                x.len(),
                self.schema.len()
            )));
        }
        let z = self.standardizer.apply(x)?;
        let scores: Vec<f64> = self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, &b)| sigmoid(dot(w, &z) + b))
            .collect();
        let sum: f64 = scores.iter().sum();
        if sum <= 0.0 {
            let k = scores.len() as f64;
            return Ok(vec![1.0 / k; scores.len()]);
        }
        Ok(scores.into_iter().map(|s| s / sum).collect())
    }

    /// Hard prediction: class of the highest probability, ties to the
    /// lowest class index.
    pub fn predict(&self, x: &[f64]) -> Result<TargetClass> {
        let probas = self.predict_proba(x)?;
        Ok(self.classes[argmax(&probas)])
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::config(format!("cannot serialize model: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<OvaModel> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let model: OvaModel = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if model.version != MODEL_VERSION {
            return Err(Error::config(format!(
                "model file {} has version {}, this build reads version {MODEL_VERSION}",
                path.display(),
                model.version
            )));
        }
        if model.weights.len() != model.classes.len()
            || model.biases.len() != model.classes.len()
            || model.weights.iter().any(|w| w.len() != model.schema.len())
        {
            return Err(Error::config(format!(
                "model file {} is internally inconsistent",
                path.display()
            )));
        }
        Ok(model)
    }
}

// ---------------------------------------------------------------------------
// temporal smoothing
// ---------------------------------------------------------------------------

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Soft voting over a sliding neighbourhood: the label at `t` is the argmax
/// of the mean probability vector over `[t − radius, t + radius]`, truncated
/// at the stream edges. Streams from different agents or pairs must be
/// smoothed separately.
pub fn smooth_predictions(probas: &[Vec<f64>], radius: usize) -> Result<Vec<usize>> {
    let Some(first) = probas.first() else {
        return Ok(Vec::new());
    };
    let k = first.len();
    if k == 0 {
        return Err(Error::invalid("probability vectors are empty"));
    }
    if probas.iter().any(|p| p.len() != k) {
        return Err(Error::invalid(
            "probability vectors in one stream differ in length",
        ));
    }
    let mut out = Vec::with_capacity(probas.len());
    for t in 0..probas.len() {
        let lo = t.saturating_sub(radius);
        let hi = (t + radius + 1).min(probas.len());
        let mut acc = vec![0.0; k];
        for p in &probas[lo..hi] {
            for (a, &v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
        // argmax is scale-free, dividing by the neighbourhood size is not needed
        out.push(argmax(&acc));
    }
    Ok(out)
}
