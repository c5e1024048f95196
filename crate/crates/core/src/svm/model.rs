use crate::error::{Error, Result};
use crate::svm::dataset::Dataset;

/// A linear classifier.
///
/// Two-class problems use a single score `w·x + b` (positive means class 1);
/// problems with more classes keep one weight row and bias per class and
/// predict the arg-max score. Parameters are stored flat, one block of
/// `dimension + 1` values (weights then bias) per score row.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    dimension: usize,
    classes: usize,
    params: Vec<f64>,
}

impl LinearModel {
    /// The all-zero model for `classes` classes over `dimension` features.
    pub fn zeros(classes: usize, dimension: usize) -> Result<Self> {
        if classes < 2 {
            return Err(Error::Parameter(format!("a classifier needs at least two classes, got {classes}")));
        }
        Ok(Self {
            dimension,
            classes,
            params: vec![0.0; parameter_count(classes, dimension)],
        })
    }

    /// Zero model shaped for `data`.
    pub fn zeros_for(data: &Dataset) -> Result<Self> {
        Self::zeros(data.class_count(), data.dimension())
    }

    /// Two-class model from weights and bias.
    pub fn binary(weights: Vec<f64>, bias: f64) -> Result<Self> {
        let dimension = weights.len();
        let mut params = weights;
        params.push(bias);
        Self::unflatten(2, dimension, &params)
    }

    /// Rebuilds a model from [`LinearModel::flatten`] output.
    pub fn unflatten(classes: usize, dimension: usize, params: &[f64]) -> Result<Self> {
        let mut model = Self::zeros(classes, dimension)?;
        if params.len() != model.params.len() {
            return Err(Error::DimensionMismatch {
                expected: model.params.len(),
                found: params.len(),
            });
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("model parameters must be finite".into()));
        }
        model.params.copy_from_slice(params);
        Ok(model)
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.params.clone()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    pub fn is_binary(&self) -> bool {
        self.classes == 2
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    /// Number of score rows: 1 for two classes, otherwise one per class.
    pub fn score_rows(&self) -> usize {
        score_rows(self.classes)
    }

    pub fn weights(&self, row: usize) -> &[f64] {
        let stride = self.dimension + 1;
        &self.params[row * stride..row * stride + self.dimension]
    }

    pub fn bias(&self, row: usize) -> f64 {
        self.params[row * (self.dimension + 1) + self.dimension]
    }

    pub fn negated(&self) -> Self {
        Self {
            params: self.params.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }

    /// Predicted class of feature vector `x`.
    pub fn predict(&self, x: &[f64]) -> usize {
        predict_flat(&self.params, self.classes, x)
    }

    fn check(&self, data: &Dataset) -> Result<()> {
        if data.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: data.dimension(),
            });
        }
        if data.class_count() != self.classes {
            return Err(Error::Config(format!(
                "model has {} classes but the dataset has {}",
                self.classes,
                data.class_count()
            )));
        }
        Ok(())
    }
}

pub(crate) fn score_rows(classes: usize) -> usize {
    if classes == 2 {
        1
    } else {
        classes
    }
}

/// Length of the flat parameter vector for a model of this shape.
pub fn parameter_count(classes: usize, dimension: usize) -> usize {
    score_rows(classes) * (dimension + 1)
}

#[inline]
fn score(block: &[f64], x: &[f64]) -> f64 {
    let (w, b) = block.split_at(x.len());
    w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + b[0]
}

fn predict_flat(params: &[f64], classes: usize, x: &[f64]) -> usize {
    let stride = x.len() + 1;
    if classes == 2 {
        usize::from(score(params, x) > 0.0)
    } else {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, block) in params.chunks_exact(stride).enumerate() {
            let s = score(block, x);
            if s > best_score {
                best = c;
                best_score = s;
            }
        }
        best
    }
}

fn regularizer(params: &[f64], dimension: usize) -> f64 {
    params
        .chunks_exact(dimension + 1)
        .map(|block| block[..dimension].iter().map(|w| w * w).sum::<f64>())
        .sum()
}

/// Hinge loss of one row.
pub(crate) fn row_hinge(params: &[f64], classes: usize, x: &[f64], label: usize, scores: &mut [f64]) -> f64 {
    let stride = x.len() + 1;
    if classes == 2 {
        let y = if label == 1 { 1.0 } else { -1.0 };
        (1.0 - y * score(params, x)).max(0.0)
    } else {
        for (s, block) in scores.iter_mut().zip(params.chunks_exact(stride)) {
            *s = score(block, x);
        }
        let sy = scores[label];
        scores
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != label)
            .map(|(_, &sc)| (1.0 - (sy - sc)).max(0.0))
            .sum()
    }
}

/// Loss of a flat parameter vector; the caller guarantees matching shapes.
pub(crate) fn flat_loss(params: &[f64], classes: usize, data: &Dataset, lambda: f64) -> f64 {
    let mut scores = vec![0.0; score_rows(classes)];
    let labels = data.labels();
    let hinge: f64 = data
        .rows()
        .zip(labels)
        .map(|(x, &y)| row_hinge(params, classes, x, y, &mut scores))
        .sum();
    let mean = if data.is_empty() { 0.0 } else { hinge / data.len() as f64 };
    mean + lambda * regularizer(params, data.dimension())
}

/// Regularized hinge loss.
///
/// Two classes: mean of `max(0, 1 − y(w·x + b))` with `y = ±1`, plus
/// `λ‖w‖²`. More classes: mean over rows of `Σ_{c≠y} max(0, 1 − (s_y − s_c))`
/// plus `λ Σ_c ‖W_c‖²`. Biases are not regularized.
pub fn svm_loss(model: &LinearModel, data: &Dataset, lambda: f64) -> Result<f64> {
    model.check(data)?;
    Ok(flat_loss(&model.params, model.classes, data, lambda))
}

/// Percentage of rows whose predicted class equals the label.
pub fn accuracy(model: &LinearModel, data: &Dataset) -> Result<f64> {
    model.check(data)?;
    if data.is_empty() {
        return Ok(0.0);
    }
    let correct = data
        .rows()
        .zip(data.labels())
        .filter(|(x, &y)| model.predict(x) == y)
        .count();
    Ok(100.0 * correct as f64 / data.len() as f64)
}

/// Adds `scale` times the subgradient of one row's hinge term to `grad`.
pub(crate) fn add_row_subgradient(
    params: &[f64],
    classes: usize,
    x: &[f64],
    label: usize,
    scale: f64,
    scores: &mut [f64],
    grad: &mut [f64],
) {
    let stride = x.len() + 1;
    let mut axpy = |row: usize, a: f64| {
        let block = &mut grad[row * stride..(row + 1) * stride];
        for (g, xi) in block.iter_mut().zip(x) {
            *g += a * xi;
        }
        block[x.len()] += a;
    };
    if classes == 2 {
        let y = if label == 1 { 1.0 } else { -1.0 };
        if 1.0 - y * score(params, x) > 0.0 {
            axpy(0, -y * scale);
        }
    } else {
        for (s, block) in scores.iter_mut().zip(params.chunks_exact(stride)) {
            *s = score(block, x);
        }
        let sy = scores[label];
        let mut active = 0usize;
        for (c, &sc) in scores.iter().enumerate() {
            if c != label && 1.0 - (sy - sc) > 0.0 {
                axpy(c, scale);
                active += 1;
            }
        }
        if active > 0 {
            axpy(label, -scale * active as f64);
        }
    }
}

/// Adds the gradient of `λ Σ ‖W_c‖²` to `grad`.
pub(crate) fn add_regularizer_gradient(params: &[f64], dimension: usize, lambda: f64, grad: &mut [f64]) {
    if lambda == 0.0 {
        return;
    }
    for (gb, pb) in grad.chunks_exact_mut(dimension + 1).zip(params.chunks_exact(dimension + 1)) {
        for (g, w) in gb[..dimension].iter_mut().zip(&pb[..dimension]) {
            *g += 2.0 * lambda * w;
        }
    }
}

/// Subgradient of [`svm_loss`] with respect to the flat parameters.
///
/// Hinge terms exactly at the kink contribute zero.
pub fn svm_subgradient(model: &LinearModel, data: &Dataset, lambda: f64) -> Result<Vec<f64>> {
    model.check(data)?;
    let mut grad = vec![0.0; model.params.len()];
    let mut scores = vec![0.0; model.score_rows()];
    if !data.is_empty() {
        let scale = 1.0 / data.len() as f64;
        for (x, &y) in data.rows().zip(data.labels()) {
            add_row_subgradient(&model.params, model.classes, x, y, scale, &mut scores, &mut grad);
        }
    }
    add_regularizer_gradient(&model.params, model.dimension, lambda, &mut grad);
    Ok(grad)
}

/// Smallest `|1 − margin|` over every hinge term of `data`; the loss is
/// differentiable at `model` when this is positive.
pub fn hinge_clearance(model: &LinearModel, data: &Dataset) -> Result<f64> {
    model.check(data)?;
    let mut scores = vec![0.0; model.score_rows()];
    let mut clearance = f64::INFINITY;
    let stride = model.dimension + 1;
    for (x, &label) in data.rows().zip(data.labels()) {
        if model.is_binary() {
            let y = if label == 1 { 1.0 } else { -1.0 };
            clearance = clearance.min((1.0 - y * score(&model.params, x)).abs());
        } else {
            for (s, block) in scores.iter_mut().zip(model.params.chunks_exact(stride)) {
                *s = score(block, x);
            }
            for c in (0..model.classes).filter(|&c| c != label) {
                clearance = clearance.min((1.0 - (scores[label] - scores[c])).abs());
            }
        }
    }
    Ok(clearance)
}
