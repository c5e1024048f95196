use crate::ensemble::{run_mmo, MmoConfig};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::space::Bounds;
use crate::svm::dataset::{DataSplit, Dataset};
use crate::svm::model::{
    add_regularizer_gradient, add_row_subgradient, flat_loss, parameter_count, score_rows, LinearModel,
};

/// Half-width of the parameter box searched by [`mmo_train`].
pub const MMO_PARAMETER_BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmHyperparams {
    /// Regularization strength λ.
    pub lambda: f64,
    /// SGD step size α.
    pub learning_rate: f64,
    /// SGD epochs or MMO generations.
    pub iterations: u64,
}

impl Default for SvmHyperparams {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            learning_rate: 0.01,
            iterations: 1000,
        }
    }
}

impl SvmHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Parameter(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return Err(Error::Parameter(format!(
                "learning rate must be >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.iterations == 0 {
            return Err(Error::Parameter("iterations must be positive".into()));
        }
        Ok(())
    }
}

/// A trained model with its training-loss trajectory; `trajectory[0]` is
/// the loss before the first iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub model: LinearModel,
    pub trajectory: Vec<f64>,
}

impl Training {
    pub fn final_loss(&self) -> f64 {
        *self.trajectory.last().expect("trajectory always holds the initial loss")
    }
}

/// Per-row subgradient descent from the zero model.
///
/// Each epoch visits the training rows in a fresh random order and takes one
/// step of size α on `hinge_i + λ‖W‖²` per row. The full training loss is
/// recorded after every epoch.
pub fn sgd_train(split: &DataSplit, hp: &SvmHyperparams, seed: u64) -> Result<Training> {
    hp.validate()?;
    let train = &split.train;
    if train.is_empty() {
        return Err(Error::Config("training partition is empty".into()));
    }
    let classes = train.class_count();
    let d = train.dimension();
    let mut params = vec![0.0; parameter_count(classes, d)];
    let mut grad = vec![0.0; params.len()];
    let mut scores = vec![0.0; score_rows(classes)];
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut rng = RngStream::new(seed);
    let mut trajectory = Vec::with_capacity(hp.iterations as usize + 1);
    trajectory.push(flat_loss(&params, classes, train, hp.lambda));
    for _ in 0..hp.iterations {
        rng.shuffle(&mut order);
        for &i in &order {
            grad.iter_mut().for_each(|g| *g = 0.0);
            add_row_subgradient(&params, classes, train.row(i), train.labels()[i], 1.0, &mut scores, &mut grad);
            add_regularizer_gradient(&params, d, hp.lambda, &mut grad);
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= hp.learning_rate * g;
            }
        }
        trajectory.push(flat_loss(&params, classes, train, hp.lambda));
    }
    Ok(Training {
        model: LinearModel::unflatten(classes, d, &params)?,
        trajectory,
    })
}

/// The regularized hinge loss on a dataset as a black-box objective over
/// flat model parameters.
pub struct SvmObjective<'a> {
    data: &'a Dataset,
    lambda: f64,
    bounds: Bounds,
}

impl<'a> SvmObjective<'a> {
    pub fn new(data: &'a Dataset, lambda: f64, bound: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::Parameter(format!("lambda must be >= 0, got {lambda}")));
        }
        let n = parameter_count(data.class_count(), data.dimension());
        Ok(Self {
            data,
            lambda,
            bounds: Bounds::uniform(n, -bound, bound)?,
        })
    }
}

impl Objective for SvmObjective<'_> {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        flat_loss(x, self.data.class_count(), self.data, self.lambda)
    }

    fn name(&self) -> &str {
        "svm"
    }
}

/// Trains by running the ensemble on the training loss over the box
/// `[−10, 10]` per parameter. `config.generations` sets the iteration count;
/// the trajectory holds the archive-best loss after every generation.
pub fn mmo_train(split: &DataSplit, lambda: f64, config: &MmoConfig) -> Result<Training> {
    let train = &split.train;
    if train.is_empty() {
        return Err(Error::Config("training partition is empty".into()));
    }
    let objective = SvmObjective::new(train, lambda, MMO_PARAMETER_BOUND)?;
    let result = run_mmo(config, &objective)?;
    Ok(Training {
        model: LinearModel::unflatten(train.class_count(), train.dimension(), &result.best.position)?,
        trajectory: result.trajectory.iter().map(|&(_, f)| f).collect(),
    })
}
