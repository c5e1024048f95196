//! Linear SVM training with SGD or with the ensemble optimizer.

mod dataset;
mod model;
mod train;

pub use dataset::{
    load_dataset, parse_dataset, split_dataset, split_sizes, DataSplit, Dataset, DatasetFormat, Normalization,
    IS_CLASSES,
};
pub use model::{accuracy, hinge_clearance, parameter_count, svm_loss, svm_subgradient, LinearModel};
pub use train::{mmo_train, sgd_train, SvmHyperparams, SvmObjective, Training, MMO_PARAMETER_BOUND};
