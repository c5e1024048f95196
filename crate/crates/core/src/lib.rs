//! Multi-metaheuristic ensemble optimization.
//!
//! Seven population-based optimizers (PSO, PSOLévy, DE, BAT, BATLévy, cuckoo
//! search and flower pollination) run side by side. Every `frequency`
//! generations the master collects each optimizer's global best, fuses them
//! with a [`SchemeId`] into a team best and injects it back into every
//! optimizer.
//!
//! ```
//! use mmo_core::{run_mmo, BenchmarkKind, BenchmarkSpec, MmoConfig, SchemeId};
//!
//! let objective = BenchmarkSpec::new(BenchmarkKind::Zakharov, 5).unwrap();
//! let config = MmoConfig {
//!     agents: 20,
//!     generations: 200,
//!     scheme: SchemeId::BestRank,
//!     frequency: 10,
//!     ..MmoConfig::default()
//! };
//! let result = run_mmo(&config, &objective).unwrap();
//! assert!(result.best.fitness < 1e-2);
//! ```

pub mod benchmarks;
pub mod communication;
pub mod ensemble;
pub mod error;
pub mod levy;
pub mod objective;
pub mod optimizers;
pub mod parallel;
pub mod rng;
pub mod space;
pub mod stats;
pub mod svm;

pub use benchmarks::{BenchmarkKind, BenchmarkSpec};
pub use communication::{apply_scheme, SchemeId, TeamSnapshot};
pub use ensemble::{
    error_stats, run_ablation, run_cross_dimension, run_mmo, run_standalone, run_standalone_trials, run_trials,
    trial_seed, CrossDimensionRow, Ensemble, MmoConfig, MmoResult,
};
pub use error::{Error, Result};
pub use levy::{levy_sample, LevySampler};
pub use objective::{FnObjective, Objective};
pub use optimizers::{build, Optimizer, OptimizerKind, OptimizerParams};
pub use parallel::Execution;
pub use rng::RngStream;
pub use space::{clamp_to_bounds, uniform_random_solution, Bounds, EvaluatedSolution, SolutionVector};
pub use stats::ErrorStats;
