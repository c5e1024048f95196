//! The seven constituent metaheuristics behind one stepping interface.
//!
//! Objective evaluations per [`Optimizer::step`]:
//!
//! | optimizer      | evaluations per step   |
//! |----------------|------------------------|
//! | PSO, PSOLévy   | `n`                    |
//! | DE             | `n`                    |
//! | BAT, BATLévy   | `n`                    |
//! | CS             | `n + ⌊p_a·n⌋`          |
//! | FP             | `n`                    |
//!
//! Construction evaluates the `n` initial agents once.

mod bat;
mod cuckoo;
mod de;
mod flower;
mod pso;

use std::fmt;
use std::str::FromStr;

pub use bat::{BatParams, BatState};
pub use cuckoo::{CuckooParams, CuckooState};
pub use de::{DeParams, DeState};
pub use flower::{FlowerParams, FlowerState};
pub use pso::{PsoParams, PsoState};

use crate::error::{Error, Result};
use crate::objective::{sanitize, Objective};
use crate::rng::RngStream;
use crate::space::{random_point, EvaluatedSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OptimizerKind {
    Pso,
    PsoLevy,
    De,
    Bat,
    BatLevy,
    Cs,
    Fp,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 7] = [
        Self::Pso,
        Self::PsoLevy,
        Self::De,
        Self::Bat,
        Self::BatLevy,
        Self::Cs,
        Self::Fp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pso => "pso",
            Self::PsoLevy => "psolevy",
            Self::De => "de",
            Self::Bat => "bat",
            Self::BatLevy => "batlevy",
            Self::Cs => "cs",
            Self::Fp => "fp",
        }
    }

    /// Stable index used to derive the optimizer's random sub-stream.
    pub fn index(self) -> u64 {
        match self {
            Self::Pso => 0,
            Self::PsoLevy => 1,
            Self::De => 2,
            Self::Bat => 3,
            Self::BatLevy => 4,
            Self::Cs => 5,
            Self::Fp => 6,
        }
    }

    /// Whether injecting a team best overwrites the optimizer's `g*` outright.
    pub fn overwrites_global_best(self) -> bool {
        matches!(self, Self::Pso | Self::PsoLevy | Self::Bat | Self::BatLevy)
    }

    pub fn min_population(self) -> usize {
        match self {
            Self::De => 4,
            _ => 1,
        }
    }

    /// The random stream an optimizer of this kind receives under `master_seed`.
    pub fn stream(self, master_seed: u64) -> RngStream {
        RngStream::substream(master_seed, self.index())
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown optimizer '{s}'")))
    }
}

/// Stepping interface shared by all constituent optimizers.
pub trait Optimizer: Send {
    fn kind(&self) -> OptimizerKind;

    /// Advances one generation.
    fn step(&mut self, objective: &dyn Objective);

    /// Best solution this optimizer currently steers by.
    fn global_best(&self) -> &EvaluatedSolution;

    /// Receives a team best from the orchestrator.
    fn inject(&mut self, team_best: &EvaluatedSolution) -> Result<()>;

    fn population_size(&self) -> usize;

    /// Objective evaluations so far, including initialization.
    fn evaluations(&self) -> u64;

    /// Number of completed `step` calls.
    fn generation(&self) -> u64;
}

/// Hyperparameters for every optimizer. The Lévy variants share the
/// parameters of their base algorithm.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptimizerParams {
    pub pso: PsoParams,
    pub de: DeParams,
    pub bat: BatParams,
    pub cs: CuckooParams,
    pub fp: FlowerParams,
}

impl OptimizerParams {
    /// Sets one parameter by `group.name`, e.g. `pso.alpha` or `cs.abandon_fraction`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let unknown = || Error::Config(format!("unknown optimizer parameter '{key}'"));
        let (group, name) = key.split_once('.').ok_or_else(unknown)?;
        let slot = match group {
            "pso" => match name {
                "alpha" => &mut self.pso.alpha,
                "beta" => &mut self.pso.beta,
                "velocity_cap" => &mut self.pso.velocity_cap,
                "lambda" => &mut self.pso.lambda,
                _ => return Err(unknown()),
            },
            "de" => match name {
                "differential_weight" => &mut self.de.differential_weight,
                "crossover_rate" => &mut self.de.crossover_rate,
                _ => return Err(unknown()),
            },
            "bat" => match name {
                "f_min" => &mut self.bat.f_min,
                "f_max" => &mut self.bat.f_max,
                "alpha" => &mut self.bat.alpha,
                "gamma" => &mut self.bat.gamma,
                "sigma" => &mut self.bat.sigma,
                "loudness" => &mut self.bat.initial_loudness,
                "pulse_rate" => &mut self.bat.initial_pulse_rate,
                "velocity_cap" => &mut self.bat.velocity_cap,
                "lambda" => &mut self.bat.lambda,
                _ => return Err(unknown()),
            },
            "cs" => match name {
                "abandon_fraction" => &mut self.cs.abandon_fraction,
                "step_scale" => &mut self.cs.step_scale,
                "lambda" => &mut self.cs.lambda,
                _ => return Err(unknown()),
            },
            "fp" => match name {
                "switch_prob" => &mut self.fp.switch_prob,
                "gamma" => &mut self.fp.gamma,
                "lambda" => &mut self.fp.lambda,
                _ => return Err(unknown()),
            },
            _ => return Err(unknown()),
        };
        *slot = value;
        Ok(())
    }

    /// All parameters as `(key, value)` pairs, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("pso.alpha", self.pso.alpha),
            ("pso.beta", self.pso.beta),
            ("pso.velocity_cap", self.pso.velocity_cap),
            ("pso.lambda", self.pso.lambda),
            ("de.differential_weight", self.de.differential_weight),
            ("de.crossover_rate", self.de.crossover_rate),
            ("bat.f_min", self.bat.f_min),
            ("bat.f_max", self.bat.f_max),
            ("bat.alpha", self.bat.alpha),
            ("bat.gamma", self.bat.gamma),
            ("bat.sigma", self.bat.sigma),
            ("bat.loudness", self.bat.initial_loudness),
            ("bat.pulse_rate", self.bat.initial_pulse_rate),
            ("bat.velocity_cap", self.bat.velocity_cap),
            ("bat.lambda", self.bat.lambda),
            ("cs.abandon_fraction", self.cs.abandon_fraction),
            ("cs.step_scale", self.cs.step_scale),
            ("cs.lambda", self.cs.lambda),
            ("fp.switch_prob", self.fp.switch_prob),
            ("fp.gamma", self.fp.gamma),
            ("fp.lambda", self.fp.lambda),
        ]
    }
}

/// Builds and initializes an optimizer of the given kind with `n` agents.
pub fn build(
    kind: OptimizerKind,
    n: usize,
    params: &OptimizerParams,
    objective: &dyn Objective,
    rng: RngStream,
) -> Result<Box<dyn Optimizer>> {
    Ok(match kind {
        OptimizerKind::Pso => Box::new(PsoState::new(n, params.pso.clone(), false, objective, rng)?),
        OptimizerKind::PsoLevy => {
            Box::new(PsoState::new(n, params.pso.clone(), true, objective, rng)?)
        }
        OptimizerKind::De => Box::new(DeState::new(n, params.de.clone(), objective, rng)?),
        OptimizerKind::Bat => Box::new(BatState::new(n, params.bat.clone(), false, objective, rng)?),
        OptimizerKind::BatLevy => {
            Box::new(BatState::new(n, params.bat.clone(), true, objective, rng)?)
        }
        OptimizerKind::Cs => Box::new(CuckooState::new(n, params.cs.clone(), objective, rng)?),
        OptimizerKind::Fp => Box::new(FlowerState::new(n, params.fp.clone(), objective, rng)?),
    })
}

/// A population of positions with cached fitness values.
#[derive(Debug, Clone)]
pub(crate) struct Population {
    pub positions: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
}

impl Population {
    pub fn random(
        kind: OptimizerKind,
        n: usize,
        objective: &dyn Objective,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if n < kind.min_population() {
            return Err(Error::Config(format!(
                "{kind} needs at least {} agents, got {n}",
                kind.min_population()
            )));
        }
        let positions: Vec<Vec<f64>> = (0..n).map(|_| random_point(objective.bounds(), rng)).collect();
        let fitness = positions.iter().map(|x| sanitize(objective.evaluate(x))).collect();
        Ok(Self { positions, fitness })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    /// Index of the lowest fitness; the earliest index wins ties.
    pub fn best_index(&self) -> usize {
        argmin(&self.fitness)
    }

    /// Index of the highest fitness; the earliest index wins ties.
    pub fn worst_index(&self) -> usize {
        let mut worst = 0;
        for (i, f) in self.fitness.iter().enumerate() {
            if *f > self.fitness[worst] {
                worst = i;
            }
        }
        worst
    }

    pub fn solution(&self, i: usize) -> EvaluatedSolution {
        EvaluatedSolution::from_parts(self.positions[i].clone(), self.fitness[i])
    }

    pub fn set(&mut self, i: usize, solution: &EvaluatedSolution) {
        self.positions[i].clear();
        self.positions[i].extend_from_slice(&solution.position);
        self.fitness[i] = solution.fitness;
    }
}

pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_team_best(objective_dim: usize, team_best: &EvaluatedSolution) -> Result<()> {
    crate::error::check_dimension(objective_dim, team_best.dimension())
}

/// Replaces `g` with `(x, f)` when `f` is strictly better.
#[inline]
pub(crate) fn offer(g: &mut EvaluatedSolution, x: &[f64], f: f64) {
    if f < g.fitness {
        *g = EvaluatedSolution::from_parts(x.to_vec(), f);
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in [0, 1], got {p}")))
    }
}

pub(crate) fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite and >= 0, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for kind in OptimizerKind::ALL {
            assert_eq!(kind.name().parse::<OptimizerKind>().unwrap(), kind);
        }
        assert!("ga".parse::<OptimizerKind>().is_err());
    }

    #[test]
    fn params_set_by_key() {
        let mut p = OptimizerParams::default();
        p.set("pso.alpha", 1.5).unwrap();
        p.set("cs.abandon_fraction", 0.1).unwrap();
        assert_eq!(p.pso.alpha, 1.5);
        assert_eq!(p.cs.abandon_fraction, 0.1);
        assert!(p.set("pso.omega", 0.7).is_err());
        assert!(p.set("alpha", 0.7).is_err());
        assert_eq!(p.entries().len(), 21);
    }

    #[test]
    fn argmin_prefers_earliest_tie() {
        assert_eq!(argmin(&[3.0, 1.0, 1.0, 2.0]), 1);
        assert_eq!(argmin(&[0.0, 0.0]), 0);
    }
}
