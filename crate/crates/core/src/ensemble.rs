//! The master loop: step every optimizer once per generation, broadcast an
//! aggregated team best every `frequency` generations, and keep an all-time
//! archive of the best solution seen.
//!
//! Each optimizer draws from its own random sub-stream, derived from the
//! master seed and the optimizer's kind, and the communication event is a
//! barrier. Results are therefore identical whether the optimizers step
//! sequentially or in parallel, and removing one optimizer from the roster
//! leaves the streams of the others unchanged.

use crate::benchmarks::{BenchmarkKind, BenchmarkSpec};
use crate::communication::{apply_scheme, SchemeId, TeamSnapshot};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::optimizers::{build, Optimizer, OptimizerKind, OptimizerParams};
use crate::parallel::{self, Execution};
use crate::space::EvaluatedSolution;
use crate::stats::ErrorStats;

#[derive(Debug, Clone, PartialEq)]
pub struct MmoConfig {
    pub roster: Vec<OptimizerKind>,
    /// Population size of every roster member.
    pub agents: usize,
    pub scheme: SchemeId,
    /// Generations between communication events. Values above
    /// `generations` disable communication.
    pub frequency: u64,
    pub generations: u64,
    pub seed: u64,
    pub params: OptimizerParams,
    pub execution: Execution,
}

impl Default for MmoConfig {
    fn default() -> Self {
        Self {
            roster: OptimizerKind::ALL.to_vec(),
            agents: 100,
            scheme: SchemeId::ExponentialWeighted,
            frequency: 1,
            generations: 2000,
            seed: 0,
            params: OptimizerParams::default(),
            execution: Execution::Parallel,
        }
    }
}

impl MmoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::Config("roster must not be empty".into()));
        }
        for (i, k) in self.roster.iter().enumerate() {
            if self.roster[..i].contains(k) {
                return Err(Error::Config(format!("duplicate optimizer '{k}' in roster")));
            }
        }
        if self.agents == 0 {
            return Err(Error::Config("agents per optimizer must be positive".into()));
        }
        if self.frequency == 0 {
            return Err(Error::Config("communication frequency must be >= 1".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Whether a communication event happens after generation `generation`.
    pub fn communicates_at(&self, generation: u64) -> bool {
        generation > 0 && generation.is_multiple_of(self.frequency)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmoResult {
    /// All-time best over every optimizer and generation.
    pub best: EvaluatedSolution,
    /// `(generation, archive best fitness)` for generations `0..=G`.
    pub trajectory: Vec<(u64, f64)>,
    /// Final `g*` fitness per roster member, in roster order.
    pub per_optimizer_final: Vec<(OptimizerKind, f64)>,
    pub evaluation_count: u64,
    pub communication_events: u64,
}

/// An MMO run that can be advanced one generation at a time.
pub struct Ensemble<'a> {
    config: MmoConfig,
    objective: &'a dyn Objective,
    optimizers: Vec<Box<dyn Optimizer>>,
    archive: EvaluatedSolution,
    trajectory: Vec<(u64, f64)>,
    generation: u64,
    communication_evaluations: u64,
    communication_events: u64,
}

impl<'a> Ensemble<'a> {
    pub fn new(config: MmoConfig, objective: &'a dyn Objective) -> Result<Self> {
        config.validate()?;
        let optimizers = config
            .roster
            .iter()
            .map(|&kind| build(kind, config.agents, &config.params, objective, kind.stream(config.seed)))
            .collect::<Result<Vec<_>>>()?;
        let mut archive = optimizers[0].global_best().clone();
        for opt in &optimizers[1..] {
            if opt.global_best().fitness < archive.fitness {
                archive = opt.global_best().clone();
            }
        }
        let trajectory = vec![(0, archive.fitness)];
        Ok(Self {
            config,
            objective,
            optimizers,
            archive,
            trajectory,
            generation: 0,
            communication_evaluations: 0,
            communication_events: 0,
        })
    }

    pub fn config(&self) -> &MmoConfig {
        &self.config
    }

    pub fn optimizers(&self) -> &[Box<dyn Optimizer>] {
        &self.optimizers
    }

    pub fn archive(&self) -> &EvaluatedSolution {
        &self.archive
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    fn offer(&mut self, candidate: &EvaluatedSolution) {
        if candidate.fitness < self.archive.fitness {
            self.archive = candidate.clone();
        }
    }

    /// Steps every optimizer once, updates the archive and, on a
    /// communication generation, broadcasts the team best.
    pub fn step_generation(&mut self) -> Result<()> {
        let objective = self.objective;
        parallel::for_each_mut(&mut self.optimizers, self.config.execution, |opt| opt.step(objective));
        self.generation += 1;
        for i in 0..self.optimizers.len() {
            let g = self.optimizers[i].global_best().clone();
            self.offer(&g);
        }
        if self.config.communicates_at(self.generation) {
            let snapshot = TeamSnapshot::with_ids(
                self.optimizers
                    .iter()
                    .map(|o| (o.kind(), o.global_best().clone()))
                    .collect(),
            )?;
            let team_best = apply_scheme(self.config.scheme, &snapshot, objective)?;
            self.communication_evaluations += self.config.scheme.evaluations_per_event();
            self.communication_events += 1;
            self.offer(&team_best);
            for opt in &mut self.optimizers {
                opt.inject(&team_best)?;
            }
        }
        self.trajectory.push((self.generation, self.archive.fitness));
        Ok(())
    }

    pub fn evaluation_count(&self) -> u64 {
        self.optimizers.iter().map(|o| o.evaluations()).sum::<u64>() + self.communication_evaluations
    }

    pub fn finish(self) -> MmoResult {
        MmoResult {
            evaluation_count: self.evaluation_count(),
            per_optimizer_final: self
                .optimizers
                .iter()
                .map(|o| (o.kind(), o.global_best().fitness))
                .collect(),
            best: self.archive,
            trajectory: self.trajectory,
            communication_events: self.communication_events,
        }
    }
}

/// Runs the full ensemble for `config.generations` generations.
pub fn run_mmo(config: &MmoConfig, objective: &dyn Objective) -> Result<MmoResult> {
    let mut ensemble = Ensemble::new(config.clone(), objective)?;
    for _ in 0..config.generations {
        ensemble.step_generation()?;
    }
    Ok(ensemble.finish())
}

/// Runs one optimizer on its own, drawing from the same sub-stream it would
/// receive inside an ensemble with `seed`.
pub fn run_standalone(
    kind: OptimizerKind,
    agents: usize,
    params: &OptimizerParams,
    objective: &dyn Objective,
    seed: u64,
    generations: u64,
) -> Result<MmoResult> {
    let mut opt = build(kind, agents, params, objective, kind.stream(seed))?;
    let mut trajectory = Vec::with_capacity(generations as usize + 1);
    trajectory.push((0, opt.global_best().fitness));
    for g in 1..=generations {
        opt.step(objective);
        trajectory.push((g, opt.global_best().fitness));
    }
    Ok(MmoResult {
        best: opt.global_best().clone(),
        trajectory,
        per_optimizer_final: vec![(kind, opt.global_best().fitness)],
        evaluation_count: opt.evaluations(),
        communication_events: 0,
    })
}

/// `run_mmo` with `excluded` removed from the roster.
pub fn run_ablation(config: &MmoConfig, objective: &dyn Objective, excluded: OptimizerKind) -> Result<MmoResult> {
    if !config.roster.contains(&excluded) {
        return Err(Error::Config(format!("'{excluded}' is not in the roster")));
    }
    if config.roster.len() < 2 {
        return Err(Error::Config("ablation needs at least two roster members".into()));
    }
    let reduced = MmoConfig {
        roster: config.roster.iter().copied().filter(|k| *k != excluded).collect(),
        ..config.clone()
    };
    run_mmo(&reduced, objective)
}

/// Seed of trial `trial` for a experiment with base seed `base`.
pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

/// Runs `trials` independent ensembles with seeds `trial_seed(config.seed, r)`.
pub fn run_trials(config: &MmoConfig, objective: &dyn Objective, trials: usize) -> Result<Vec<MmoResult>> {
    let seeds: Vec<u64> = (0..trials).map(|r| trial_seed(config.seed, r)).collect();
    parallel::map(&seeds, config.execution, |&s| run_mmo(&config.with_seed(s), objective))
        .into_iter()
        .collect()
}

/// Standalone counterpart of [`run_trials`].
pub fn run_standalone_trials(
    kind: OptimizerKind,
    config: &MmoConfig,
    objective: &dyn Objective,
    trials: usize,
) -> Result<Vec<MmoResult>> {
    let seeds: Vec<u64> = (0..trials).map(|r| trial_seed(config.seed, r)).collect();
    parallel::map(&seeds, config.execution, |&s| {
        run_standalone(kind, config.agents, &config.params, objective, s, config.generations)
    })
    .into_iter()
    .collect()
}

/// Error statistics of archive-best fitness relative to `optimum`.
pub fn error_stats(results: &[MmoResult], optimum: f64) -> ErrorStats {
    let errors: Vec<f64> = results.iter().map(|r| r.best.fitness - optimum).collect();
    ErrorStats::from_samples(&errors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossDimensionRow {
    pub dimension: usize,
    pub generations: u64,
    pub batlevy: ErrorStats,
    pub mmo: ErrorStats,
}

/// Full-roster MMO against standalone BATLévy on `benchmark` for each
/// `(dimension, generations)` pair, over `trials` paired seeds.
pub fn run_cross_dimension(
    config: &MmoConfig,
    benchmark: BenchmarkKind,
    cells: &[(usize, u64)],
    trials: usize,
) -> Result<Vec<CrossDimensionRow>> {
    if cells.is_empty() {
        return Err(Error::Config("cross-dimension run needs at least one dimension".into()));
    }
    cells
        .iter()
        .map(|&(dimension, generations)| {
            let objective = BenchmarkSpec::new(benchmark, dimension)?;
            let cfg = MmoConfig {
                roster: OptimizerKind::ALL.to_vec(),
                generations,
                ..config.clone()
            };
            let mmo = run_trials(&cfg, &objective, trials)?;
            let bat = run_standalone_trials(OptimizerKind::BatLevy, &cfg, &objective, trials)?;
            Ok(CrossDimensionRow {
                dimension,
                generations,
                batlevy: error_stats(&bat, objective.optimum()),
                mmo: error_stats(&mmo, objective.optimum()),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(roster: Vec<OptimizerKind>) -> MmoConfig {
        MmoConfig {
            roster,
            agents: 10,
            generations: 30,
            frequency: 5,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn validate_rejects_bad_configs() {
        let obj = BenchmarkSpec::new(BenchmarkKind::Zakharov, 2).unwrap();
        let bad = [
            small(vec![]),
            small(vec![OptimizerKind::Fp, OptimizerKind::Fp]),
            MmoConfig { frequency: 0, ..small(vec![OptimizerKind::Fp]) },
            MmoConfig { agents: 0, ..small(vec![OptimizerKind::Fp]) },
            MmoConfig { agents: 3, ..small(vec![OptimizerKind::De]) },
        ];
        for cfg in bad {
            assert!(run_mmo(&cfg, &obj).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn trajectory_is_monotone_and_ends_at_best() {
        let obj = BenchmarkSpec::new(BenchmarkKind::Rosenbrock, 3).unwrap();
        let cfg = MmoConfig { scheme: SchemeId::Averaging, ..small(OptimizerKind::ALL.to_vec()) };
        let r = run_mmo(&cfg, &obj).unwrap();
        assert_eq!(r.trajectory.len(), 31);
        assert!(r.trajectory.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(r.trajectory.last().unwrap().1, r.best.fitness);
        assert_eq!(r.communication_events, 6);
        assert_eq!(r.per_optimizer_final.len(), 7);
    }

    #[test]
    fn ablation_requires_member() {
        let obj = BenchmarkSpec::new(BenchmarkKind::Zakharov, 2).unwrap();
        let cfg = small(vec![OptimizerKind::Fp, OptimizerKind::Cs]);
        assert!(run_ablation(&cfg, &obj, OptimizerKind::Pso).is_err());
        assert!(run_ablation(&small(vec![OptimizerKind::Fp]), &obj, OptimizerKind::Fp).is_err());
        let r = run_ablation(&cfg, &obj, OptimizerKind::Cs).unwrap();
        assert_eq!(r.per_optimizer_final.len(), 1);
    }

    #[test]
    fn communication_schedule() {
        let cfg = MmoConfig { frequency: 10, generations: 25, ..Default::default() };
        let events: Vec<u64> = (0..=25).filter(|g| cfg.communicates_at(*g)).collect();
        assert_eq!(events, vec![10, 20]);
    }
}
