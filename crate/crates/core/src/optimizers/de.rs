//! Differential evolution, DE/rand/1/bin.

use crate::error::Result;
use crate::objective::{sanitize, Objective};
use crate::rng::RngStream;
use crate::space::EvaluatedSolution;

use super::{check_nonnegative, check_probability, check_team_best, Optimizer, OptimizerKind, Population};

#[derive(Debug, Clone, PartialEq)]
pub struct DeParams {
    /// Scale `F` of the difference vector in `x_p + F (x_q - x_r)`.
    pub differential_weight: f64,
    /// Binomial crossover rate `C_r`.
    pub crossover_rate: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            differential_weight: 0.5,
            crossover_rate: 0.9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeState {
    params: DeParams,
    population: Population,
    global: EvaluatedSolution,
    trial: Vec<f64>,
    dim: usize,
    rng: RngStream,
    evaluations: u64,
    generation: u64,
}

impl DeState {
    pub fn new(n: usize, params: DeParams, objective: &dyn Objective, mut rng: RngStream) -> Result<Self> {
        check_nonnegative("de.differential_weight", params.differential_weight)?;
        check_probability("de.crossover_rate", params.crossover_rate)?;
        let population = Population::random(OptimizerKind::De, n, objective, &mut rng)?;
        let global = population.solution(population.best_index());
        let dim = objective.dimension();
        Ok(Self {
            params,
            population,
            global,
            trial: vec![0.0; dim],
            dim,
            rng,
            evaluations: n as u64,
            generation: 0,
        })
    }

    pub fn population(&self) -> Vec<EvaluatedSolution> {
        (0..self.population.len()).map(|i| self.population.solution(i)).collect()
    }

    pub fn fitness(&self) -> &[f64] {
        &self.population.fitness
    }

    fn refresh_global(&mut self) {
        self.global = self.population.solution(self.population.best_index());
    }
}

impl Optimizer for DeState {
    fn kind(&self) -> OptimizerKind {
        OptimizerKind::De
    }

    fn step(&mut self, objective: &dyn Objective) {
        let n = self.population.len();
        let bounds = objective.bounds();
        let DeParams { differential_weight: f, crossover_rate: cr } = self.params;
        // Trials are built from the generation's starting population.
        let parents = self.population.positions.clone();
        for i in 0..n {
            let p = self.rng.index_excluding(n, &[i]);
            let q = self.rng.index_excluding(n, &[i, p]);
            let r = self.rng.index_excluding(n, &[i, p, q]);
            let forced = self.rng.index(self.dim);
            for (j, t) in self.trial.iter_mut().enumerate() {
                *t = if j == forced || self.rng.uniform() <= cr {
                    parents[p][j] + f * (parents[q][j] - parents[r][j])
                } else {
                    parents[i][j]
                };
            }
            bounds.clamp_in_place(&mut self.trial);
            let ft = sanitize(objective.evaluate(&self.trial));
            if ft <= self.population.fitness[i] {
                self.population.positions[i].copy_from_slice(&self.trial);
                self.population.fitness[i] = ft;
            }
        }
        self.evaluations += n as u64;
        self.refresh_global();
        self.generation += 1;
    }

    fn global_best(&self) -> &EvaluatedSolution {
        &self.global
    }

    /// Replaces the current worst member so the team best can act as a
    /// mutation parent.
    fn inject(&mut self, team_best: &EvaluatedSolution) -> Result<()> {
        check_team_best(self.dim, team_best)?;
        if team_best.fitness >= self.global.fitness {
            return Ok(());
        }
        let worst = self.population.worst_index();
        self.population.set(worst, team_best);
        self.refresh_global();
        Ok(())
    }

    fn population_size(&self) -> usize {
        self.population.len()
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn generation(&self) -> u64 {
        self.generation
    }
}
