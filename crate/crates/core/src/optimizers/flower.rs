//! Flower pollination: Lévy-driven global pollination toward `g*` or local
//! pollination between two random flowers.

use crate::error::Result;
use crate::levy::{truncate, LevySampler, DEFAULT_LAMBDA};
use crate::objective::{sanitize, Objective};
use crate::rng::RngStream;
use crate::space::EvaluatedSolution;

use super::{check_nonnegative, check_probability, check_team_best, offer, Optimizer, OptimizerKind, Population};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowerParams {
    /// Probability of a global pollination move.
    pub switch_prob: f64,
    /// Scale of the global move.
    pub gamma: f64,
    pub lambda: f64,
}

impl Default for FlowerParams {
    fn default() -> Self {
        Self {
            switch_prob: 0.8,
            gamma: 0.1,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowerState {
    params: FlowerParams,
    levy: LevySampler,
    pollen: Population,
    global: EvaluatedSolution,
    widths: Vec<f64>,
    candidate: Vec<f64>,
    global_moves: u64,
    local_moves: u64,
    rng: RngStream,
    evaluations: u64,
    generation: u64,
}

impl FlowerState {
    pub fn new(n: usize, params: FlowerParams, objective: &dyn Objective, mut rng: RngStream) -> Result<Self> {
        check_probability("fp.switch_prob", params.switch_prob)?;
        check_nonnegative("fp.gamma", params.gamma)?;
        let levy = LevySampler::new(params.lambda)?;
        let pollen = Population::random(OptimizerKind::Fp, n, objective, &mut rng)?;
        let global = pollen.solution(pollen.best_index());
        Ok(Self {
            params,
            levy,
            global,
            pollen,
            widths: objective.bounds().widths(),
            candidate: vec![0.0; objective.dimension()],
            global_moves: 0,
            local_moves: 0,
            rng,
            evaluations: n as u64,
            generation: 0,
        })
    }

    pub fn pollen(&self) -> Vec<EvaluatedSolution> {
        (0..self.pollen.len()).map(|i| self.pollen.solution(i)).collect()
    }

    /// Cumulative `(global, local)` move counts.
    pub fn move_counts(&self) -> (u64, u64) {
        (self.global_moves, self.local_moves)
    }

    pub fn fill_with(&mut self, solution: &EvaluatedSolution) {
        for i in 0..self.pollen.len() {
            self.pollen.set(i, solution);
        }
        self.global = solution.clone();
    }
}

impl Optimizer for FlowerState {
    fn kind(&self) -> OptimizerKind {
        OptimizerKind::Fp
    }

    fn step(&mut self, objective: &dyn Objective) {
        let n = self.pollen.len();
        for i in 0..n {
            if self.rng.uniform() < self.params.switch_prob {
                let g = &self.global.position;
                let x = &self.pollen.positions[i];
                for d in 0..x.len() {
                    let step = self.params.gamma * self.levy.sample(&mut self.rng) * (g[d] - x[d]);
                    self.candidate[d] = x[d] + truncate(step, self.widths[d]);
                }
                self.global_moves += 1;
            } else {
                let eps = self.rng.uniform();
                let j = self.rng.index(n);
                let k = if n > 1 { self.rng.index_excluding(n, &[j]) } else { j };
                let (xj, xk, x) = (
                    &self.pollen.positions[j],
                    &self.pollen.positions[k],
                    &self.pollen.positions[i],
                );
                for d in 0..x.len() {
                    self.candidate[d] = x[d] + eps * (xj[d] - xk[d]);
                }
                self.local_moves += 1;
            }
            objective.bounds().clamp_in_place(&mut self.candidate);
            let f = sanitize(objective.evaluate(&self.candidate));
            if f <= self.pollen.fitness[i] {
                self.pollen.positions[i].copy_from_slice(&self.candidate);
                self.pollen.fitness[i] = f;
            }
            offer(&mut self.global, &self.candidate, f);
        }
        self.evaluations += n as u64;
        self.generation += 1;
    }

    fn global_best(&self) -> &EvaluatedSolution {
        &self.global
    }

    /// Replaces one uniformly chosen flower with the team best.
    fn inject(&mut self, team_best: &EvaluatedSolution) -> Result<()> {
        check_team_best(self.widths.len(), team_best)?;
        if team_best.fitness >= self.global.fitness {
            return Ok(());
        }
        let i = self.rng.index(self.pollen.len());
        self.pollen.set(i, team_best);
        offer(&mut self.global, &team_best.position, team_best.fitness);
        Ok(())
    }

    fn population_size(&self) -> usize {
        self.pollen.len()
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn generation(&self) -> u64 {
        self.generation
    }
}
