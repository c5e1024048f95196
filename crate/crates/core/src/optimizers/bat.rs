//! Bat algorithm, with Gaussian or Lévy local search around `g*`.

use crate::error::{Error, Result};
use crate::levy::{truncate, LevySampler, DEFAULT_LAMBDA};
use crate::objective::{sanitize, Objective};
use crate::rng::RngStream;
use crate::space::EvaluatedSolution;

use super::{check_nonnegative, check_probability, check_team_best, Optimizer, OptimizerKind, Population};

#[derive(Debug, Clone, PartialEq)]
pub struct BatParams {
    pub f_min: f64,
    pub f_max: f64,
    /// Loudness decay factor, `A ← alpha · A` on acceptance.
    pub alpha: f64,
    /// Pulse-rate growth constant in `r = r⁰ (1 - e^{-γ t})`.
    pub gamma: f64,
    /// Local-search step scale.
    pub sigma: f64,
    pub initial_loudness: f64,
    pub initial_pulse_rate: f64,
    /// Velocity magnitude cap per dimension, as a fraction of the domain width.
    pub velocity_cap: f64,
    /// Lévy tail exponent (BATLévy only).
    pub lambda: f64,
}

impl Default for BatParams {
    fn default() -> Self {
        Self {
            f_min: 0.0,
            f_max: 2.0,
            alpha: 0.9,
            gamma: 0.9,
            sigma: 0.1,
            initial_loudness: 1.0,
            initial_pulse_rate: 0.5,
            velocity_cap: 0.2,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatState {
    params: BatParams,
    levy: Option<LevySampler>,
    population: Population,
    velocities: Vec<Vec<f64>>,
    frequencies: Vec<f64>,
    loudness: Vec<f64>,
    pulse_rate: Vec<f64>,
    acceptances: Vec<u64>,
    global: EvaluatedSolution,
    widths: Vec<f64>,
    candidate: Vec<f64>,
    rng: RngStream,
    evaluations: u64,
    generation: u64,
}

impl BatState {
    pub fn new(
        n: usize,
        params: BatParams,
        levy_mode: bool,
        objective: &dyn Objective,
        mut rng: RngStream,
    ) -> Result<Self> {
        if params.f_min.is_nan() || params.f_max.is_nan() || params.f_min > params.f_max {
            return Err(Error::Parameter("bat.f_min must not exceed bat.f_max".into()));
        }
        if !(params.alpha > 0.0 && params.alpha < 1.0) {
            return Err(Error::Parameter(format!("bat.alpha must lie in (0, 1), got {}", params.alpha)));
        }
        if params.gamma.is_nan() || params.gamma <= 0.0 {
            return Err(Error::Parameter(format!("bat.gamma must be > 0, got {}", params.gamma)));
        }
        check_nonnegative("bat.sigma", params.sigma)?;
        check_nonnegative("bat.loudness", params.initial_loudness)?;
        check_probability("bat.pulse_rate", params.initial_pulse_rate)?;
        check_nonnegative("bat.velocity_cap", params.velocity_cap)?;
        let levy = if levy_mode {
            Some(LevySampler::new(params.lambda)?)
        } else {
            None
        };
        let kind = if levy_mode { OptimizerKind::BatLevy } else { OptimizerKind::Bat };
        let population = Population::random(kind, n, objective, &mut rng)?;
        let dim = objective.dimension();
        let global = population.solution(population.best_index());
        Ok(Self {
            levy,
            velocities: vec![vec![0.0; dim]; n],
            frequencies: vec![params.f_min; n],
            loudness: vec![params.initial_loudness; n],
            pulse_rate: vec![params.initial_pulse_rate; n],
            acceptances: vec![0; n],
            global,
            widths: objective.bounds().widths(),
            candidate: vec![0.0; dim],
            params,
            population,
            rng,
            evaluations: n as u64,
            generation: 0,
        })
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.population.positions
    }

    pub fn loudness(&self) -> &[f64] {
        &self.loudness
    }

    pub fn pulse_rates(&self) -> &[f64] {
        &self.pulse_rate
    }

    /// Number of accepted moves per bat.
    pub fn acceptances(&self) -> &[u64] {
        &self.acceptances
    }

    /// Moves every bat onto `position` with zero velocity.
    pub fn collapse_to(&mut self, position: &[f64], objective: &dyn Objective) {
        let f = sanitize(objective.evaluate(position));
        let point = EvaluatedSolution::from_parts(position.to_vec(), f);
        for i in 0..self.population.len() {
            self.population.set(i, &point);
            self.velocities[i].iter_mut().for_each(|v| *v = 0.0);
        }
        self.global = point;
    }
}

impl Optimizer for BatState {
    fn kind(&self) -> OptimizerKind {
        if self.levy.is_some() {
            OptimizerKind::BatLevy
        } else {
            OptimizerKind::Bat
        }
    }

    fn step(&mut self, objective: &dyn Objective) {
        let bounds = objective.bounds();
        let p = self.params.clone();
        self.generation += 1;
        let t = self.generation as f64;
        for i in 0..self.population.len() {
            let beta = self.rng.uniform();
            self.frequencies[i] = p.f_min + beta * (p.f_max - p.f_min);
            let fi = self.frequencies[i];
            {
                let x = &self.population.positions[i];
                let v = &mut self.velocities[i];
                let g = &self.global.position;
                for d in 0..x.len() {
                    let cap = p.velocity_cap * self.widths[d];
                    v[d] = (v[d] + (x[d] - g[d]) * fi).clamp(-cap, cap);
                    self.candidate[d] = x[d] + v[d];
                }
            }
            if self.rng.uniform() < self.pulse_rate[i] {
                let a = self.loudness[i];
                let g = &self.global.position;
                for d in 0..g.len() {
                    let step = match &self.levy {
                        Some(levy) => truncate(p.sigma * levy.sample(&mut self.rng) * a, self.widths[d]),
                        None => p.sigma * self.rng.normal() * a,
                    };
                    self.candidate[d] = g[d] + step;
                }
            }
            bounds.clamp_in_place(&mut self.candidate);
            let f_new = sanitize(objective.evaluate(&self.candidate));
            if f_new <= self.population.fitness[i] && self.rng.uniform() < self.loudness[i] {
                self.population.positions[i].copy_from_slice(&self.candidate);
                self.population.fitness[i] = f_new;
                self.loudness[i] *= p.alpha;
                self.pulse_rate[i] = p.initial_pulse_rate * (1.0 - (-p.gamma * t).exp());
                self.acceptances[i] += 1;
            }
            if f_new < self.global.fitness {
                self.global = EvaluatedSolution::from_parts(self.candidate.clone(), f_new);
            }
        }
        self.evaluations += self.population.len() as u64;
    }

    fn global_best(&self) -> &EvaluatedSolution {
        &self.global
    }

    fn inject(&mut self, team_best: &EvaluatedSolution) -> Result<()> {
        check_team_best(self.widths.len(), team_best)?;
        self.global = team_best.clone();
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
