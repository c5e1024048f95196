//! Particle swarm optimization, optionally with a Lévy-distributed
//! attraction toward the global best.

use crate::error::Result;
use crate::levy::{truncate, LevySampler, DEFAULT_LAMBDA};
use crate::objective::{sanitize, Objective};
use crate::rng::RngStream;
use crate::space::EvaluatedSolution;

use super::{check_nonnegative, check_team_best, offer, Optimizer, OptimizerKind, Population};

#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    /// Coefficient of the attraction toward `g*`.
    pub alpha: f64,
    /// Coefficient of the attraction toward the personal best.
    pub beta: f64,
    /// Velocity magnitude cap per dimension, as a fraction of the domain width.
    pub velocity_cap: f64,
    /// Lévy tail exponent (PSOLévy only).
    pub lambda: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            beta: 2.0,
            velocity_cap: 0.2,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsoState {
    params: PsoParams,
    levy: Option<LevySampler>,
    positions: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    personal: Population,
    global: EvaluatedSolution,
    widths: Vec<f64>,
    rng: RngStream,
    evaluations: u64,
    generation: u64,
}

impl PsoState {
    pub fn new(
        n: usize,
        params: PsoParams,
        levy_mode: bool,
        objective: &dyn Objective,
        mut rng: RngStream,
    ) -> Result<Self> {
        check_nonnegative("pso.alpha", params.alpha)?;
        check_nonnegative("pso.beta", params.beta)?;
        check_nonnegative("pso.velocity_cap", params.velocity_cap)?;
        let levy = if levy_mode {
            Some(LevySampler::new(params.lambda)?)
        } else {
            None
        };
        let kind = if levy_mode { OptimizerKind::PsoLevy } else { OptimizerKind::Pso };
        let personal = Population::random(kind, n, objective, &mut rng)?;
        let dim = objective.dimension();
        let global = personal.solution(personal.best_index());
        Ok(Self {
            params,
            levy,
            positions: personal.positions.clone(),
            velocities: vec![vec![0.0; dim]; n],
            global,
            widths: objective.bounds().widths(),
            personal,
            rng,
            evaluations: n as u64,
            generation: 0,
        })
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    /// Personal best positions and fitnesses, one per particle.
    pub fn personal_bests(&self) -> Vec<EvaluatedSolution> {
        (0..self.personal.len()).map(|i| self.personal.solution(i)).collect()
    }

    /// Places every particle at `positions` with the given velocities and
    /// resets personal bests to those points.
    pub fn reset_swarm(
        &mut self,
        positions: Vec<Vec<f64>>,
        velocities: Vec<Vec<f64>>,
        objective: &dyn Objective,
    ) {
        self.personal.fitness = positions.iter().map(|x| sanitize(objective.evaluate(x))).collect();
        self.personal.positions = positions.clone();
        self.positions = positions;
        self.velocities = velocities;
        self.global = self.personal.solution(self.personal.best_index());
    }
}

impl Optimizer for PsoState {
    fn kind(&self) -> OptimizerKind {
        if self.levy.is_some() {
            OptimizerKind::PsoLevy
        } else {
            OptimizerKind::Pso
        }
    }

    fn step(&mut self, objective: &dyn Objective) {
        let bounds = objective.bounds();
        let (lower, upper) = (bounds.lower(), bounds.upper());
        let PsoParams { alpha, beta, velocity_cap, .. } = self.params;
        let g = self.global.position.as_slice();
        for i in 0..self.positions.len() {
            let x = &mut self.positions[i];
            let v = &mut self.velocities[i];
            let p = &self.personal.positions[i];
            for d in 0..x.len() {
                let social = match &self.levy {
                    Some(levy) => truncate(alpha * levy.sample(&mut self.rng) * (g[d] - x[d]), self.widths[d]),
                    None => alpha * self.rng.uniform() * (g[d] - x[d]),
                };
                let cognitive = beta * self.rng.uniform() * (p[d] - x[d]);
                let cap = velocity_cap * self.widths[d];
                v[d] = (v[d] + social + cognitive).clamp(-cap, cap);
                x[d] = (x[d] + v[d]).clamp(lower[d], upper[d]);
            }
            let f = sanitize(objective.evaluate(x));
            if f < self.personal.fitness[i] {
                self.personal.fitness[i] = f;
                self.personal.positions[i].copy_from_slice(x);
            }
        }
        self.evaluations += self.positions.len() as u64;
        for i in 0..self.personal.len() {
            offer(&mut self.global, &self.personal.positions[i], self.personal.fitness[i]);
        }
        self.generation += 1;
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
        self.positions.len()
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn generation(&self) -> u64 {
        self.generation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{BenchmarkKind, BenchmarkSpec};

    fn sphere2() -> BenchmarkSpec {
        BenchmarkSpec::new(BenchmarkKind::Zakharov, 2).unwrap()
    }

    #[test]
    fn zero_coefficients_keep_particles_still() {
        let obj = sphere2();
        let params = PsoParams { alpha: 0.0, beta: 0.0, ..Default::default() };
        let mut pso = PsoState::new(10, params, false, &obj, RngStream::new(1)).unwrap();
        let before = pso.positions().to_vec();
        pso.step(&obj);
        assert_eq!(pso.positions(), &before[..]);
    }

    #[test]
    fn consensus_is_a_fixed_point() {
        let obj = sphere2();
        let mut pso = PsoState::new(5, PsoParams::default(), false, &obj, RngStream::new(2)).unwrap();
        let p = vec![vec![0.3, -0.2]; 5];
        pso.reset_swarm(p.clone(), vec![vec![0.0; 2]; 5], &obj);
        for _ in 0..3 {
            pso.step(&obj);
        }
        assert_eq!(pso.positions(), &p[..]);
    }

    #[test]
    fn inject_overwrites_even_when_worse() {
        let obj = sphere2();
        let mut pso = PsoState::new(10, PsoParams::default(), true, &obj, RngStream::new(3)).unwrap();
        let worse = obj
            .evaluate_solution(crate::space::SolutionVector::new(vec![9.0, 9.0]).unwrap())
            .unwrap();
        assert!(worse.fitness > pso.global_best().fitness);
        pso.inject(&worse).unwrap();
        assert_eq!(pso.global_best(), &worse);
        let wrong_dim = EvaluatedSolution::from_parts(vec![0.0; 3], 0.0);
        assert!(pso.inject(&wrong_dim).is_err());
    }

    #[test]
    fn personal_bests_are_running_minima() {
        let obj = BenchmarkSpec::new(BenchmarkKind::Rosenbrock, 4).unwrap();
        let mut pso = PsoState::new(8, PsoParams::default(), false, &obj, RngStream::new(4)).unwrap();
        let mut minima: Vec<f64> = pso.personal_bests().iter().map(|b| b.fitness).collect();
        for _ in 0..50 {
            pso.step(&obj);
            for (m, x) in minima.iter_mut().zip(pso.positions()) {
                *m = m.min(obj.evaluate(x));
            }
            let bests: Vec<f64> = pso.personal_bests().iter().map(|b| b.fitness).collect();
            assert_eq!(bests, minima);
            let gmin = bests.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(pso.global_best().fitness, gmin);
        }
        assert_eq!(pso.evaluations(), 8 * 51);
    }

    #[test]
    fn velocities_respect_cap() {
        let obj = BenchmarkSpec::new(BenchmarkKind::Griewank, 3).unwrap();
        let mut pso = PsoState::new(20, PsoParams::default(), true, &obj, RngStream::new(5)).unwrap();
        for _ in 0..20 {
            pso.step(&obj);
        }
        let cap = 0.2 * 1200.0;
        assert!(pso.velocities().iter().flatten().all(|v| v.abs() <= cap));
        assert!(pso.positions().iter().all(|x| obj.bounds().contains(x)));
    }
}
