//! Cuckoo search: Lévy-flight eggs followed by abandonment of the worst
//! nests through a biased random walk.

use crate::error::Result;
use crate::levy::{truncate, LevySampler, DEFAULT_LAMBDA};
use crate::objective::{sanitize, Objective};
use crate::rng::RngStream;
use crate::space::EvaluatedSolution;

use super::{check_nonnegative, check_probability, check_team_best, offer, Optimizer, OptimizerKind, Population};

#[derive(Debug, Clone, PartialEq)]
pub struct CuckooParams {
    /// Fraction `p_a` of nests abandoned each generation.
    pub abandon_fraction: f64,
    /// Lévy step scale as a fraction of each coordinate's domain width.
    pub step_scale: f64,
    pub lambda: f64,
}

impl Default for CuckooParams {
    fn default() -> Self {
        Self {
            abandon_fraction: 0.25,
            step_scale: 0.01,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CuckooState {
    params: CuckooParams,
    levy: LevySampler,
    nests: Population,
    global: EvaluatedSolution,
    widths: Vec<f64>,
    buffer: Vec<f64>,
    rng: RngStream,
    evaluations: u64,
    generation: u64,
}

impl CuckooState {
    pub fn new(n: usize, params: CuckooParams, objective: &dyn Objective, mut rng: RngStream) -> Result<Self> {
        check_probability("cs.abandon_fraction", params.abandon_fraction)?;
        check_nonnegative("cs.step_scale", params.step_scale)?;
        let levy = LevySampler::new(params.lambda)?;
        let nests = Population::random(OptimizerKind::Cs, n, objective, &mut rng)?;
        let global = nests.solution(nests.best_index());
        Ok(Self {
            params,
            levy,
            global,
            nests,
            widths: objective.bounds().widths(),
            buffer: vec![0.0; objective.dimension()],
            rng,
            evaluations: n as u64,
            generation: 0,
        })
    }

    pub fn nests(&self) -> Vec<EvaluatedSolution> {
        (0..self.nests.len()).map(|i| self.nests.solution(i)).collect()
    }

    /// Nests replaced in the abandonment phase of each generation.
    pub fn abandoned_per_step(&self) -> usize {
        (self.params.abandon_fraction * self.nests.len() as f64).floor() as usize
    }

    fn levy_phase(&mut self, objective: &dyn Objective) {
        let n = self.nests.len();
        for i in 0..n {
            for d in 0..self.buffer.len() {
                let scale = self.params.step_scale * self.widths[d];
                self.buffer[d] =
                    self.nests.positions[i][d] + truncate(scale * self.levy.sample(&mut self.rng), self.widths[d]);
            }
            objective.bounds().clamp_in_place(&mut self.buffer);
            let f = sanitize(objective.evaluate(&self.buffer));
            let j = self.rng.index(n);
            if f < self.nests.fitness[j] {
                self.nests.positions[j].copy_from_slice(&self.buffer);
                self.nests.fitness[j] = f;
            }
            offer(&mut self.global, &self.buffer, f);
        }
        self.evaluations += n as u64;
    }

    fn abandonment_phase(&mut self, objective: &dyn Objective) {
        let n = self.nests.len();
        let m = self.abandoned_per_step();
        if m == 0 {
            return;
        }
        let mut order: Vec<usize> = (0..n).collect();
        // Worst first; stable, so earlier indices rank ahead among ties.
        order.sort_by(|a, b| self.nests.fitness[*b].total_cmp(&self.nests.fitness[*a]));
        let pa = self.params.abandon_fraction;
        for &k in &order[..m] {
            let s = self.rng.uniform();
            let j = self.rng.index(n);
            let l = if n > 1 { self.rng.index_excluding(n, &[j]) } else { j };
            for d in 0..self.buffer.len() {
                let gate = if self.rng.uniform() < pa { 1.0 } else { 0.0 };
                let diff = self.nests.positions[j][d] - self.nests.positions[l][d];
                self.buffer[d] = self.nests.positions[k][d] + s * gate * diff;
            }
            objective.bounds().clamp_in_place(&mut self.buffer);
            let f = sanitize(objective.evaluate(&self.buffer));
            self.nests.positions[k].copy_from_slice(&self.buffer);
            self.nests.fitness[k] = f;
            offer(&mut self.global, &self.buffer, f);
        }
        self.evaluations += m as u64;
    }
}

impl Optimizer for CuckooState {
    fn kind(&self) -> OptimizerKind {
        OptimizerKind::Cs
    }

    fn step(&mut self, objective: &dyn Objective) {
        self.levy_phase(objective);
        self.abandonment_phase(objective);
        self.generation += 1;
    }

    fn global_best(&self) -> &EvaluatedSolution {
        &self.global
    }

    /// Replaces one uniformly chosen nest with the team best.
    fn inject(&mut self, team_best: &EvaluatedSolution) -> Result<()> {
        check_team_best(self.widths.len(), team_best)?;
        if team_best.fitness >= self.global.fitness {
            return Ok(());
        }
        let i = self.rng.index(self.nests.len());
        self.nests.set(i, team_best);
        offer(&mut self.global, &team_best.position, team_best.fitness);
        Ok(())
    }

    fn population_size(&self) -> usize {
        self.nests.len()
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

    fn obj() -> BenchmarkSpec {
        BenchmarkSpec::new(BenchmarkKind::Griewank, 4).unwrap()
    }

    #[test]
    fn no_abandonment_at_zero_fraction() {
        let o = obj();
        let params = CuckooParams { abandon_fraction: 0.0, ..Default::default() };
        let mut cs = CuckooState::new(12, params, &o, RngStream::new(1)).unwrap();
        cs.step(&o);
        assert_eq!(cs.abandoned_per_step(), 0);
        assert_eq!(cs.evaluations(), 24);
    }

    #[test]
    fn zero_step_creates_no_new_positions() {
        let o = obj();
        let params = CuckooParams { abandon_fraction: 0.0, step_scale: 0.0, ..Default::default() };
        let mut cs = CuckooState::new(12, params, &o, RngStream::new(2)).unwrap();
        let before = cs.nests();
        let best = cs.global_best().clone();
        cs.step(&o);
        for nest in cs.nests() {
            assert!(before.contains(&nest));
        }
        assert_eq!(cs.global_best(), &best);
    }

    #[test]
    fn abandons_floor_fraction() {
        let o = obj();
        let cs = CuckooState::new(10, CuckooParams::default(), &o, RngStream::new(3)).unwrap();
        assert_eq!(cs.abandoned_per_step(), 2);
        let mut cs = cs;
        cs.step(&o);
        assert_eq!(cs.evaluations(), 10 + 10 + 2);
    }

    #[test]
    fn exactly_the_worst_nests_are_replaced() {
        let o = obj();
        // Zero Lévy step: the Lévy phase can only copy nests, so afterwards we
        // can tell which slots the abandonment phase rewrote.
        let params = CuckooParams { step_scale: 0.0, abandon_fraction: 0.3, ..Default::default() };
        let mut cs = CuckooState::new(10, params, &o, RngStream::new(4)).unwrap();
        cs.levy_phase(&o);
        let before = cs.nests();
        let mut order: Vec<usize> = (0..10).collect();
        order.sort_by(|a, b| before[*b].fitness.total_cmp(&before[*a].fitness));
        cs.abandonment_phase(&o);
        let after = cs.nests();
        for &untouched in &order[3..] {
            assert_eq!(after[untouched], before[untouched]);
        }
    }

    #[test]
    fn inject_into_single_nest() {
        let o = obj();
        let mut cs = CuckooState::new(1, CuckooParams::default(), &o, RngStream::new(5)).unwrap();
        let team = EvaluatedSolution::from_parts(vec![0.0; 4], 0.0);
        cs.inject(&team).unwrap();
        assert_eq!(cs.nests(), vec![team.clone()]);
        assert_eq!(cs.global_best(), &team);
    }
}
