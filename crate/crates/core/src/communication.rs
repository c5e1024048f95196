//! Aggregation operators that fuse the optimizers' global bests into one
//! team best.
//!
//! Every scheme is a convex combination of the members' positions. Members
//! are ranked by ascending fitness (stable, so earlier members win ties) and
//! the weighted sum is accumulated in rank order, which makes each scheme
//! exactly invariant to the order of the snapshot when fitnesses are
//! distinct.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dimension, Error, Result};
use crate::objective::{sanitize, Objective};
use crate::optimizers::OptimizerKind;
use crate::space::{EvaluatedSolution, SolutionVector};

/// Base of the exponential rank weights.
pub const EXPONENTIAL_BASE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Averaging,
    RankWeighted,
    ExponentialWeighted,
    BestRank,
    MetaWeighted,
}

impl SchemeId {
    pub const ALL: [SchemeId; 5] = [
        Self::Averaging,
        Self::RankWeighted,
        Self::ExponentialWeighted,
        Self::BestRank,
        Self::MetaWeighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Averaging => "averaging",
            Self::RankWeighted => "rank",
            Self::ExponentialWeighted => "exponential",
            Self::BestRank => "best",
            Self::MetaWeighted => "meta",
        }
    }

    /// Objective evaluations spent per communication event.
    pub fn evaluations_per_event(self) -> u64 {
        match self {
            Self::BestRank => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown communication scheme '{s}'")))
    }
}

/// The global bests of the `K` optimizers at one communication event.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamSnapshot {
    bests: Vec<EvaluatedSolution>,
    ids: Vec<Option<OptimizerKind>>,
}

impl TeamSnapshot {
    pub fn new(bests: Vec<EvaluatedSolution>) -> Result<Self> {
        let ids = vec![None; bests.len()];
        Self::build(bests, ids)
    }

    pub fn with_ids(members: Vec<(OptimizerKind, EvaluatedSolution)>) -> Result<Self> {
        let (ids, bests) = members.into_iter().map(|(k, s)| (Some(k), s)).unzip();
        Self::build(bests, ids)
    }

    fn build(bests: Vec<EvaluatedSolution>, ids: Vec<Option<OptimizerKind>>) -> Result<Self> {
        let first = bests.first().ok_or(Error::EmptySnapshot)?;
        let dim = first.dimension();
        for b in &bests {
            check_dimension(dim, b.dimension())?;
        }
        Ok(Self { bests, ids })
    }

    pub fn len(&self) -> usize {
        self.bests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bests.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.bests[0].dimension()
    }

    pub fn bests(&self) -> &[EvaluatedSolution] {
        &self.bests
    }

    pub fn id(&self, i: usize) -> Option<OptimizerKind> {
        self.ids[i]
    }

    /// Member indices sorted by ascending fitness; earlier index first on ties.
    fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|a, b| self.bests[*a].fitness.total_cmp(&self.bests[*b].fitness));
        order
    }

    /// Index of the lowest-fitness member (earliest on ties).
    pub fn best_index(&self) -> usize {
        self.ranking()[0]
    }
}

/// Normalized weights per rank position (best first).
fn rank_weights(scheme: SchemeId, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = match scheme {
        SchemeId::Averaging => vec![1.0; k],
        SchemeId::RankWeighted => (0..k).map(|r| (k - r) as f64).collect(),
        // W*[r] = K - r, raw weight W*[r] · α^(W*[1] - W*[r]) = (K - r) α^r.
        SchemeId::ExponentialWeighted => {
            (0..k).map(|r| (k - r) as f64 * EXPONENTIAL_BASE.powi(r as i32)).collect()
        }
        SchemeId::BestRank => (0..k).map(|r| if r == 0 { 1.0 } else { 0.0 }).collect(),
        SchemeId::MetaWeighted => {
            let parts = [
                SchemeId::Averaging,
                SchemeId::RankWeighted,
                SchemeId::ExponentialWeighted,
                SchemeId::BestRank,
            ]
            .map(|s| rank_weights(s, k));
            return (0..k).map(|r| parts.iter().map(|p| p[r]).sum::<f64>() / 4.0).collect();
        }
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Weight each snapshot member receives under `scheme`, aligned with the
/// snapshot order. Weights are nonnegative and sum to one.
pub fn scheme_weights(scheme: SchemeId, snapshot: &TeamSnapshot) -> Vec<f64> {
    let by_rank = rank_weights(scheme, snapshot.len());
    let mut weights = vec![0.0; snapshot.len()];
    for (r, i) in snapshot.ranking().into_iter().enumerate() {
        weights[i] = by_rank[r];
    }
    weights
}

/// The scheme's aggregate position, before clamping or evaluation.
pub fn aggregate(scheme: SchemeId, snapshot: &TeamSnapshot) -> SolutionVector {
    if scheme == SchemeId::BestRank {
        return snapshot.bests[snapshot.best_index()].position.clone();
    }
    let by_rank = rank_weights(scheme, snapshot.len());
    let mut out = vec![0.0; snapshot.dimension()];
    for (r, i) in snapshot.ranking().into_iter().enumerate() {
        let w = by_rank[r];
        for (o, x) in out.iter_mut().zip(snapshot.bests[i].position.iter()) {
            *o += w * x;
        }
    }
    SolutionVector::from_finite(out)
}

/// Coordinate-wise mean of the members' positions.
pub fn averaging(snapshot: &TeamSnapshot) -> SolutionVector {
    aggregate(SchemeId::Averaging, snapshot)
}

/// Weighted mean with normalized rank weights `[K, K-1, ..., 1]`, best first.
pub fn rank_weighted(snapshot: &TeamSnapshot) -> SolutionVector {
    aggregate(SchemeId::RankWeighted, snapshot)
}

/// Weighted mean with normalized weights `(K - r) · 0.2^r` for rank `r`.
pub fn exponential_weighted(snapshot: &TeamSnapshot) -> SolutionVector {
    aggregate(SchemeId::ExponentialWeighted, snapshot)
}

/// Position of the lowest-fitness member.
pub fn best_rank(snapshot: &TeamSnapshot) -> SolutionVector {
    aggregate(SchemeId::BestRank, snapshot)
}

/// Equal-weight mean of the averaging, rank, exponential and best outputs.
pub fn meta_weighted(snapshot: &TeamSnapshot) -> SolutionVector {
    aggregate(SchemeId::MetaWeighted, snapshot)
}

/// Computes the team best: aggregates, clamps to the objective's bounds and
/// evaluates once. `BestRank` reuses the stored fitness.
pub fn apply_scheme(
    scheme: SchemeId,
    snapshot: &TeamSnapshot,
    objective: &dyn Objective,
) -> Result<EvaluatedSolution> {
    check_dimension(objective.dimension(), snapshot.dimension())?;
    if scheme == SchemeId::BestRank {
        return Ok(snapshot.bests[snapshot.best_index()].clone());
    }
    let mut position = aggregate(scheme, snapshot).into_inner();
    objective.bounds().clamp_in_place(&mut position);
    let fitness = sanitize(objective.evaluate(&position));
    Ok(EvaluatedSolution::from_parts(position, fitness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn member(x: &[f64], f: f64) -> EvaluatedSolution {
        EvaluatedSolution::from_parts(x.to_vec(), f)
    }

    fn pair() -> TeamSnapshot {
        TeamSnapshot::new(vec![member(&[0.0, 0.0], 0.0), member(&[3.0, 3.0], 9.0)]).unwrap()
    }

    #[test]
    fn empty_snapshot_is_an_error() {
        assert_eq!(TeamSnapshot::new(vec![]), Err(Error::EmptySnapshot));
        assert!(TeamSnapshot::new(vec![member(&[0.0], 0.0), member(&[0.0, 1.0], 0.0)]).is_err());
    }

    #[test]
    fn averaging_two_points() {
        let s = TeamSnapshot::new(vec![member(&[0.0, 0.0], 5.0), member(&[2.0, 2.0], 1.0)]).unwrap();
        assert_eq!(averaging(&s).as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn rank_weighted_two_points() {
        let out = rank_weighted(&pair());
        assert_relative_eq!(out[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(out[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exponential_raw_weights_for_seven() {
        let expected = [7.0, 1.2, 0.2, 0.032, 0.0048, 0.00064, 0.000064];
        let total: f64 = expected.iter().sum();
        let w = rank_weights(SchemeId::ExponentialWeighted, 7);
        for (w, e) in w.iter().zip(expected) {
            assert_relative_eq!(*w, e / total, epsilon = 1e-12);
        }
    }

    #[test]
    fn exponential_two_points() {
        let s = TeamSnapshot::new(vec![member(&[0.0, 0.0], 0.0), member(&[1.0, 1.0], 1.0)]).unwrap();
        let out = exponential_weighted(&s);
        assert_relative_eq!(out[0], 0.2 / 2.2, epsilon = 1e-12);
        assert_relative_eq!(out[0], 0.0909, epsilon = 1e-4);
    }

    #[test]
    fn best_rank_argmin_and_tie() {
        let s = TeamSnapshot::new(vec![
            member(&[3.0], 3.0),
            member(&[1.0], 1.0),
            member(&[2.0], 2.0),
        ])
        .unwrap();
        assert_eq!(best_rank(&s).as_slice(), &[1.0]);
        let tie = TeamSnapshot::new(vec![member(&[7.0], 1.0), member(&[8.0], 1.0)]).unwrap();
        assert_eq!(best_rank(&tie).as_slice(), &[7.0]);
    }

    #[test]
    fn meta_of_pair() {
        // [0,0] (f=0) and [1,1] (f=1): averaging 0.5, rank 1/3, exponential 0.2/2.2, best 0.
        let s = TeamSnapshot::new(vec![member(&[0.0, 0.0], 0.0), member(&[1.0, 1.0], 1.0)]).unwrap();
        let out = meta_weighted(&s);
        let expected = (0.5 + 1.0 / 3.0 + 0.2 / 2.2 + 0.0) / 4.0;
        assert_relative_eq!(out[0], expected, epsilon = 1e-12);
        // [0,0] (f=0) and [3,3] (f=9): averaging 1.5, rank 1, exponential 0.6/2.2, best 0.
        let out = meta_weighted(&pair());
        assert_relative_eq!(out[0], (1.5 + 1.0 + 3.0 * 0.2 / 2.2 + 0.0) / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn consensus_and_singleton() {
        let same = TeamSnapshot::new(vec![member(&[0.25, -0.5], 2.0); 7]).unwrap();
        let single = TeamSnapshot::new(vec![member(&[0.25, -0.5], 2.0)]).unwrap();
        for scheme in SchemeId::ALL {
            for s in [&same, &single] {
                let out = aggregate(scheme, s);
                assert_relative_eq!(out[0], 0.25, epsilon = 1e-12);
                assert_relative_eq!(out[1], -0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn parses_cli_names() {
        for s in SchemeId::ALL {
            assert_eq!(s.name().parse::<SchemeId>().unwrap(), s);
        }
        assert!("median".parse::<SchemeId>().is_err());
    }
}
