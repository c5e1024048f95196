//! Search-space primitives: candidate vectors, box bounds and evaluated
//! solutions.

use std::ops::Deref;

use crate::error::{check_dimension, Error, Result};
use crate::rng::RngStream;

/// A point in the search space. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVector(Vec<f64>);

impl SolutionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite coordinate {} at index {i}",
                values[i]
            )));
        }
        Ok(Self(values))
    }

    /// Wraps values the caller already knows to be finite.
    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SolutionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Axis-aligned box `[lower[d], upper[d]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dimension(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::Parameter("bounds must have dimension >= 1".into()));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Parameter(format!("non-finite bound at index {d}")));
            }
            if lo > hi {
                return Err(Error::Parameter(format!(
                    "lower bound {lo} exceeds upper bound {hi} at index {d}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` in every coordinate.
    pub fn uniform(dimension: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dimension], vec![hi; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `upper[d] - lower[d]`.
    pub fn width(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    pub fn widths(&self) -> Vec<f64> {
        (0..self.dimension()).map(|d| self.width(d)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    /// Projects `x` into the box in place. Non-finite entries go to the
    /// nearest bound (NaN goes to the lower bound).
    #[inline]
    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = if v.is_nan() { *lo } else { v.clamp(*lo, *hi) };
        }
    }
}

/// Projects each coordinate of `x` into `[lower[d], upper[d]]`.
pub fn clamp_to_bounds(x: &SolutionVector, bounds: &Bounds) -> Result<SolutionVector> {
    check_dimension(bounds.dimension(), x.dimension())?;
    let mut values = x.0.clone();
    bounds.clamp_in_place(&mut values);
    Ok(SolutionVector(values))
}

/// Each coordinate drawn independently and uniformly from its interval.
pub fn uniform_random_solution(bounds: &Bounds, rng: &mut RngStream) -> SolutionVector {
    SolutionVector(random_point(bounds, rng))
}

pub(crate) fn random_point(bounds: &Bounds, rng: &mut RngStream) -> Vec<f64> {
    bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(lo, hi)| rng.uniform_in(*lo, *hi))
        .collect()
}

/// A position together with its objective value (lower is better).
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSolution {
    pub position: SolutionVector,
    pub fitness: f64,
}

impl EvaluatedSolution {
    pub fn new(position: SolutionVector, fitness: f64) -> Result<Self> {
        if !fitness.is_finite() {
            return Err(Error::Parameter(format!("non-finite fitness {fitness}")));
        }
        Ok(Self { position, fitness })
    }

    pub(crate) fn from_parts(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            position: SolutionVector::from_finite(position),
            fitness,
        }
    }

    pub fn dimension(&self) -> usize {
        self.position.dimension()
    }
}
