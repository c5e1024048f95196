use crate::error::{check_dimension, Result};
use crate::space::{Bounds, EvaluatedSolution, SolutionVector};

/// A box-constrained minimization problem.
///
/// `evaluate` must be deterministic and callable from several threads at
/// once; optimizers stepping in parallel share one objective.
pub trait Objective: Sync {
    fn bounds(&self) -> &Bounds;

    /// Objective value at `x`; `x.len()` equals `dimension()`.
    fn evaluate(&self, x: &[f64]) -> f64;

    fn dimension(&self) -> usize {
        self.bounds().dimension()
    }

    fn name(&self) -> &str {
        "objective"
    }

    /// Checked evaluation producing an [`EvaluatedSolution`].
    fn evaluate_solution(&self, x: SolutionVector) -> Result<EvaluatedSolution> {
        check_dimension(self.dimension(), x.dimension())?;
        let fitness = self.evaluate(&x);
        EvaluatedSolution::new(x, fitness)
    }
}

/// Adapts a closure into an [`Objective`].
pub struct FnObjective<F> {
    bounds: Bounds,
    name: String,
    f: F,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(name: impl Into<String>, bounds: Bounds, f: F) -> Self {
        Self {
            bounds,
            name: name.into(),
            f,
        }
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// Replaces non-finite objective values so that stored fitnesses stay
/// finite and comparable.
#[inline]
pub(crate) fn sanitize(value: f64) -> f64 {
    if value.is_nan() {
        f64::MAX
    } else {
        value.clamp(f64::MIN, f64::MAX)
    }
}
