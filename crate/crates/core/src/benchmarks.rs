//! Rosenbrock, Griewank and Zakharov test functions.
//!
//! Indices in the Griewank cosine product and the Zakharov weighted sum are
//! 1-based: coordinate `x[0]` carries weight `i = 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::space::Bounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchmarkKind {
    Rosenbrock,
    Griewank,
    Zakharov,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 3] = [Self::Rosenbrock, Self::Griewank, Self::Zakharov];

    pub fn name(self) -> &'static str {
        match self {
            Self::Rosenbrock => "rosenbrock",
            Self::Griewank => "griewank",
            Self::Zakharov => "zakharov",
        }
    }

    pub fn min_dimension(self) -> usize {
        match self {
            Self::Rosenbrock => 2,
            Self::Griewank | Self::Zakharov => 1,
        }
    }

    /// Conventional search interval, applied to every coordinate.
    pub fn default_interval(self) -> (f64, f64) {
        match self {
            Self::Rosenbrock | Self::Zakharov => (-5.0, 10.0),
            Self::Griewank => (-600.0, 600.0),
        }
    }

    /// The global minimizer in dimension `dim`.
    pub fn minimizer(self, dim: usize) -> Vec<f64> {
        match self {
            Self::Rosenbrock => vec![1.0; dim],
            Self::Griewank | Self::Zakharov => vec![0.0; dim],
        }
    }

    /// Unchecked evaluation; callers guarantee the dimension precondition.
    #[inline]
    fn eval(self, x: &[f64]) -> f64 {
        match self {
            Self::Rosenbrock => rosenbrock_unchecked(x),
            Self::Griewank => griewank_unchecked(x),
            Self::Zakharov => zakharov_unchecked(x),
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown benchmark '{s}'")))
    }
}

/// A benchmark function bound to a dimension and search box.
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    kind: BenchmarkKind,
    bounds: Bounds,
    label: String,
}

impl BenchmarkSpec {
    /// Benchmark with its default search interval.
    pub fn new(kind: BenchmarkKind, dim: usize) -> Result<Self> {
        let (lo, hi) = kind.default_interval();
        Self::with_interval(kind, dim, lo, hi)
    }

    pub fn with_interval(kind: BenchmarkKind, dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim < kind.min_dimension() {
            return Err(Error::Parameter(format!(
                "{kind} needs dimension >= {}, got {dim}",
                kind.min_dimension()
            )));
        }
        Ok(Self {
            kind,
            bounds: Bounds::uniform(dim, lo, hi)?,
            label: format!("{kind}-{dim}d"),
        })
    }

    pub fn kind(&self) -> BenchmarkKind {
        self.kind
    }

    /// Global minimum value (zero for all three functions).
    pub fn optimum(&self) -> f64 {
        0.0
    }
}

impl Objective for BenchmarkSpec {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    #[inline]
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.kind.eval(x)
    }

    fn name(&self) -> &str {
        &self.label
    }
}

/// `Σ_{i=1}^{D-1} [100 (x_{i+1} - x_i²)² + (x_i - 1)²]`; needs `D >= 2`.
pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: x.len(),
        });
    }
    Ok(rosenbrock_unchecked(x))
}

/// `Σ x_i²/4000 - Π cos(x_i / √i) + 1`.
pub fn griewank(x: &[f64]) -> f64 {
    griewank_unchecked(x)
}

/// `Σ x_i² + (Σ 0.5 i x_i)² + (Σ 0.5 i x_i)⁴`.
pub fn zakharov(x: &[f64]) -> f64 {
    zakharov_unchecked(x)
}

#[inline]
fn rosenbrock_unchecked(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum()
}

#[inline]
fn griewank_unchecked(x: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, v) in x.iter().enumerate() {
        sum += v * v;
        prod *= (v / ((i + 1) as f64).sqrt()).cos();
    }
    sum / 4000.0 - prod + 1.0
}

#[inline]
fn zakharov_unchecked(x: &[f64]) -> f64 {
    let mut sq = 0.0;
    let mut weighted = 0.0;
    for (i, v) in x.iter().enumerate() {
        sq += v * v;
        weighted += 0.5 * (i + 1) as f64 * v;
    }
    let w2 = weighted * weighted;
    sq + w2 + w2 * w2
}
