/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; zero for a single sample.
    pub se: f64,
    pub samples: usize,
}

impl ErrorStats {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, samples: 0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Self { mean, se, samples: n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_standard_error() {
        let s = ErrorStats::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        // sample variance 5/3, se = sqrt(5/12)
        assert!((s.se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(ErrorStats::from_samples(&[7.0]).se, 0.0);
    }
}
