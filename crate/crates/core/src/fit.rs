//! Log-linear fits of decay laws `norm ≈ e^{intercept + slope·T}`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::linear_fit;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("non-positive norm {norm} at T = {t}")]
    NonPositiveNorm { t: f64, norm: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitReport {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of `log norm` about the fitted line.
    pub residual: f64,
}

impl DecayFitReport {
    pub fn predicted(&self, t: f64) -> f64 {
        libm::exp(self.intercept + self.slope * t)
    }
}

/// Least-squares line through `(T, log norm)`.
pub fn fit_decay_rate(samples: &[(f64, f64)]) -> Result<DecayFitReport, FitError> {
    if samples.len() < 4 {
        return Err(FitError::TooFewSamples(samples.len()));
    }
    if let Some(&(t, norm)) = samples.iter().find(|(_, n)| !(*n > 0.0) || !n.is_finite()) {
        return Err(FitError::NonPositiveNorm { t, norm });
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| libm::log(s.1)).collect();
    let (slope, intercept, residual) = linear_fit(&xs, &ys);
    Ok(DecayFitReport {
        samples: samples.to_vec(),
        slope,
        intercept,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_exponential() {
        let s: Vec<(f64, f64)> = (4..=12).map(|t| (t as f64, libm::exp(-2.0 * t as f64))).collect();
        let r = fit_decay_rate(&s).unwrap();
        assert!((r.slope + 2.0).abs() < 1e-12);
        assert!(r.intercept.abs() < 1e-10);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let s = vec![(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)];
        assert_eq!(fit_decay_rate(&s).unwrap_err(), FitError::NonPositiveNorm { t: 2.0, norm: 0.0 });
        assert_eq!(fit_decay_rate(&s[..3]).unwrap_err(), FitError::TooFewSamples(3));
    }
}
