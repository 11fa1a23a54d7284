use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{ModeBasis, NeckError};
use crate::linalg::svd_sorted;

/// Linear map from incoming to outgoing mode amplitudes at one end of the
/// neck, with a declared bound on its `ℓ²` operator norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapOperator {
    dim: usize,
    /// Row-major, `matrix[out * dim + in]`.
    matrix: Vec<f64>,
    bound: f64,
}

impl CapOperator {
    pub fn new(dim: usize, matrix: Vec<f64>, bound: f64) -> Result<Self, NeckError> {
        if matrix.len() != dim * dim {
            return Err(NeckError::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        if let Some(i) = matrix.iter().position(|a| !a.is_finite()) {
            return Err(NeckError::NotFinite(i));
        }
        let cap = CapOperator { dim, matrix, bound };
        let measured = cap.measured_norm();
        if !(measured <= bound) {
            return Err(NeckError::CapNormExceeded { measured, bound });
        }
        Ok(cap)
    }

    pub fn zero(basis: &ModeBasis) -> Self {
        let d = basis.dim();
        CapOperator {
            dim: d,
            matrix: vec![0.0; d * d],
            bound: 0.0,
        }
    }

    /// `s · I`.
    pub fn scaled_identity(basis: &ModeBasis, s: f64) -> Result<Self, NeckError> {
        Self::from_fn(basis, |i, j| if i == j { s } else { 0.0 }, s.abs())
    }

    /// Entry `(out, in)` given by `f(out, in)`.
    pub fn from_fn(basis: &ModeBasis, f: impl Fn(usize, usize) -> f64, bound: f64) -> Result<Self, NeckError> {
        let d = basis.dim();
        let matrix = (0..d * d).map(|k| f(k / d, k % d)).collect();
        Self::new(d, matrix, bound)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn entry(&self, out: usize, inp: usize) -> f64 {
        self.matrix[out * self.dim + inp]
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.matrix)
    }

    /// Largest singular value.
    pub fn measured_norm(&self) -> f64 {
        if self.dim == 0 {
            return 0.0;
        }
        svd_sorted(&self.to_dmatrix()).1[0]
    }

    /// The `(λ_in → λ_out)` block, rows indexed by outgoing amplitudes.
    pub fn block(&self, basis: &ModeBasis, lambda_in: f64, lambda_out: f64) -> Option<Vec<Vec<f64>>> {
        let ri = basis.range(lambda_in)?;
        let ro = basis.range(lambda_out)?;
        Some(ro.map(|o| ri.clone().map(|i| self.entry(o, i)).collect()).collect())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|o| (0..self.dim).map(|i| self.matrix[o * self.dim + i] * x[i]).sum())
            .collect()
    }

    /// Zeroes rows and columns with `mask[k] = false`.
    pub fn masked(&self, mask: &[bool]) -> Self {
        let d = self.dim;
        let matrix = (0..d * d)
            .map(|k| if mask[k / d] && mask[k % d] { self.matrix[k] } else { 0.0 })
            .collect();
        CapOperator {
            dim: d,
            matrix,
            bound: self.bound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_bound_is_enforced() {
        let b = ModeBasis::default_ladder();
        assert!(CapOperator::scaled_identity(&b, 0.5).is_ok());
        let e = CapOperator::from_fn(&b, |i, j| if i == j { 2.0 } else { 0.0 }, 1.0).unwrap_err();
        assert!(matches!(e, NeckError::CapNormExceeded { .. }));
    }

    #[test]
    fn blocks_follow_ladder() {
        let b = ModeBasis::default_ladder();
        let c = CapOperator::from_fn(&b, |o, i| (10 * o + i) as f64, 1e3).unwrap();
        let blk = c.block(&b, 2.0, 3.0).unwrap();
        assert_eq!(blk[0], vec![30.0, 31.0, 32.0]);
        assert_eq!(blk.len(), 3);
    }
}
