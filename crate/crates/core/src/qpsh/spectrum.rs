use nalgebra::DMatrix;
use serde::Serialize;

use super::NumericError;
use crate::linalg::C64;

/// Eigen-summary of a Hermitian matrix under a zero tolerance.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub matrix: DMatrix<C64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` belongs to `eigenvalues[i]`.
    pub eigenvectors: DMatrix<C64>,
    pub tol: f64,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SpectrumSummary {
    pub eigenvalues: Vec<f64>,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl HermitianSpectrum {
    /// Symmetrizes `m` as `(m + m*)/2` and decomposes it.
    pub fn new(m: &DMatrix<C64>, tol: f64) -> Result<Self, NumericError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(NumericError::BadTolerance(tol));
        }
        assert!(m.is_square(), "Hermitian spectrum of a non-square matrix");
        let matrix = (m + m.adjoint()) * C64::new(0.5, 0.0);
        let n = matrix.nrows();
        if n == 0 {
            return Ok(HermitianSpectrum {
                matrix,
                eigenvalues: vec![],
                eigenvectors: DMatrix::zeros(0, 0),
                tol,
                negative: 0,
                zero: 0,
                positive: 0,
            });
        }
        let eig = matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let negative = eigenvalues.iter().filter(|&&e| e < -tol).count();
        let positive = eigenvalues.iter().filter(|&&e| e > tol).count();
        Ok(HermitianSpectrum {
            matrix,
            eigenvalues,
            eigenvectors,
            tol,
            negative,
            zero: n - negative - positive,
            positive,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `k`-th largest eigenvalue, 1-based.
    pub fn kth_largest(&self, k: usize) -> Option<f64> {
        let n = self.dim();
        (1..=n).contains(&k).then(|| self.eigenvalues[n - k])
    }

    pub fn count_above(&self, delta: f64) -> usize {
        self.eigenvalues.iter().filter(|&&e| e > delta).count()
    }

    pub fn summary(&self) -> SpectrumSummary {
        SpectrumSummary {
            eigenvalues: self.eigenvalues.clone(),
            negative: self.negative,
            zero: self.zero,
            positive: self.positive,
        }
    }
}
