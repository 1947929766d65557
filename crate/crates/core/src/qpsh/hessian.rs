use nalgebra::DMatrix;

use super::field::{CPoint, Field, FieldValue, ScalarField};
use super::spectrum::HermitianSpectrum;
use super::NumericError;
use crate::linalg::C64;

pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Spectrum of `(u_{z_k zbar_l})` at `z`.
pub fn complex_hessian(
    u: &ScalarField,
    z: &CPoint,
    tol: f64,
) -> Result<HermitianSpectrum, NumericError> {
    HermitianSpectrum::new(&u.levi_matrix(z)?, tol)
}

/// Largest entry of `H - H*` for the raw finite-difference Hessian.
pub fn hermitian_defect(u: &ScalarField, z: &CPoint) -> Result<f64, NumericError> {
    let h = u.levi_matrix(z)?;
    Ok((&h - h.adjoint()).iter().map(|e| e.norm()).fold(0.0, f64::max))
}

/// Number of eigenvalues below `-tau`: the least `q` for which `u` passes
/// the Hessian test for q-plurisubharmonicity at `z`.
pub fn qpsh_index(u: &ScalarField, z: &CPoint, tau: f64) -> Result<usize, NumericError> {
    Ok(complex_hessian(u, z, tau)?.negative)
}

/// The `(N-q)`-th largest eigenvalue exceeds `delta`. Always true for `q >= N`.
pub fn strictly_qpsh(
    u: &ScalarField,
    z: &CPoint,
    q: usize,
    delta: f64,
) -> Result<bool, NumericError> {
    let n = u.complex_dim();
    if q >= n {
        return Ok(true);
    }
    let s = complex_hessian(u, z, delta.abs().max(f64::MIN_POSITIVE))?;
    Ok(s.kth_largest(n - q).is_some_and(|e| e > delta))
}

/// `(N+1) x N`: the row `f_{zbar}` above `(f_{z_k zbar_l})`.
pub fn bordered_matrix<T: FieldValue>(
    f: &Field<T>,
    z: &CPoint,
) -> Result<DMatrix<C64>, NumericError> {
    let n = f.complex_dim();
    let top = f.dzbar(z)?;
    let hess = f.levi_matrix(z)?;
    Ok(DMatrix::from_fn(n + 1, n, |r, c| {
        if r == 0 {
            top[c]
        } else {
            hess[(r - 1, c)]
        }
    }))
}

/// Numeric rank of the bordered matrix: singular values above
/// `tau * max(sigma_max, 1)`.
pub fn qholo_rank<T: FieldValue>(
    f: &Field<T>,
    z: &CPoint,
    tau: f64,
) -> Result<usize, NumericError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(NumericError::BadTolerance(tau));
    }
    let m = bordered_matrix(f, z)?;
    let sv = crate::linalg::complex_singular_values(&m);
    let cut = tau * sv.first().copied().unwrap_or(0.0).max(1.0);
    Ok(sv.iter().filter(|&&s| s > cut).count())
}
