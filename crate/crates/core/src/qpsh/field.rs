use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;

use super::NumericError;
use crate::linalg::C64;

/// A point of `C^N` stored as `(x_1, y_1, ..., x_N, y_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CPoint(Vec<f64>);

impl CPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, NumericError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(NumericError::BadPoint(format!(
                "expected 2N > 0 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(v) = coords.iter().find(|v| !v.is_finite()) {
            return Err(NumericError::BadPoint(format!("non-finite coordinate {v}")));
        }
        Ok(CPoint(coords))
    }

    pub fn from_complex(z: &[C64]) -> Result<Self, NumericError> {
        Self::new(crate::linalg::complex_to_real(z))
    }

    pub fn origin(n: usize) -> Self {
        CPoint(vec![0.0; 2 * n])
    }

    pub fn complex_dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn z(&self, k: usize) -> C64 {
        C64::new(self.0[2 * k], self.0[2 * k + 1])
    }

    pub fn to_complex(&self) -> Vec<C64> {
        crate::linalg::real_to_complex(&self.0)
    }
}

/// Values a field may take: real for `u`, complex for `f`.
pub trait FieldValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn zero() -> Self;
    fn is_finite_value(&self) -> bool;
    fn to_complex(self) -> C64;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
}

impl FieldValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_complex(self) -> C64 {
        self
    }
}

/// Axis-aligned bounds on the real coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn cube(center: &[f64], half_width: f64) -> Self {
        DomainBox {
            lo: center.iter().map(|c| c - half_width).collect(),
            hi: center.iter().map(|c| c + half_width).collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    /// Second-order central differences.
    Central,
    /// Central differences at `h` and `h/2` combined to fourth order.
    Richardson,
}

pub const DEFAULT_STEP: f64 = 1e-3;

type Evaluator<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// A function on (a box in) `C^N` with its finite-difference settings.
pub struct Field<T: FieldValue> {
    complex_dim: usize,
    eval: Evaluator<T>,
    pub step: f64,
    pub stencil: Stencil,
    pub domain: Option<DomainBox>,
}

pub type ScalarField = Field<f64>;
pub type ComplexScalarField = Field<C64>;

impl<T: FieldValue> Clone for Field<T> {
    fn clone(&self) -> Self {
        Field {
            complex_dim: self.complex_dim,
            eval: Arc::clone(&self.eval),
            step: self.step,
            stencil: self.stencil,
            domain: self.domain.clone(),
        }
    }
}

impl<T: FieldValue> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("complex_dim", &self.complex_dim)
            .field("step", &self.step)
            .field("stencil", &self.stencil)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<T: FieldValue> Field<T> {
    /// A field on `C^n` evaluated on real coordinates `(x_1, y_1, ...)`.
    pub fn new(n: usize, eval: impl Fn(&[f64]) -> T + Send + Sync + 'static) -> Self {
        Field {
            complex_dim: n,
            eval: Arc::new(eval),
            step: DEFAULT_STEP,
            stencil: Stencil::Central,
            domain: None,
        }
    }

    pub fn with_step(mut self, h: f64) -> Self {
        assert!(h > 0.0, "step must be positive");
        self.step = h;
        self
    }

    pub fn with_stencil(mut self, s: Stencil) -> Self {
        self.stencil = s;
        self
    }

    pub fn with_domain(mut self, d: DomainBox) -> Self {
        self.domain = Some(d);
        self
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    /// Raw evaluation without domain or finiteness checks.
    pub fn eval_raw(&self, x: &[f64]) -> T {
        (self.eval)(x)
    }

    pub fn eval(&self, z: &CPoint) -> Result<T, NumericError> {
        self.check_dim(z)?;
        self.eval_checked(z.coords())
    }

    fn check_dim(&self, z: &CPoint) -> Result<(), NumericError> {
        if z.complex_dim() != self.complex_dim {
            return Err(NumericError::DimensionMismatch {
                expected: self.complex_dim,
                got: z.complex_dim(),
            });
        }
        Ok(())
    }

    fn eval_checked(&self, x: &[f64]) -> Result<T, NumericError> {
        let v = (self.eval)(x);
        if v.is_finite_value() {
            Ok(v)
        } else {
            Err(NumericError::Evaluation(x.to_vec()))
        }
    }

    fn check_stencil(&self, z: &CPoint, reach: f64) -> Result<(), NumericError> {
        if let Some(d) = &self.domain {
            let lo: Vec<f64> = z.coords().iter().map(|v| v - reach).collect();
            let hi: Vec<f64> = z.coords().iter().map(|v| v + reach).collect();
            if !d.contains(&lo) || !d.contains(&hi) {
                return Err(NumericError::OutsideDomain(z.coords().to_vec()));
            }
        }
        Ok(())
    }

    fn shifted(&self, x: &[f64], moves: &[(usize, f64)]) -> Result<T, NumericError> {
        let mut y = x.to_vec();
        for &(i, d) in moves {
            y[i] += d;
        }
        self.eval_checked(&y)
    }

    fn gradient_at_step(&self, x: &[f64], h: f64) -> Result<Vec<T>, NumericError> {
        (0..x.len())
            .map(|i| {
                let p = self.shifted(x, &[(i, h)])?;
                let m = self.shifted(x, &[(i, -h)])?;
                Ok((p - m) * (0.5 / h))
            })
            .collect()
    }

    fn hessian_at_step(&self, x: &[f64], h: f64) -> Result<Vec<Vec<T>>, NumericError> {
        let d = x.len();
        let c = self.eval_checked(x)?;
        let mut out = vec![vec![T::zero(); d]; d];
        for i in 0..d {
            let p = self.shifted(x, &[(i, h)])?;
            let m = self.shifted(x, &[(i, -h)])?;
            out[i][i] = (p + m - c * 2.0) * (1.0 / (h * h));
            for j in (i + 1)..d {
                let pp = self.shifted(x, &[(i, h), (j, h)])?;
                let pm = self.shifted(x, &[(i, h), (j, -h)])?;
                let mp = self.shifted(x, &[(i, -h), (j, h)])?;
                let mm = self.shifted(x, &[(i, -h), (j, -h)])?;
                let v = (pp - pm - mp + mm) * (0.25 / (h * h));
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        Ok(out)
    }

    /// Real gradient with respect to `(x_1, y_1, ...)`.
    pub fn real_gradient(&self, z: &CPoint) -> Result<Vec<T>, NumericError> {
        self.check_dim(z)?;
        self.check_stencil(z, self.step)?;
        let h = self.step;
        let coarse = self.gradient_at_step(z.coords(), h)?;
        match self.stencil {
            Stencil::Central => Ok(coarse),
            Stencil::Richardson => {
                let fine = self.gradient_at_step(z.coords(), h / 2.0)?;
                Ok(fine
                    .into_iter()
                    .zip(coarse)
                    .map(|(f, c)| (f * 4.0 - c) * (1.0 / 3.0))
                    .collect())
            }
        }
    }

    /// Real Hessian with respect to `(x_1, y_1, ...)`.
    pub fn real_hessian(&self, z: &CPoint) -> Result<Vec<Vec<T>>, NumericError> {
        self.check_dim(z)?;
        self.check_stencil(z, self.step)?;
        let h = self.step;
        let coarse = self.hessian_at_step(z.coords(), h)?;
        match self.stencil {
            Stencil::Central => Ok(coarse),
            Stencil::Richardson => {
                let fine = self.hessian_at_step(z.coords(), h / 2.0)?;
                Ok(fine
                    .into_iter()
                    .zip(coarse)
                    .map(|(fr, cr)| {
                        fr.into_iter()
                            .zip(cr)
                            .map(|(f, c)| (f * 4.0 - c) * (1.0 / 3.0))
                            .collect()
                    })
                    .collect())
            }
        }
    }

    /// `(f_{z_1}, ..., f_{z_N})`.
    pub fn dz(&self, z: &CPoint) -> Result<Vec<C64>, NumericError> {
        let g = self.real_gradient(z)?;
        Ok((0..self.complex_dim)
            .map(|k| (g[2 * k].to_complex() - g[2 * k + 1].to_complex() * C64::i()) * 0.5)
            .collect())
    }

    /// `(f_{zbar_1}, ..., f_{zbar_N})`.
    pub fn dzbar(&self, z: &CPoint) -> Result<Vec<C64>, NumericError> {
        let g = self.real_gradient(z)?;
        Ok((0..self.complex_dim)
            .map(|k| (g[2 * k].to_complex() + g[2 * k + 1].to_complex() * C64::i()) * 0.5)
            .collect())
    }

    /// The matrix `(f_{z_k zbar_l})` before any symmetrization.
    pub fn levi_matrix(&self, z: &CPoint) -> Result<DMatrix<C64>, NumericError> {
        let r = self.real_hessian(z)?;
        let n = self.complex_dim;
        let at = |i: usize, j: usize| r[i][j].to_complex();
        Ok(DMatrix::from_fn(n, n, |k, l| {
            let (xk, yk, xl, yl) = (2 * k, 2 * k + 1, 2 * l, 2 * l + 1);
            ((at(xk, xl) + at(yk, yl)) + (at(xk, yl) - at(yk, xl)) * C64::i()) * 0.25
        }))
    }
}
