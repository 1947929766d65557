//! Small dense linear-algebra helpers shared by the geometric modules.

use faer::{c64, Mat};
use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Singular values of `m`, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let f = Mat::<f64>::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)]);
    let mut s = f.singular_values().expect("svd converges");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular values of a complex matrix, descending.
pub fn complex_singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let f = Mat::<c64>::from_fn(m.nrows(), m.ncols(), |r, c| c64::new(m[(r, c)].re, m[(r, c)].im));
    let mut s = f.singular_values().expect("svd converges");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Rank counting singular values above `rel_tol * sigma_max`.
pub fn numeric_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * top).count()
}

/// Thin SVD of `m` with zero rows appended so that the right factor is square.
fn padded_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let rows = m.nrows().max(m.ncols());
    let cols = m.ncols();
    let f = Mat::<f64>::from_fn(rows, cols, |r, c| if r < m.nrows() { m[(r, c)] } else { 0.0 });
    let svd = f.thin_svd().expect("svd converges");
    let u = DMatrix::from_fn(rows, cols, |r, c| svd.U()[(r, c)]);
    let v = DMatrix::from_fn(cols, cols, |r, c| svd.V()[(r, c)]);
    let s = (0..cols).map(|i| svd.S()[i]).collect();
    (u, s, v)
}

/// Minimum-norm least-squares solution of `m x = rhs`, treating singular
/// values at or below `tol` as zero.
pub fn pseudo_solve(m: &DMatrix<f64>, rhs: &DVector<f64>, tol: f64) -> DVector<f64> {
    let (u, s, v) = padded_svd(m);
    let mut x = DVector::zeros(m.ncols());
    for (i, &si) in s.iter().enumerate() {
        if si > tol {
            let coeff = (0..m.nrows()).map(|r| u[(r, i)] * rhs[r]).sum::<f64>() / si;
            x += v.column(i) * coeff;
        }
    }
    x
}

fn pick_columns(src: &DMatrix<f64>, rows: usize, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows, keep.len(), |r, c| src[(r, keep[c])])
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let (u, s, _) = padded_svd(m);
    let top = s.iter().copied().fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| top > 0.0 && s[i] > rel_tol * top).collect();
    pick_columns(&u, rows, &keep)
}

/// Orthonormal basis (as columns) of the null space of `m`, dropping
/// singular values above `rel_tol * sigma_max`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let top = singular_values(m).first().copied().unwrap_or(0.0);
    null_space_abs(m, rel_tol * top)
}

/// As [`null_space`] with an absolute cut-off.
pub fn null_space_abs(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    let (_, s, v) = padded_svd(m);
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= tol).collect();
    pick_columns(&v, cols, &keep)
}

/// The complex structure `(x, y) -> (-y, x)` on each coordinate pair.
pub fn apply_j(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

pub fn apply_j_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        out.set_column(c, &apply_j(&m.column(c).into_owned()));
    }
    out
}

pub fn real_to_complex(v: &[f64]) -> Vec<C64> {
    v.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

pub fn complex_to_real(v: &[C64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn cdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn cnorm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram–Schmidt over `C`, keeping vectors whose residual norm exceeds `tol`.
pub fn complex_orthonormalize(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = cdot(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let n = cnorm(&w);
        if n > tol {
            basis.push(w.into_iter().map(|z| z / n).collect());
        }
    }
    basis
}

/// Angle between the complex lines spanned by `a` and `b`.
pub fn complex_line_angle(a: &[C64], b: &[C64]) -> f64 {
    let c = cdot(a, b).norm() / (cnorm(a) * cnorm(b));
    c.clamp(0.0, 1.0).acos()
}
