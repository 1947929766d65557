use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::geometry::Polytope;
use super::lattice::FaceLattice;
use crate::linalg::C64;

/// `Re( sum_k a_k z_k + b_k (z_k - c_k)^2 )`, pluriharmonic on `C^N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoloQuadratic {
    pub a: Vec<(f64, f64)>,
    pub b: Vec<(f64, f64)>,
    pub c: Vec<(f64, f64)>,
}

struct RealQuadratic {
    h: DMatrix<f64>,
    g: DVector<f64>,
    k: f64,
}

impl RealQuadratic {
    fn eval(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.h * x)) + self.g.dot(x) + self.k
    }
}

impl HoloQuadratic {
    pub fn eval(&self, x: &[f64]) -> f64 {
        (0..self.a.len())
            .map(|k| {
                let z = C64::new(x[2 * k], x[2 * k + 1]);
                let a = C64::new(self.a[k].0, self.a[k].1);
                let b = C64::new(self.b[k].0, self.b[k].1);
                let c = C64::new(self.c[k].0, self.c[k].1);
                (a * z + b * (z - c) * (z - c)).re
            })
            .sum()
    }

    fn real_form(&self) -> RealQuadratic {
        let n = self.a.len();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        let mut g = DVector::zeros(2 * n);
        let mut k = 0.0;
        for j in 0..n {
            let (x, y) = (2 * j, 2 * j + 1);
            let (a1, a2) = self.a[j];
            let (b1, b2) = self.b[j];
            let (cx, cy) = self.c[j];
            // Re(b w^2) = b1 (X^2 - Y^2) - 2 b2 X Y with X = x - cx, Y = y - cy
            h[(x, x)] += 2.0 * b1;
            h[(y, y)] -= 2.0 * b1;
            h[(x, y)] -= 2.0 * b2;
            h[(y, x)] -= 2.0 * b2;
            g[x] += a1 - 2.0 * b1 * cx + 2.0 * b2 * cy;
            g[y] += -a2 + 2.0 * b1 * cy + 2.0 * b2 * cx;
            k += b1 * (cx * cx - cy * cy) - 2.0 * b2 * cx * cy;
        }
        RealQuadratic { h, g, k }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub function: HoloQuadratic,
    pub max_boundary: f64,
    pub max_shilov: f64,
    /// Face where the boundary maximum is attained.
    pub argmax_face: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExposureReport {
    pub trials: usize,
    pub violations: Vec<Violation>,
}

impl ExposureReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Max of `u` over the relative interior critical points of the face and
/// its vertices.
fn face_max(poly: &Polytope, lattice: &FaceLattice, u: &RealQuadratic, face: usize) -> f64 {
    let f = lattice.face(face);
    let verts = lattice.vertices();
    let mut best = f
        .vertices
        .iter()
        .map(|&v| u.eval(&DVector::from_column_slice(&verts[v])))
        .fold(f64::NEG_INFINITY, f64::max);
    if f.dim == 0 {
        return best;
    }
    let b = &f.basis;
    let x0 = DVector::from_column_slice(&verts[f.vertices[0]]);
    let m = b.transpose() * &u.h * b;
    let rhs = -(b.transpose() * (&u.h * &x0 + &u.g));
    let top = crate::linalg::singular_values(&m).first().copied().unwrap_or(0.0);
    let a = crate::linalg::pseudo_solve(&m, &rhs, 1e-12 * top.max(1.0));
    if (&m * &a - &rhs).norm() > 1e-9 * rhs.norm().max(1.0) {
        return best;
    }
    let x = &x0 + b * a;
    let tol = poly.tolerance();
    let inside = poly.facets().iter().all(|fc| {
        let s = fc.slack(x.as_slice());
        if super::lattice::is_subset(&f.vertices, &fc.vertices) {
            s.abs() <= 1e3 * tol
        } else {
            s > tol
        }
    });
    if inside {
        best = best.max(u.eval(&x));
    }
    best
}

fn random_function(poly: &Polytope, rng: &mut ChaCha8Rng, linear_only: bool) -> HoloQuadratic {
    let n = poly.complex_dim();
    let verts = poly.vertices();
    let bounds = |i: usize| {
        verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v[i]), hi.max(v[i]))
        })
    };
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut c = Vec::with_capacity(n);
    for k in 0..n {
        let scale = if linear_only { 1.0 } else { 0.3 };
        a.push((scale * rng.random_range(-1.0..1.0), scale * rng.random_range(-1.0..1.0)));
        if linear_only {
            b.push((0.0, 0.0));
            c.push((0.0, 0.0));
        } else {
            let r: f64 = rng.random_range(0.5..2.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            b.push((r * phi.cos(), r * phi.sin()));
            let (xl, xh) = bounds(2 * k);
            let (yl, yh) = bounds(2 * k + 1);
            c.push((rng.random_range(xl..=xh), rng.random_range(yl..=yh)));
        }
    }
    HoloQuadratic { a, b, c }
}

/// Checks that random pluriharmonic test functions attain their boundary
/// maximum on the closed union of `shilov_faces`.
///
/// Even trials use real parts of complex-linear functionals, odd trials add
/// a holomorphic quadratic term so that maxima can sit inside faces.
pub fn linear_exposure_oracle(
    poly: &Polytope,
    lattice: &FaceLattice,
    shilov_faces: &[usize],
    trials: usize,
    seed: u64,
) -> ExposureReport {
    let proper: Vec<usize> = lattice.proper().collect();
    let violations = (0..trials)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(trial as u64));
            let function = random_function(poly, &mut rng, trial % 2 == 0);
            let u = function.real_form();
            let mut max_boundary = f64::NEG_INFINITY;
            let mut argmax_face = proper[0];
            for &f in &proper {
                let v = face_max(poly, lattice, &u, f);
                if v > max_boundary {
                    max_boundary = v;
                    argmax_face = f;
                }
            }
            let max_shilov = shilov_faces
                .iter()
                .map(|&f| face_max(poly, lattice, &u, f))
                .fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-9 * max_boundary.abs().max(1.0);
            (max_shilov < max_boundary - tol).then_some(Violation {
                trial,
                function,
                max_boundary,
                max_shilov,
                argmax_face,
            })
        })
        .collect();
    ExposureReport { trials, violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_form_matches_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = crate::polytope::product(
            &crate::polytope::unit_square(),
            &crate::polytope::standard_triangle(),
        )
        .unwrap();
        for linear in [true, false] {
            let f = random_function(&p, &mut rng, linear);
            let r = f.real_form();
            for _ in 0..10 {
                let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
                let v = r.eval(&DVector::from_column_slice(&x));
                assert!((v - f.eval(&x)).abs() < 1e-12);
            }
        }
    }
}
