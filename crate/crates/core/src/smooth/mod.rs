//! Levi-form analysis of smoothly bounded domains `{rho < 0}`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dimension::{DimensionError, PointCloud};
use crate::linalg::{complex_orthonormalize, C64};
use crate::qpsh::{CPoint, DomainBox, HermitianSpectrum, NumericError, ScalarField};
use crate::qrng::QuasiRandom;

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-10;
pub const DEFAULT_GRADIENT_FLOOR: f64 = 1e-6;
pub const DEFAULT_DELTA: f64 = 1e-4;
/// Largest tolerated fraction of rays that fail to bracket the boundary.
pub const MAX_SKIP_FRACTION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmoothError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("interior seed has rho = {0}; must be negative")]
    BadSeed(f64),
    #[error("interior seed lies outside the bounding box")]
    SeedOutsideBox,
    #[error("gradient norm {norm} below the floor {floor} at {point:?}")]
    Degenerate { point: Vec<f64>, norm: f64, floor: f64 },
    #[error("{skipped} of {count} rays failed to bracket the boundary")]
    Sampling { skipped: usize, count: usize },
    #[error("Levi spectrum {eigenvalues:?} does not have {positive} eigenvalues above {delta} and {zero} near zero")]
    Profile { eigenvalues: Vec<f64>, positive: usize, zero: usize, delta: f64 },
    #[error("q = {q} exceeds N - 1 = {max}")]
    BadQ { q: usize, max: usize },
    #[error(transparent)]
    Cloud(#[from] DimensionError),
}

/// Draws boundary point number `n`; `None` counts as a skip.
pub type ParametricSampler = Arc<dyn Fn(u64, &QuasiRandom) -> Option<Vec<f64>> + Send + Sync>;

#[derive(Clone)]
pub struct DefiningDomain {
    pub name: String,
    pub rho: ScalarField,
    pub interior_seed: CPoint,
    pub bounding_box: DomainBox,
    pub boundary_tol: f64,
    pub gradient_floor: f64,
    /// Relative threshold for positive Levi eigenvalues.
    pub delta: f64,
    sampler: Option<(usize, ParametricSampler)>,
}

impl std::fmt::Debug for DefiningDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DefiningDomain")
            .field("name", &self.name)
            .field("interior_seed", &self.interior_seed)
            .field("bounding_box", &self.bounding_box)
            .field("boundary_tol", &self.boundary_tol)
            .field("gradient_floor", &self.gradient_floor)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}

impl DefiningDomain {
    pub fn new(
        name: impl Into<String>,
        rho: ScalarField,
        interior_seed: CPoint,
        bounding_box: DomainBox,
    ) -> Result<Self, SmoothError> {
        let v = rho.eval(&interior_seed)?;
        if !(v < 0.0) {
            return Err(SmoothError::BadSeed(v));
        }
        if !bounding_box.contains(interior_seed.coords()) {
            return Err(SmoothError::SeedOutsideBox);
        }
        Ok(DefiningDomain {
            name: name.into(),
            rho,
            interior_seed,
            bounding_box,
            boundary_tol: DEFAULT_BOUNDARY_TOL,
            gradient_floor: DEFAULT_GRADIENT_FLOOR,
            delta: DEFAULT_DELTA,
            sampler: None,
        })
    }

    /// Replaces ray casting by a direct parametrisation of the zero set;
    /// `dim` is the dimension of the quasi-random points it receives.
    pub fn with_sampler(mut self, dim: usize, sampler: ParametricSampler) -> Self {
        self.sampler = Some((dim, sampler));
        self
    }

    pub fn complex_dim(&self) -> usize {
        self.rho.complex_dim()
    }

    fn ray(&self, dir: &[f64]) -> Option<Vec<f64>> {
        let s = self.interior_seed.coords();
        let b = &self.bounding_box;
        let t_exit = dir
            .iter()
            .enumerate()
            .filter(|(_, d)| d.abs() > 1e-300)
            .map(|(k, &d)| if d > 0.0 { (b.hi[k] - s[k]) / d } else { (b.lo[k] - s[k]) / d })
            .fold(f64::INFINITY, f64::min);
        let at = |t: f64| -> Vec<f64> { s.iter().zip(dir).map(|(a, d)| a + t * d).collect() };
        let (mut lo, mut hi) = (0.0, t_exit);
        let r_hi = self.rho.eval_raw(&at(hi));
        if !(r_hi > 0.0) {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = self.rho.eval_raw(&at(mid));
            if !v.is_finite() {
                return None;
            }
            if v.abs() <= self.boundary_tol && hi - lo < 1e-12 {
                return Some(at(mid));
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * t_exit {
                let x = at(0.5 * (lo + hi));
                return (self.rho.eval_raw(&x).abs() <= self.boundary_tol).then_some(x);
            }
        }
        None
    }

    fn gradient_norm(&self, x: &[f64]) -> Result<f64, SmoothError> {
        let p = CPoint::new(x.to_vec())?;
        let g = self.rho.real_gradient(&p)?;
        Ok(g.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySample {
    pub cloud: PointCloud,
    /// Rays or parameters that produced no boundary point.
    pub skipped: usize,
    /// Points dropped by the gradient floor.
    pub below_floor: usize,
}

/// `count` boundary points from quasi-random rays out of the interior seed.
pub fn sample_boundary(
    d: &DefiningDomain,
    count: usize,
    seed: u64,
) -> Result<BoundarySample, SmoothError> {
    let dim = 2 * d.complex_dim();
    let raw: Vec<Option<Vec<f64>>> = match &d.sampler {
        Some((pdim, f)) => {
            let q = QuasiRandom::new(*pdim, seed);
            (0..count as u64).into_par_iter().map(|n| f(n, &q)).collect()
        }
        None => {
            let q = QuasiRandom::new(dim, seed);
            (0..count as u64).into_par_iter().map(|n| d.ray(&q.sphere_point(n))).collect()
        }
    };
    let skipped = raw.iter().filter(|r| r.is_none()).count();
    if count > 0 && skipped as f64 > MAX_SKIP_FRACTION * count as f64 {
        return Err(SmoothError::Sampling { skipped, count });
    }
    if skipped > 0 {
        log::info!("{skipped} of {count} boundary samples skipped");
    }
    let mut cloud = PointCloud::new(dim, d.name.clone());
    let mut below_floor = 0;
    for x in raw.into_iter().flatten() {
        if d.gradient_norm(&x)? < d.gradient_floor {
            below_floor += 1;
            continue;
        }
        cloud.push(x)?;
    }
    Ok(BoundarySample { cloud, skipped, below_floor })
}

/// Orthonormal basis of `{v : sum_k rho_{z_k}(p) v_k = 0}`.
pub fn holomorphic_tangent_basis(
    d: &DefiningDomain,
    p: &CPoint,
) -> Result<Vec<Vec<C64>>, SmoothError> {
    let norm = d.gradient_norm(p.coords())?;
    if norm < d.gradient_floor {
        return Err(SmoothError::Degenerate {
            point: p.coords().to_vec(),
            norm,
            floor: d.gradient_floor,
        });
    }
    let n = d.complex_dim();
    let w: Vec<C64> = d.rho.dz(p)?.into_iter().map(|z| z.conj()).collect();
    let mut seeds = vec![w];
    for k in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[k] = C64::new(1.0, 0.0);
        seeds.push(e);
    }
    let mut basis = complex_orthonormalize(&seeds, 1e-10);
    basis.remove(0);
    basis.truncate(n - 1);
    Ok(basis)
}

#[derive(Clone, Debug)]
pub struct LeviReport {
    pub point: CPoint,
    pub tangent_basis: Vec<Vec<C64>>,
    pub restricted: HermitianSpectrum,
    /// Absolute threshold used for "positive".
    pub delta: f64,
    /// `flags[q]`: strictly q-pseudoconvex at the point, `q = 0..N`.
    pub flags: Vec<bool>,
}

impl LeviReport {
    pub fn strictly_pc(&self, q: usize) -> bool {
        self.flags.get(q).copied().unwrap_or(true)
    }
}

/// Levi form `v -> sum rho_{z_j zbar_k} v_j conj(v_k)` on the holomorphic
/// tangent space at `p`.
pub fn levi_restricted(d: &DefiningDomain, p: &CPoint) -> Result<LeviReport, SmoothError> {
    let basis = holomorphic_tangent_basis(d, p)?;
    let h = d.rho.levi_matrix(p)?;
    let n = d.complex_dim();
    let b = DMatrix::from_fn(n, basis.len(), |r, c| basis[c][r]);
    // the form above has matrix H^T in the basis e_k
    let l = b.adjoint() * h.transpose() * &b;
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let delta = d.delta * scale.max(f64::MIN_POSITIVE);
    let restricted = HermitianSpectrum::new(&l, delta)?;
    let positive = restricted.count_above(delta);
    let flags = (0..n).map(|q| positive + 1 + q >= n).collect();
    Ok(LeviReport { point: p.clone(), tangent_basis: basis, restricted, delta, flags })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleFlag {
    pub flagged: bool,
    /// Unflagged but within the closure radius of a flagged sample.
    pub closure: bool,
    pub eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlaggedCloud {
    pub q: usize,
    pub cloud: PointCloud,
    pub flags: Vec<SampleFlag>,
    pub closure_radius: f64,
}

impl FlaggedCloud {
    pub fn flagged_fraction(&self) -> f64 {
        if self.flags.is_empty() {
            return 0.0;
        }
        self.flags.iter().filter(|f| f.flagged).count() as f64 / self.flags.len() as f64
    }

    pub fn flagged_points(&self) -> Vec<Vec<f64>> {
        self.cloud
            .points()
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| f.flagged)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Flags each sample by the strict q-pseudoconvexity test and tags
/// unflagged samples near flagged ones as closure points.
pub fn strict_q_set(
    d: &DefiningDomain,
    q: usize,
    samples: &PointCloud,
) -> Result<FlaggedCloud, SmoothError> {
    let n = d.complex_dim();
    if q >= n {
        return Err(SmoothError::BadQ { q, max: n - 1 });
    }
    let reports = samples
        .points()
        .par_iter()
        .map(|x| levi_restricted(d, &CPoint::new(x.clone())?))
        .collect::<Result<Vec<_>, _>>()?;
    let pts = samples.points();
    let nn_mean = if pts.len() < 2 {
        0.0
    } else {
        let sum: f64 = (0..pts.len())
            .into_par_iter()
            .map(|i| {
                (0..pts.len())
                    .filter(|&j| j != i)
                    .map(|j| dist2(&pts[i], &pts[j]))
                    .fold(f64::INFINITY, f64::min)
                    .sqrt()
            })
            .sum();
        sum / pts.len() as f64
    };
    let closure_radius = 2.0 * nn_mean;
    let flagged: Vec<bool> = reports.iter().map(|r| r.strictly_pc(q)).collect();
    let flags = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let closure = !flagged[i]
                && (0..pts.len()).any(|j| {
                    flagged[j] && dist2(&pts[i], &pts[j]) <= closure_radius * closure_radius
                });
            SampleFlag {
                flagged: flagged[i],
                closure,
                eigenvalues: reports[i].restricted.eigenvalues.clone(),
            }
        })
        .collect();
    Ok(FlaggedCloud { q, cloud: samples.clone(), flags, closure_radius })
}

/// Kernel of the restricted Levi form, in ambient coordinates, when the
/// spectrum has exactly `N-q-1` eigenvalues above `delta` and `q` in
/// `[-delta, delta]`.
pub fn foliation_direction(
    d: &DefiningDomain,
    p: &CPoint,
    q: usize,
) -> Result<Vec<Vec<C64>>, SmoothError> {
    let n = d.complex_dim();
    if q >= n {
        return Err(SmoothError::BadQ { q, max: n - 1 });
    }
    let r = levi_restricted(d, p)?;
    let ev = &r.restricted.eigenvalues;
    let delta = r.delta;
    let positive = ev.iter().filter(|&&e| e > delta).count();
    let zero: Vec<usize> = (0..ev.len()).filter(|&i| ev[i].abs() <= delta).collect();
    if positive != n - q - 1 || zero.len() != q {
        return Err(SmoothError::Profile {
            eigenvalues: ev.clone(),
            positive: n - q - 1,
            zero: q,
            delta,
        });
    }
    let b = DMatrix::from_fn(n, r.tangent_basis.len(), |i, c| r.tangent_basis[c][i]);
    Ok(zero
        .iter()
        .map(|&i| {
            let y: DVector<C64> = r.restricted.eigenvectors.column(i).into_owned();
            (&b * y).iter().copied().collect()
        })
        .collect())
}

/// Largest distance from a reference point to the nearest cloud point.
pub fn directed_distance(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    from.par_iter()
        .map(|a| to.iter().map(|b| dist2(a, b)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
        .sqrt()
}
