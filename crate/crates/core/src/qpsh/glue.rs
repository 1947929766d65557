use std::sync::Arc;

use thiserror::Error;

use super::field::ScalarField;
use super::regmax::RegMaxParams;
use super::NumericError;
use crate::qrng::QuasiRandom;

/// A region of `C^N` whose seam can be sampled.
pub trait GlueRegion: Send + Sync {
    fn contains(&self, x: &[f64]) -> bool;
    /// `count` points on the region's boundary.
    fn seam_samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl GlueRegion for Ball {
    fn contains(&self, x: &[f64]) -> bool {
        let d2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 < self.radius * self.radius
    }

    fn seam_samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let q = QuasiRandom::new(self.center.len(), seed);
        (0..count as u64)
            .map(|n| {
                q.sphere_point(n)
                    .iter()
                    .zip(&self.center)
                    .map(|(u, c)| c + self.radius * u)
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlueError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("psi = {value} at seam point {point:?}; gluing needs psi < {bound}")]
    Collar { point: Vec<f64>, value: f64, bound: f64 },
}

/// `reg_max(psi, c)` (both widths `eps`) inside `region`, the constant `c`
/// outside.
///
/// The two pieces agree on the seam once `psi + eps < c - eps` there, which
/// is checked on `seam_count` samples.
pub fn glue_peak(
    psi: &ScalarField,
    c: f64,
    eps: f64,
    region: Arc<dyn GlueRegion>,
    seam_count: usize,
) -> Result<ScalarField, GlueError> {
    let params = RegMaxParams::uniform(2, eps)?;
    let bound = c - 2.0 * eps;
    for point in region.seam_samples(seam_count, 0) {
        let value = psi.eval_raw(&point);
        if !(value < bound) {
            return Err(GlueError::Collar { point, value, bound });
        }
    }
    let inner = psi.clone();
    let mut out = ScalarField::new(psi.complex_dim(), move |x| {
        if region.contains(x) {
            super::reg_max(&[inner.eval_raw(x), c], &params).unwrap_or(f64::NAN)
        } else {
            c
        }
    })
    .with_step(psi.step)
    .with_stencil(psi.stencil);
    if let Some(d) = &psi.domain {
        out = out.with_domain(d.clone());
    }
    Ok(out)
}
