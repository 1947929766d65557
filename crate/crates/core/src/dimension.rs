//! Box-counting dimension of sampled point sets.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    #[error("point {index} has {got} coordinates, cloud dimension is {expected}")]
    Ambient { index: usize, got: usize, expected: usize },
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("need at least 4 scales spanning a decade, got {count} spanning a factor {span}")]
    TooFewScales { count: usize, span: f64 },
    #[error("under-sampled: {count} boxes at scale {scale} for {points} points")]
    UnderSampled { scale: f64, count: usize, points: usize },
    #[error("empty cloud")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
    pub provenance: String,
}

impl PointCloud {
    pub fn new(dim: usize, provenance: impl Into<String>) -> Self {
        PointCloud { dim, points: Vec::new(), provenance: provenance.into() }
    }

    pub fn from_points(
        dim: usize,
        points: Vec<Vec<f64>>,
        provenance: impl Into<String>,
    ) -> Result<Self, DimensionError> {
        let mut c = Self::new(dim, provenance);
        for p in points {
            c.push(p)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, p: Vec<f64>) -> Result<(), DimensionError> {
        let index = self.points.len();
        if p.len() != self.dim {
            return Err(DimensionError::Ambient { index, got: p.len(), expected: self.dim });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(DimensionError::NonFinite(index));
        }
        self.points.push(p);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn translated(&self, shift: &[f64]) -> PointCloud {
        assert_eq!(shift.len(), self.dim);
        PointCloud {
            dim: self.dim,
            points: self
                .points
                .iter()
                .map(|p| p.iter().zip(shift).map(|(a, b)| a + b).collect())
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Largest side of the bounding box.
    pub fn extent(&self) -> f64 {
        (0..self.dim)
            .map(|k| {
                let (lo, hi) = self
                    .points
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        (lo.min(p[k]), hi.max(p[k]))
                    });
                if hi >= lo {
                    hi - lo
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Occupied boxes of side `scale` on the grid anchored at the origin.
pub fn box_count(cloud: &PointCloud, scale: f64) -> Result<usize, DimensionError> {
    box_count_anchored(cloud, scale, &vec![0.0; cloud.dim()])
}

/// As [`box_count`] with the grid shifted by `offset`.
pub fn box_count_anchored(
    cloud: &PointCloud,
    scale: f64,
    offset: &[f64],
) -> Result<usize, DimensionError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(DimensionError::BadScale(scale));
    }
    let boxes: HashSet<Vec<i64>> = cloud
        .points()
        .iter()
        .map(|p| p.iter().zip(offset).map(|(v, o)| ((v - o) / scale).floor() as i64).collect())
        .collect();
    Ok(boxes.len())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimEstimate {
    /// Decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `r2 > 0.98`.
    pub reliable: bool,
}

pub const RELIABLE_R2: f64 = 0.98;

pub fn box_dimension(cloud: &PointCloud, scales: &[f64]) -> Result<DimEstimate, DimensionError> {
    box_dimension_anchored(cloud, scales, &vec![0.0; cloud.dim()])
}

pub fn box_dimension_anchored(
    cloud: &PointCloud,
    scales: &[f64],
    offset: &[f64],
) -> Result<DimEstimate, DimensionError> {
    if cloud.is_empty() {
        return Err(DimensionError::Empty);
    }
    let mut scales = scales.to_vec();
    if let Some(&s) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(DimensionError::BadScale(s));
    }
    scales.sort_by(|a, b| b.total_cmp(a));
    scales.dedup();
    let span = match (scales.first(), scales.last()) {
        (Some(hi), Some(lo)) => hi / lo,
        _ => 1.0,
    };
    if scales.len() < 4 || span < 10.0 {
        return Err(DimensionError::TooFewScales { count: scales.len(), span });
    }
    let counts = scales
        .iter()
        .map(|&s| box_count_anchored(cloud, s, offset))
        .collect::<Result<Vec<_>, _>>()?;
    let finest = *counts.last().expect("non-empty");
    if finest * 10 >= cloud.len() {
        return Err(DimensionError::UnderSampled {
            scale: *scales.last().expect("non-empty"),
            count: finest,
            points: cloud.len(),
        });
    }
    let xs: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, intercept, r2) = least_squares(&xs, &ys);
    Ok(DimEstimate { scales, counts, slope, intercept, r2, reliable: r2 > RELIABLE_R2 })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

/// Eight geometric scales ending at the finest scale at which the
/// resolution guard still holds and spanning at most 10^1.5 above it, capped
/// at a quarter of the extent. Coarser boxes mostly measure edge effects.
pub fn auto_scales(cloud: &PointCloud) -> Result<Vec<f64>, DimensionError> {
    if cloud.is_empty() {
        return Err(DimensionError::Empty);
    }
    let top = cloud.extent() / 4.0;
    if top <= 0.0 {
        return Err(DimensionError::BadScale(top));
    }
    let step = 10f64.powf(0.125);
    let mut finest = top;
    loop {
        let next = finest / step;
        if box_count(cloud, next)? * 10 >= cloud.len() {
            break;
        }
        finest = next;
        if top / finest > 1e4 {
            break;
        }
    }
    let span = top / finest;
    if span < 10.0 {
        return Err(DimensionError::UnderSampled {
            scale: finest,
            count: box_count(cloud, finest)?,
            points: cloud.len(),
        });
    }
    let span = span.min(MAX_AUTO_SPAN);
    Ok((0..8).map(|i| finest * span.powf(1.0 - i as f64 / 7.0)).collect())
}

pub const MAX_AUTO_SPAN: f64 = 31.622776601683793;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductDimReport {
    pub dim_a: DimEstimate,
    pub dim_b: DimEstimate,
    pub dim_product: DimEstimate,
    pub slack: f64,
    pub passes: bool,
}

/// Estimates the dimension of `A x B` from `pairs` random pairs and checks
/// it against the sum of the factor estimates.
pub fn product_dimension_check(
    a: &PointCloud,
    b: &PointCloud,
    pairs: usize,
    slack: f64,
    seed: u64,
) -> Result<ProductDimReport, DimensionError> {
    if a.is_empty() || b.is_empty() {
        return Err(DimensionError::Empty);
    }
    let dim_a = box_dimension(a, &auto_scales(a)?)?;
    let dim_b = box_dimension(b, &auto_scales(b)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prod = PointCloud::new(a.dim() + b.dim(), "product");
    for _ in 0..pairs {
        let p = &a.points()[rng.random_range(0..a.len())];
        let q = &b.points()[rng.random_range(0..b.len())];
        prod.push(p.iter().chain(q).copied().collect())?;
    }
    let dim_product = box_dimension(&prod, &auto_scales(&prod)?)?;
    let passes = dim_product.slope >= dim_a.slope + dim_b.slope - slack;
    Ok(ProductDimReport { dim_a, dim_b, dim_product, slack, passes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(n: usize) -> PointCloud {
        let pts = (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect();
        PointCloud::from_points(1, pts, "segment").unwrap()
    }

    fn square(n: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
        PointCloud::from_points(2, pts, "square").unwrap()
    }

    #[test]
    fn single_point_one_box() {
        let c = PointCloud::from_points(3, vec![vec![0.1, 0.2, 0.3]], "pt").unwrap();
        for s in [1e-3, 0.1, 10.0] {
            assert_eq!(box_count(&c, s).unwrap(), 1);
        }
    }

    #[test]
    fn empty_cloud_counts_zero() {
        assert_eq!(box_count(&PointCloud::new(2, "empty"), 0.1).unwrap(), 0);
    }

    #[test]
    fn segment_count() {
        let c = box_count(&segment(10_000), 0.01).unwrap();
        assert!((90..=101).contains(&c), "{c}");
    }

    #[test]
    fn square_count() {
        let c = box_count(&square(100_000, 1), 0.05).unwrap();
        assert!((380..=400).contains(&c), "{c}");
    }

    #[test]
    fn dimensions_of_segment_and_square() {
        let s = box_dimension(&segment(10_000), &[0.1, 0.05, 0.02, 0.01, 0.005]).unwrap();
        assert!((s.slope - 1.0).abs() < 0.1, "{s:?}");
        let q = box_dimension(&square(100_000, 2), &[0.25, 0.1, 0.05, 0.025]).unwrap();
        assert!((q.slope - 2.0).abs() < 0.1, "{q:?}");
        assert!(q.reliable);
    }

    #[test]
    fn guards() {
        let c = segment(100);
        assert!(matches!(
            box_dimension(&c, &[0.1, 0.05, 0.02]),
            Err(DimensionError::TooFewScales { .. })
        ));
        assert!(matches!(
            box_dimension(&c, &[0.1, 0.09, 0.08, 0.07]),
            Err(DimensionError::TooFewScales { .. })
        ));
        assert!(matches!(
            box_dimension(&c, &[0.1, 0.05, 0.02, 0.001]),
            Err(DimensionError::UnderSampled { .. })
        ));
        assert!(box_count(&c, 0.0).is_err());
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let mut c = PointCloud::new(2, "x");
        assert!(c.push(vec![1.0]).is_err());
        assert!(c.push(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn product_of_segments() {
        let r = product_dimension_check(&segment(5000), &segment(5000), 50_000, 0.2, 3).unwrap();
        assert!(r.passes, "{r:?}");
        assert!((r.dim_product.slope - 2.0).abs() < 0.2);
    }
}
