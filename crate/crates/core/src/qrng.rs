//! Seeded low-discrepancy sequences.
//!
//! Points come from the additive recurrence `x_n = frac(offset + n * alpha)`
//! with `alpha_j = phi_d^{-j}`, where `phi_d` is the unique positive root of
//! `x^{d+1} = x + 1`. Every element is addressable by index, so a sequence
//! can be split across workers without changing its values. The seed only
//! moves the offset.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct QuasiRandom {
    alpha: Vec<f64>,
    offset: Vec<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl QuasiRandom {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1);
        let mut phi = 2.0f64;
        for _ in 0..64 {
            phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
        }
        let alpha = (1..=dim).map(|j| phi.powi(-(j as i32)).fract()).collect();
        let mut state = seed;
        let offset = (0..dim)
            .map(|_| (splitmix64(&mut state) >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        QuasiRandom { alpha, offset }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// The `n`-th point of the unit cube, coordinates in `(0, 1)`.
    pub fn point(&self, n: u64) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.offset)
            .map(|(a, o)| {
                let v = (o + (n as f64 + 1.0) * a).fract();
                v.clamp(1e-16, 1.0 - 1e-16)
            })
            .collect()
    }

    /// The `n`-th point mapped to the unit sphere in `R^dim` through
    /// Box–Muller Gaussians. Requires an even dimension.
    pub fn sphere_point(&self, n: u64) -> Vec<f64> {
        let u = self.point(n);
        assert!(u.len().is_multiple_of(2), "sphere points need an even dimension");
        let mut g = Vec::with_capacity(u.len());
        for pair in u.chunks(2) {
            let r = (-2.0 * pair[0].ln()).sqrt();
            let th = 2.0 * PI * pair[1];
            g.push(r * th.cos());
            g.push(r * th.sin());
        }
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.iter().map(|v| v / norm).collect()
    }
}
