use std::sync::Arc;

use super::field::{CPoint, ScalarField};
use super::hessian::qpsh_index;
use super::NumericError;
use crate::quadrature::gauss_legendre;

pub const DEFAULT_NODES: usize = 32;
pub const MAX_ARGS: usize = 6;
const CDF_NODES: usize = 128;

/// `theta(s) = c exp(-1/(1-s^2))` on `(-1, 1)`, with `c` fixed by the same
/// Gauss-Legendre rule that later integrates against it.
///
/// The distribution function uses its own 128-point rule, normalized so
/// that it reaches exactly one at `s = 1`.
#[derive(Clone, Debug)]
pub struct BumpKernel {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `w_i * theta(nodes[i])`; sums to one.
    mass: Vec<f64>,
    scale: f64,
    cdf_nodes: Vec<f64>,
    cdf_weights: Vec<f64>,
    cdf_scale: f64,
}

fn raw_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

impl BumpKernel {
    pub fn new(n: usize) -> Result<Self, NumericError> {
        if n < 8 {
            return Err(NumericError::TooFewNodes(n));
        }
        let (nodes, weights) = gauss_legendre(n);
        let total: f64 = nodes.iter().zip(&weights).map(|(s, w)| w * raw_bump(*s)).sum();
        let scale = 1.0 / total;
        let mass = nodes
            .iter()
            .zip(weights.iter())
            .map(|(s, w)| w * raw_bump(*s) * scale)
            .collect();
        let (cdf_nodes, cdf_weights) = gauss_legendre(CDF_NODES);
        let cdf_total: f64 = cdf_nodes
            .iter()
            .zip(&cdf_weights)
            .map(|(s, w)| w * raw_bump(*s))
            .sum();
        Ok(BumpKernel {
            nodes,
            weights,
            mass,
            scale,
            cdf_nodes,
            cdf_weights,
            cdf_scale: 1.0 / cdf_total,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn density(&self, s: f64) -> f64 {
        self.scale * raw_bump(s)
    }

    /// `int_{-1}^{u} theta`.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= -1.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let half = 0.5 * (u + 1.0);
        let sum: f64 = self
            .cdf_nodes
            .iter()
            .zip(&self.cdf_weights)
            .map(|(x, w)| w * raw_bump(-1.0 + half * (x + 1.0)))
            .sum();
        (half * sum * self.cdf_scale).clamp(0.0, 1.0)
    }

    /// Nodes and normalized masses of the discrete kernel.
    pub fn rule(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.mass.iter().copied())
    }
}

#[derive(Clone, Debug)]
pub struct RegMaxParams {
    epsilons: Vec<f64>,
    kernel: Arc<BumpKernel>,
}

impl RegMaxParams {
    pub fn new(epsilons: Vec<f64>, nodes: usize) -> Result<Self, NumericError> {
        if epsilons.is_empty() || epsilons.len() > MAX_ARGS {
            return Err(NumericError::Arity { got: epsilons.len(), max: MAX_ARGS });
        }
        for (index, &value) in epsilons.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(NumericError::BadEpsilon { index, value });
            }
        }
        Ok(RegMaxParams { epsilons, kernel: Arc::new(BumpKernel::new(nodes)?) })
    }

    /// Same epsilon for all `l` arguments, default node count.
    pub fn uniform(l: usize, eps: f64) -> Result<Self, NumericError> {
        Self::new(vec![eps; l], DEFAULT_NODES)
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn kernel(&self) -> &BumpKernel {
        &self.kernel
    }

    fn eval(&self, t: &[f64]) -> f64 {
        // E[max_j (t_j + eps_j S_j)] for independent S_j ~ theta, split by
        // which coordinate attains the max. Each outer integral is cut where
        // another coordinate's distribution function switches on or off, so
        // the Gauss rule only sees smooth pieces. Dividing by the total mass
        // absorbs the remaining quadrature error.
        let eps = &self.epsilons;
        let k = &*self.kernel;
        let (mut num, mut den) = (0.0, 0.0);
        let mut cuts = Vec::with_capacity(2 * t.len());
        for j in 0..t.len() {
            cuts.clear();
            // the bump's flat ends need finer pieces than its middle
            cuts.extend([-1.0, -0.5, 0.0, 0.5, 1.0]);
            for i in (0..t.len()).filter(|&i| i != j) {
                for side in [-1.0, 1.0] {
                    let c = (t[i] + side * eps[i] - t[j]) / eps[j];
                    if c > -1.0 && c < 1.0 {
                        cuts.push(c);
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            for w in cuts.windows(2) {
                let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
                if half <= 0.0 {
                    continue;
                }
                for (&node, &weight) in k.nodes.iter().zip(&k.weights) {
                    let s = mid + half * node;
                    let mut p = half * weight * raw_bump(s);
                    if p == 0.0 {
                        continue;
                    }
                    let x = t[j] + eps[j] * s;
                    for i in 0..t.len() {
                        if i != j {
                            p *= k.cdf((x - t[i]) / eps[i]);
                            if p == 0.0 {
                                break;
                            }
                        }
                    }
                    num += p * x;
                    den += p;
                }
            }
        }
        num / den
    }
}

/// Regularized maximum of `t` with the smoothing widths in `params`.
pub fn reg_max(t: &[f64], params: &RegMaxParams) -> Result<f64, NumericError> {
    if t.len() != params.epsilons.len() {
        return Err(NumericError::ArgumentMismatch {
            got: t.len(),
            expected: params.epsilons.len(),
        });
    }
    if let Some(v) = t.iter().find(|v| !v.is_finite()) {
        return Err(NumericError::BadPoint(format!("non-finite argument {v}")));
    }
    Ok(params.eval(t))
}

/// `z -> reg_max(psi_1(z), ..., psi_l(z))`. Step, stencil and domain are
/// taken from the first field.
pub fn reg_max_compose(
    fields: &[ScalarField],
    params: &RegMaxParams,
) -> Result<ScalarField, NumericError> {
    let first = fields.first().ok_or(NumericError::Arity { got: 0, max: MAX_ARGS })?;
    if fields.len() != params.epsilons.len() {
        return Err(NumericError::ArgumentMismatch {
            got: fields.len(),
            expected: params.epsilons.len(),
        });
    }
    let n = first.complex_dim();
    if fields.iter().any(|f| f.complex_dim() != n) {
        return Err(NumericError::MixedFields);
    }
    let parts = fields.to_vec();
    let p = params.clone();
    let mut out = ScalarField::new(n, move |x| {
        let t: Vec<f64> = parts.iter().map(|f| f.eval_raw(x)).collect();
        if t.iter().all(|v| v.is_finite()) {
            p.eval(&t)
        } else {
            f64::NAN
        }
    })
    .with_step(first.step)
    .with_stencil(first.stencil);
    if let Some(d) = &first.domain {
        out = out.with_domain(d.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegMaxFieldReport {
    pub value: f64,
    pub index: usize,
    pub q_sum: usize,
    pub passes: bool,
}

/// Evaluates the composite at `z` and checks its Hessian index against
/// the sum of the constituents' indices.
pub fn reg_max_field(
    fields: &[(ScalarField, usize)],
    params: &RegMaxParams,
    z: &CPoint,
    tau: f64,
) -> Result<RegMaxFieldReport, NumericError> {
    let plain: Vec<ScalarField> = fields.iter().map(|(f, _)| f.clone()).collect();
    let composite = reg_max_compose(&plain, params)?;
    let value = composite.eval(z)?;
    let index = qpsh_index(&composite, z, tau)?;
    let q_sum = fields.iter().map(|(_, q)| q).sum();
    Ok(RegMaxFieldReport { value, index, q_sum, passes: index <= q_sum })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Literal tensor-product rule over the kernel nodes.
    fn tensor(t: &[f64], p: &RegMaxParams) -> f64 {
        let rule: Vec<(f64, f64)> = p.kernel().rule().collect();
        let l = t.len();
        let mut idx = vec![0usize; l];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            let mut m = f64::NEG_INFINITY;
            for j in 0..l {
                let (s, mj) = rule[idx[j]];
                w *= mj;
                m = m.max(t[j] + p.epsilons()[j] * s);
            }
            total += w * m;
            let mut k = 0;
            while k < l {
                idx[k] += 1;
                if idx[k] < rule.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == l {
                return total;
            }
        }
    }

    #[test]
    fn kernel_is_normalized_and_even() {
        let k = BumpKernel::new(32).unwrap();
        let total: f64 = k.rule().map(|(_, m)| m).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let first: f64 = k.rule().map(|(s, m)| s * m).sum();
        assert!(first.abs() < 1e-16);
        assert!((k.cdf(0.0) - 0.5).abs() < 1e-14);
        assert!((k.cdf(0.4) + k.cdf(-0.4) - 1.0).abs() < 1e-14);
        assert_eq!(k.cdf(-1.0), 0.0);
        assert_eq!(k.cdf(1.0), 1.0);
        assert!((k.density(0.3) - k.density(-0.3)).abs() < 1e-15);
    }

    #[test]
    fn single_argument_identity() {
        let p = RegMaxParams::new(vec![0.7], 32).unwrap();
        for t in [-3.0, 0.0, 1.5, 1e3] {
            assert!((reg_max(&[t], &p).unwrap() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_tensor_rule_on_converged_kernel() {
        // Both rules converge to the same integral; at 64 nodes they agree closely.
        let p = RegMaxParams::new(vec![1.0, 0.5], 64).unwrap();
        for t in [[0.0, 0.0], [0.3, -0.2], [1.0, 0.2], [-0.4, 0.4]] {
            let a = reg_max(&t, &p).unwrap();
            let b = tensor(&t, &p);
            assert!((a - b).abs() < 1e-3, "{t:?}: {a} vs {b}");
        }
    }

    #[test]
    fn converges_in_node_count() {
        let t = [0.2, -0.1, 0.05];
        let eps = vec![0.5, 0.8, 0.3];
        let at = |n| reg_max(&t, &RegMaxParams::new(eps.clone(), n).unwrap()).unwrap();
        let reference = at(512);
        assert!((at(128) - reference).abs() < 1e-9);
        assert!((at(DEFAULT_NODES) - reference).abs() < 1e-9);
    }

    #[test]
    fn dominated_coordinate_drops() {
        let p = RegMaxParams::uniform(2, 1.0).unwrap();
        assert!((reg_max(&[0.0, 5.0], &p).unwrap() - 5.0).abs() < 1e-14);
        let p3 = RegMaxParams::uniform(3, 0.5).unwrap();
        let full = reg_max(&[0.0, 0.2, 5.0], &p3).unwrap();
        assert!((full - 5.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_is_inside_sandwich() {
        let p = RegMaxParams::uniform(2, 1.0).unwrap();
        let m = reg_max(&[0.0, 0.0], &p).unwrap();
        assert!(m > 0.0 && m < 1.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(RegMaxParams::new(vec![1.0; 7], 32).is_err());
        assert!(RegMaxParams::new(vec![1.0, 0.0], 32).is_err());
        assert!(RegMaxParams::new(vec![1.0, -2.0], 32).is_err());
        assert!(RegMaxParams::new(vec![1.0], 4).is_err());
        assert!(RegMaxParams::new(vec![], 32).is_err());
        let p = RegMaxParams::uniform(2, 1.0).unwrap();
        assert!(reg_max(&[1.0], &p).is_err());
    }

    #[test]
    fn composite_dominated_by_shift() {
        let a = ScalarField::new(2, |x| x.iter().map(|v| v * v).sum());
        let b = ScalarField::new(2, |x| x.iter().map(|v| v * v).sum::<f64>() + 1.0);
        let p = RegMaxParams::uniform(2, 0.1).unwrap();
        let z = CPoint::new(vec![0.3, 0.1, -0.2, 0.4]).unwrap();
        let r = reg_max_field(&[(a, 0), (b, 0)], &p, &z, 1e-6).unwrap();
        assert!((r.value - (0.3f64 * 0.3 + 0.01 + 0.04 + 0.16 + 1.0)).abs() < 1e-12);
        assert_eq!(r.index, 0);
        assert!(r.passes);
    }
}
