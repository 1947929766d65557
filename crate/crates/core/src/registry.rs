//! Named fields and domains addressable from configuration files.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::C64;
use crate::qpsh::{CPoint, ComplexScalarField, DomainBox, ScalarField, Stencil};
use crate::smooth::{DefiningDomain, SmoothError};

pub type Params = BTreeMap<String, f64>;

pub const DOMAINS: &[&str] = &["ball", "ellipsoid", "quartic", "nonparallel-quadric"];
pub const REAL_FIELDS: &[&str] = &["sqnorm", "re_poly"];
pub const COMPLEX_FIELDS: &[&str] = &["antiholo", "singular_nh"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegistryError {
    #[error("unknown {kind} {name:?}; known: {known:?}")]
    Unknown { kind: &'static str, name: String, known: Vec<&'static str> },
    #[error("parameter {name:?} not accepted by {entry}")]
    UnknownParam { entry: String, name: String },
    #[error("parameter {name} = {value} out of range")]
    BadParam { name: String, value: f64 },
    #[error("cannot parse parameter list {0:?}; expected key=value,...")]
    Syntax(String),
    #[error(transparent)]
    Smooth(#[from] SmoothError),
}

/// Parses `"n=3,radius=2"`.
pub fn parse_params(s: &str) -> Result<Params, RegistryError> {
    let mut out = Params::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| RegistryError::Syntax(s.into()))?;
        let v: f64 = v.trim().parse().map_err(|_| RegistryError::Syntax(s.into()))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

struct Reader<'a> {
    entry: &'a str,
    params: &'a Params,
    allowed: &'a [&'a str],
}

impl Reader<'_> {
    fn check(&self) -> Result<(), RegistryError> {
        for k in self.params.keys() {
            if !self.allowed.contains(&k.as_str()) {
                return Err(RegistryError::UnknownParam { entry: self.entry.into(), name: k.clone() });
            }
        }
        Ok(())
    }

    fn positive(&self, name: &str, default: f64) -> Result<f64, RegistryError> {
        let v = self.params.get(name).copied().unwrap_or(default);
        if !(v > 0.0 && v.is_finite()) {
            return Err(RegistryError::BadParam { name: name.into(), value: v });
        }
        Ok(v)
    }

    fn dim(&self, default: usize) -> Result<usize, RegistryError> {
        let v = self.params.get("n").copied().unwrap_or(default as f64);
        if !((1.0..=16.0).contains(&v) && v.fract() == 0.0) {
            return Err(RegistryError::BadParam { name: "n".into(), value: v });
        }
        Ok(v as usize)
    }
}

pub(crate) fn sqnorm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn unknown(kind: &'static str, name: &str, known: &[&'static str]) -> RegistryError {
    RegistryError::Unknown { kind, name: name.into(), known: known.to_vec() }
}

/// Defining domain by name.
///
/// * `ball`: `|z|^2 - radius^2` in `C^n` (defaults `n = 2`, `radius = 1`)
/// * `ellipsoid`: `|z1|^2 + b|z2|^2 - 1` (default `b = 4`)
/// * `quartic`: `|z1|^4 + |z2|^2 - 1`
/// * `nonparallel-quadric`: `(Re z2)^2 - Re z1 Re z3` near the cone `Re z1, Re z3 > 0`
///
/// ```
/// use shilov::registry::{domain, parse_params};
/// let d = domain("ball", &parse_params("n=3").unwrap()).unwrap();
/// assert_eq!(d.complex_dim(), 3);
/// ```
pub fn domain(name: &str, params: &Params) -> Result<DefiningDomain, RegistryError> {
    let allowed: &[&str] = match name {
        "ball" => &["n", "radius"],
        "ellipsoid" => &["b"],
        "quartic" | "nonparallel-quadric" => &[],
        _ => return Err(unknown("domain", name, DOMAINS)),
    };
    let r = Reader { entry: name, params, allowed };
    r.check()?;
    let d = match name {
        "ball" => {
            let n = r.dim(2)?;
            let radius = r.positive("radius", 1.0)?;
            let rho = ScalarField::new(n, move |x| sqnorm(x) - radius * radius);
            DefiningDomain::new(name, rho, CPoint::origin(n), DomainBox::cube(&vec![0.0; 2 * n], 2.0 * radius))?
        }
        "ellipsoid" => {
            let b = r.positive("b", 4.0)?;
            let rho = ScalarField::new(2, move |x| sqnorm(&x[..2]) + b * sqnorm(&x[2..]) - 1.0);
            DefiningDomain::new(name, rho, CPoint::origin(2), DomainBox::cube(&[0.0; 4], 2.0))?
        }
        "quartic" => {
            // central differences leave an h^2 bias on the quartic term
            let rho = ScalarField::new(2, |x| sqnorm(&x[..2]).powi(2) + sqnorm(&x[2..]) - 1.0)
                .with_stencil(Stencil::Richardson);
            DefiningDomain::new(name, rho, CPoint::origin(2), DomainBox::cube(&[0.0; 4], 2.0))?
        }
        _ => nonparallel_quadric()?,
    };
    Ok(d)
}

/// Points on the zero set have real parts `(a^2 t, a t, t)`; the imaginary
/// parts are free.
fn nonparallel_quadric() -> Result<DefiningDomain, SmoothError> {
    let rho = ScalarField::new(3, |x| x[2] * x[2] - x[0] * x[4]);
    let seed = CPoint::new(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0])?;
    let bbox = DomainBox::cube(seed.coords(), 4.0);
    let sampler = Arc::new(|n: u64, q: &crate::qrng::QuasiRandom| {
        let u = q.point(n);
        let a = -1.5 + 3.0 * u[0];
        let t = 0.5 + u[1];
        let re = [a * a * t, a * t, t];
        let mut x = Vec::with_capacity(6);
        for k in 0..3 {
            x.push(re[k]);
            x.push(-1.0 + 2.0 * u[2 + k]);
        }
        Some(x)
    });
    Ok(DefiningDomain::new("nonparallel-quadric", rho, seed, bbox)?.with_sampler(5, sampler))
}

/// Real-valued field by name: `sqnorm` is `|z|^2`, `re_poly` is
/// `Re(z1^2 + ... + zn^2)`. Both accept `n` (default 2).
pub fn real_field(name: &str, params: &Params) -> Result<ScalarField, RegistryError> {
    let r = Reader { entry: name, params, allowed: &["n"] };
    if !REAL_FIELDS.contains(&name) {
        return Err(unknown("real field", name, REAL_FIELDS));
    }
    r.check()?;
    let n = r.dim(2)?;
    Ok(match name {
        "sqnorm" => ScalarField::new(n, sqnorm),
        _ => ScalarField::new(n, |x| x.chunks(2).map(|p| p[0] * p[0] - p[1] * p[1]).sum()),
    })
}

/// Complex-valued field by name: `antiholo` is `conj(z1)`, `singular_nh` is
/// `(conj(z1) + ... + conj(zn)) / |z|^2`. Both accept `n` (default 2).
pub fn complex_field(name: &str, params: &Params) -> Result<ComplexScalarField, RegistryError> {
    let r = Reader { entry: name, params, allowed: &["n"] };
    if !COMPLEX_FIELDS.contains(&name) {
        return Err(unknown("complex field", name, COMPLEX_FIELDS));
    }
    r.check()?;
    let n = r.dim(2)?;
    Ok(match name {
        "antiholo" => ComplexScalarField::new(n, |x| C64::new(x[0], -x[1])),
        _ => ComplexScalarField::new(n, |x| {
            let s: C64 = x.chunks(2).map(|p| C64::new(p[0], -p[1])).sum();
            s / sqnorm(x)
        })
        .with_stencil(Stencil::Richardson),
    })
}
