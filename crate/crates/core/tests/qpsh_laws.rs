use nalgebra::DMatrix;
use proptest::prelude::*;
use shilov::linalg::C64;
use shilov::qpsh::{
    qholo_rank, qpsh_index, reg_max, reg_max_field, CPoint, ComplexScalarField, RegMaxParams,
    ScalarField, Stencil,
};
use shilov::qrng::QuasiRandom;

fn cvec(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// `z^H A z + Re(z^T S z)` with `A` Hermitian.
fn quadratic(a: DMatrix<C64>, s: DMatrix<C64>) -> ScalarField {
    let n = a.nrows();
    ScalarField::new(n, move |x| {
        let z = nalgebra::DVector::from_vec(cvec(x));
        (z.adjoint() * &a * &z)[0].re + (z.transpose() * &s * &z)[0].re
    })
}

fn hermitian(n: usize, e: &[f64]) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |r, c| C64::new(e[2 * (r * n + c)], e[2 * (r * n + c) + 1]));
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn complex_matrix(n: usize, e: &[f64]) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |r, c| C64::new(e[2 * (r * n + c)], e[2 * (r * n + c) + 1]))
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 2 * n * n)
}

fn point(n: usize) -> impl Strategy<Value = CPoint> {
    prop::collection::vec(-1.0..1.0f64, 2 * n).prop_map(|v| CPoint::new(v).unwrap())
}

const TAU: f64 = 1e-6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_is_subadditive(
        (n, a, b, s, z) in (1usize..=3).prop_flat_map(|n| (Just(n), entries(n), entries(n), entries(n), point(n)))
    ) {
        let u = quadratic(hermitian(n, &a), complex_matrix(n, &s));
        let v = quadratic(hermitian(n, &b), DMatrix::zeros(n, n));
        let (u2, v2) = (u.clone(), v.clone());
        let sum = ScalarField::new(n, move |x| u2.eval_raw(x) + v2.eval_raw(x));
        let lhs = qpsh_index(&sum, &z, TAU).unwrap();
        prop_assert!(lhs <= qpsh_index(&u, &z, TAU).unwrap() + qpsh_index(&v, &z, TAU).unwrap());
    }

    #[test]
    fn index_does_not_grow_under_linear_holomorphic_maps(
        (n, a, m, z) in (1usize..=3).prop_flat_map(|n| (Just(n), entries(n), entries(n), point(n)))
    ) {
        let psi = quadratic(hermitian(n, &a), DMatrix::zeros(n, n));
        let m = complex_matrix(n, &m);
        let (p2, m2) = (psi.clone(), m.clone());
        let composed = ScalarField::new(n, move |x| {
            let w = &m2 * nalgebra::DVector::from_vec(cvec(x));
            let y: Vec<f64> = w.iter().flat_map(|c| [c.re, c.im]).collect();
            p2.eval_raw(&y)
        });
        let hz = &m * nalgebra::DVector::from_vec(z.to_complex());
        let hz = CPoint::from_complex(hz.as_slice()).unwrap();
        prop_assert!(qpsh_index(&composed, &z, TAU).unwrap() <= qpsh_index(&psi, &hz, TAU).unwrap());
    }

    #[test]
    fn reg_max_is_monotone_and_convex(
        t in prop::collection::vec(-3.0..3.0f64, 1..=3),
        d in prop::collection::vec(-3.0..3.0f64, 3),
        eps in prop::collection::vec(0.05..1.5f64, 3),
        bump in 0.0..0.5f64,
        j in 0usize..3,
    ) {
        let l = t.len();
        let p = RegMaxParams::new(eps[..l].to_vec(), 128).unwrap();
        let m0 = reg_max(&t, &p).unwrap();
        let mut up = t.clone();
        up[j % l] += bump;
        prop_assert!(reg_max(&up, &p).unwrap() >= m0 - 1e-12);
        let other: Vec<f64> = d[..l].to_vec();
        let mid: Vec<f64> = t.iter().zip(&other).map(|(a, b)| 0.5 * (a + b)).collect();
        let m1 = reg_max(&other, &p).unwrap();
        prop_assert!(reg_max(&mid, &p).unwrap() <= 0.5 * (m0 + m1) + 1e-9);
    }

    #[test]
    fn reg_max_sandwich(
        t in prop::collection::vec(-3.0..3.0f64, 1..=3),
        eps in prop::collection::vec(0.01..2.0f64, 3),
    ) {
        let l = t.len();
        let p = RegMaxParams::new(eps[..l].to_vec(), 32).unwrap();
        let m = reg_max(&t, &p).unwrap();
        let lo = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let hi = t.iter().zip(&eps).map(|(a, e)| a + e).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m >= lo - 1e-9 && m <= hi + 1e-9, "{lo} <= {m} <= {hi}");
    }

    #[test]
    fn composite_index_bounded_by_sum(
        (a, b, z) in (entries(2), entries(2), point(2)),
        eps in 0.1..1.0f64,
    ) {
        let u = quadratic(hermitian(2, &a), DMatrix::zeros(2, 2));
        let v = quadratic(hermitian(2, &b), DMatrix::zeros(2, 2));
        let (qu, qv) = (qpsh_index(&u, &z, TAU).unwrap(), qpsh_index(&v, &z, TAU).unwrap());
        let p = RegMaxParams::uniform(2, eps).unwrap();
        let r = reg_max_field(&[(u, qu), (v, qv)], &p, &z, 1e-4).unwrap();
        prop_assert!(r.passes, "index {} > {}", r.index, r.q_sum);
    }
}

fn battery() -> Vec<(&'static str, ComplexScalarField)> {
    let mk = |f: fn(&[f64]) -> C64| ComplexScalarField::new(2, f).with_stencil(Stencil::Richardson);
    vec![
        ("z1", mk(|x| C64::new(x[0], x[1]))),
        ("z1 z2", mk(|x| C64::new(x[0], x[1]) * C64::new(x[2], x[3]))),
        ("zbar1", mk(|x| C64::new(x[0], -x[1]))),
        ("zbar2^2", mk(|x| C64::new(x[2], -x[3]).powu(2))),
        ("zbar1 z2", mk(|x| C64::new(x[0], -x[1]) * C64::new(x[2], x[3]))),
        ("zbar1 zbar2", mk(|x| C64::new(x[0], -x[1]) * C64::new(x[2], -x[3]))),
        ("|z1|^2", mk(|x| C64::new(x[0] * x[0] + x[1] * x[1], 0.0))),
    ]
}

#[test]
fn qholo_rank_of_products_and_sums() {
    let pts = QuasiRandom::new(4, 5);
    let fields = battery();
    for n in 0..10u64 {
        let x: Vec<f64> = pts.point(n).iter().map(|v| 2.0 * v - 1.0).collect();
        let p = CPoint::new(x).unwrap();
        let ranks: Vec<usize> = fields.iter().map(|(_, f)| qholo_rank(f, &p, TAU).unwrap()).collect();
        for (i, (ni, f)) in fields.iter().enumerate() {
            for (j, (nj, g)) in fields.iter().enumerate() {
                let (f1, g1) = (f.clone(), g.clone());
                let prod = ComplexScalarField::new(2, move |x| f1.eval_raw(x) * g1.eval_raw(x))
                    .with_stencil(Stencil::Richardson);
                let (f2, g2) = (f.clone(), g.clone());
                let sum = ComplexScalarField::new(2, move |x| f2.eval_raw(x) + g2.eval_raw(x))
                    .with_stencil(Stencil::Richardson);
                let bound = ranks[i] + ranks[j];
                assert!(qholo_rank(&prod, &p, TAU).unwrap() <= bound, "{ni} * {nj}");
                assert!(qholo_rank(&sum, &p, TAU).unwrap() <= bound, "{ni} + {nj}");
            }
        }
    }
    assert_eq!(fields.iter().map(|(_, f)| qholo_rank(f, &CPoint::new(vec![0.3, 0.1, -0.2, 0.5]).unwrap(), TAU).unwrap()).collect::<Vec<_>>(), vec![0, 0, 1, 1, 1, 1, 1]);
}

#[test]
fn pluriharmonic_maximum_on_the_sphere() {
    // sphere samples are closed under antipodes and contain the radial
    // projection of every interior sample
    let dirs = QuasiRandom::new(4, 3);
    let radii = QuasiRandom::new(1, 8);
    let coef = QuasiRandom::new(4, 21);
    for trial in 0..20u64 {
        let c: Vec<f64> = coef.point(trial).iter().map(|v| 2.0 * v - 1.0).collect();
        let u = |x: &[f64]| c[0] * x[0] - c[1] * x[1] + c[2] * x[2] - c[3] * x[3];
        let mut inside = f64::NEG_INFINITY;
        let mut sphere = f64::NEG_INFINITY;
        for n in 0..500u64 {
            let d = dirs.sphere_point(n);
            let r = radii.point(n)[0].powf(0.25) * 0.999;
            inside = inside.max(u(&d.iter().map(|v| r * v).collect::<Vec<_>>()));
            sphere = sphere.max(u(&d)).max(u(&d.iter().map(|v| -v).collect::<Vec<_>>()));
        }
        assert!(inside <= sphere + 1e-12, "{inside} > {sphere}");
    }
}
