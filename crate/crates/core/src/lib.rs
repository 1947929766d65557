//! Shilov boundaries for families of upper semi-continuous functions.
//!
//! Finite spaces are handled exactly ([`finite`]), convex polytopes in `C^N`
//! through their face lattices ([`polytope`]) and smoothly bounded domains
//! through the Levi form ([`smooth`]). [`qpsh`] has the pointwise calculus
//! and [`dimension`] a box-counting estimator for the sampled boundaries.

pub mod dimension;
pub mod finite;
pub mod linalg;
pub mod polytope;
pub mod qpsh;
pub mod qrng;
pub mod quadrature;
pub mod registry;
pub mod smooth;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/finite.md")]
    pub struct Finite;
    #[doc = include_str!("../../../book/src/qpsh.md")]
    pub struct Qpsh;
    #[doc = include_str!("../../../book/src/polytopes.md")]
    pub struct Polytopes;
    #[doc = include_str!("../../../book/src/smooth.md")]
    pub struct Smooth;
    #[doc = include_str!("../../../book/src/dimension.md")]
    pub struct Dimension;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
