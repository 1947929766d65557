//! Pointwise calculus for q-plurisubharmonic and q-holomorphic functions.

mod field;
mod glue;
mod hessian;
mod regmax;
mod spectrum;

pub use field::{
    CPoint, ComplexScalarField, DomainBox, Field, FieldValue, ScalarField, Stencil, DEFAULT_STEP,
};
pub use glue::{glue_peak, Ball, GlueError, GlueRegion};
pub use hessian::{
    bordered_matrix, complex_hessian, hermitian_defect, qholo_rank, qpsh_index, strictly_qpsh,
    DEFAULT_RANK_TOL,
};
pub use regmax::{
    reg_max, reg_max_compose, reg_max_field, BumpKernel, RegMaxFieldReport, RegMaxParams,
    DEFAULT_NODES, MAX_ARGS,
};
pub use spectrum::{HermitianSpectrum, SpectrumSummary};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("invalid point: {0}")]
    BadPoint(String),
    #[error("point has complex dimension {got}, field expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("stencil around {0:?} leaves the domain box")]
    OutsideDomain(Vec<f64>),
    #[error("non-finite value at {0:?}")]
    Evaluation(Vec<f64>),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("reg_max takes 1..={max} arguments, got {got}")]
    Arity { got: usize, max: usize },
    #[error("epsilon {index} is {value}; must be positive and finite")]
    BadEpsilon { index: usize, value: f64 },
    #[error("{0} quadrature nodes requested; at least 8 required")]
    TooFewNodes(usize),
    #[error("{got} arguments for {expected} epsilons")]
    ArgumentMismatch { got: usize, expected: usize },
    #[error("fields live in different dimensions")]
    MixedFields,
}
