//! Convex polytopes in `C^N`: face lattices, complex dimensions of faces and
//! the Shilov boundaries for q-plurisubharmonic functions.

mod gamma;
mod document;
mod geometry;
mod lattice;
mod oracle;
mod sample;

pub use gamma::{
    classify_boundary_point, foliation_planes, gamma_q, shilov_psh, Classification,
    FoliationPlane, FoliationReport, PointKind, ShilovReport, ShilovResult,
};
pub use document::{PolygonSpec, PolytopeDocument};
pub use geometry::{
    build_polytope, product, product_of, regular_polygon, standard_triangle, unit_square, Facet,
    Polytope, MAX_PRODUCT_VERTICES, MAX_VERTICES,
};
pub use lattice::{
    complex_dimension, face_lattice, generic_lattice, Face, FaceLattice, FaceSummary,
    MAX_GENERIC_FACETS,
};
pub use oracle::{linear_exposure_oracle, ExposureReport, HoloQuadratic, Violation};
pub use sample::{sample_faces, triangulate};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("degenerate polytope: {0}")]
    Degenerate(String),
    #[error("{got} vertices exceed the limit of {max}")]
    TooManyVertices { got: usize, max: usize },
    #[error("vertex {index} has {got} coordinates, expected {expected}")]
    VertexDimension { index: usize, got: usize, expected: usize },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("{got} facets exceed the generic lattice limit of {max}; build the polytope as a product")]
    FacetCap { got: usize, max: usize },
    #[error("direction space of dimension {dim} has rank [B|JB] = {rank}; odd complex part, retry with a tighter tolerance")]
    Parity { dim: usize, rank: usize },
    #[error("point is {kind} (facet slacks {slacks:?})")]
    NotOnBoundary { kind: &'static str, slacks: Vec<f64> },
    #[error("point has {got} coordinates, polytope lives in R^{expected}")]
    PointDimension { got: usize, expected: usize },
    #[error("active facets meet in a vertex set that is not a face: {0:?}")]
    LostFace(Vec<usize>),
    #[error("invalid polytope document: {0}")]
    Document(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
}
