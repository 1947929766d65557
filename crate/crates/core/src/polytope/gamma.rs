use serde::Serialize;

use super::geometry::Polytope;
use super::lattice::{FaceLattice, FaceSummary};
use super::sample::sample_faces;
use super::PolytopeError;
use crate::dimension::PointCloud;
use crate::linalg::{apply_j_columns, complex_orthonormalize, null_space_abs, real_to_complex, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub face: usize,
    pub nu: usize,
    pub kind: PointKind,
}

/// The face whose relative interior contains the boundary point `p`.
pub fn classify_boundary_point(
    poly: &Polytope,
    lattice: &FaceLattice,
    p: &[f64],
) -> Result<Classification, PolytopeError> {
    if p.len() != poly.real_dim() {
        return Err(PolytopeError::PointDimension { got: p.len(), expected: poly.real_dim() });
    }
    let tol = poly.tolerance();
    let slacks = poly.slacks(p);
    if slacks.iter().any(|&s| s < -tol) {
        return Err(PolytopeError::NotOnBoundary { kind: "exterior", slacks });
    }
    let mut verts: Option<Vec<usize>> = None;
    for (f, s) in poly.facets().iter().zip(&slacks) {
        if s.abs() <= tol {
            verts = Some(match verts {
                None => f.vertices.clone(),
                Some(v) => v.into_iter().filter(|i| f.vertices.binary_search(i).is_ok()).collect(),
            });
        }
    }
    let verts = verts.ok_or(PolytopeError::NotOnBoundary { kind: "interior", slacks })?;
    let face = lattice.find(&verts).ok_or(PolytopeError::LostFace(verts))?;
    let nu = lattice.face(face).nu;
    Ok(Classification {
        face,
        nu,
        kind: if nu == 0 { PointKind::Real } else { PointKind::Complex },
    })
}

/// Proper faces whose relative interiors make up `Γ_q`: every proper face
/// containing them has `ν >= q`.
pub fn gamma_q(lattice: &FaceLattice, q: usize) -> Vec<usize> {
    let body = lattice.body();
    lattice
        .proper()
        .filter(|&f| {
            lattice
                .superfaces(f)
                .iter()
                .filter(|&&g| g != body)
                .all(|&g| lattice.face(g).nu >= q)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ShilovResult {
    pub q: usize,
    /// Proper faces outside `Γ_{q+1}`; downward closed.
    pub shilov_faces: Vec<usize>,
    /// Inclusion-maximal members of `shilov_faces`.
    pub maximal_faces: Vec<usize>,
    pub gamma_faces: Vec<usize>,
    pub cloud: PointCloud,
    /// Face sampled for each cloud point.
    pub cloud_faces: Vec<usize>,
}

/// `bD ∖ Γ_{q+1}` as a face set, with `cloud_count` points sampled on it.
pub fn shilov_psh(
    lattice: &FaceLattice,
    q: usize,
    cloud_count: usize,
    seed: u64,
) -> Result<ShilovResult, PolytopeError> {
    let gamma_faces = gamma_q(lattice, q + 1);
    let shilov_faces: Vec<usize> =
        lattice.proper().filter(|f| gamma_faces.binary_search(f).is_err()).collect();
    let maximal_faces = maximal(lattice, &shilov_faces);
    let (cloud, cloud_faces) = sample_faces(lattice, &maximal_faces, cloud_count, seed)?;
    Ok(ShilovResult { q, shilov_faces, maximal_faces, gamma_faces, cloud, cloud_faces })
}

pub(crate) fn maximal(lattice: &FaceLattice, set: &[usize]) -> Vec<usize> {
    set.iter()
        .copied()
        .filter(|&f| {
            !lattice.superfaces(f).iter().any(|&g| g != f && set.binary_search(&g).is_ok())
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ShilovReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub faces: Vec<FaceSummary>,
    pub shilov_faces: Vec<usize>,
    pub maximal_faces: Vec<usize>,
    pub gamma_faces: Vec<usize>,
    pub cloud_points: usize,
}

impl ShilovResult {
    pub fn report(&self, lattice: &FaceLattice) -> ShilovReport {
        ShilovReport {
            n: lattice.complex_dim(),
            q: self.q,
            faces: lattice.proper().map(|f| lattice.summary(f)).collect(),
            shilov_faces: self.shilov_faces.clone(),
            maximal_faces: self.maximal_faces.clone(),
            gamma_faces: self.gamma_faces.clone(),
            cloud_points: self.cloud.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FoliationPlane {
    pub face: usize,
    /// Orthonormal complex basis of `W ∩ JW`.
    pub basis: Vec<Vec<(f64, f64)>>,
    pub component: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FoliationReport {
    pub q: usize,
    pub planes: Vec<FoliationPlane>,
    /// Groups of faces whose relative interiors are connected through
    /// containment.
    pub components: Vec<Vec<usize>>,
    /// The faces with `ν >= q+1` form an upward-closed set, i.e. those points
    /// are open in the boundary.
    pub openness: bool,
    /// For `q = N-1`: all planes of a component coincide.
    pub parallel_within_components: Option<bool>,
}

/// Orthonormal complex basis of `W ∩ JW` for a face basis `B`.
pub(crate) fn complex_part(basis: &nalgebra::DMatrix<f64>) -> Vec<Vec<C64>> {
    if basis.ncols() == 0 {
        return Vec::new();
    }
    let jb = apply_j_columns(basis);
    let proj = &jb - basis * (basis.transpose() * &jb);
    // the basis is orthonormal, so an absolute cut-off is scale-free
    let coeffs = null_space_abs(&proj, 1e-9);
    let real = basis * coeffs;
    let vecs: Vec<Vec<C64>> = real
        .column_iter()
        .map(|c| real_to_complex(&c.iter().copied().collect::<Vec<_>>()))
        .collect();
    complex_orthonormalize(&vecs, 1e-8)
}

fn subspace_gap(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    // largest residual of b's vectors after projection onto span(a)
    b.iter()
        .map(|v| {
            let mut r = v.clone();
            for u in a {
                let c = crate::linalg::cdot(u, v);
                for (x, y) in r.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
            crate::linalg::cnorm(&r)
        })
        .fold(if a.len() == b.len() { 0.0 } else { f64::INFINITY }, f64::max)
}

/// Complex `q`-planes on the exactly `q`-complex faces of `Γ_q ∖ Γ_{q+1}`.
pub fn foliation_planes(lattice: &FaceLattice, q: usize) -> FoliationReport {
    let n = lattice.complex_dim();
    let body = lattice.body();
    let openness = lattice.proper().filter(|&f| lattice.face(f).nu > q).all(|f| {
        lattice.superfaces(f).iter().filter(|&&g| g != body).all(|&g| lattice.face(g).nu > q)
    });
    if q == 0 {
        return FoliationReport {
            q,
            planes: vec![],
            components: vec![],
            openness,
            parallel_within_components: None,
        };
    }
    let upper = gamma_q(lattice, q + 1);
    let faces: Vec<usize> = gamma_q(lattice, q)
        .into_iter()
        .filter(|f| upper.binary_search(f).is_err() && lattice.face(*f).nu == q)
        .collect();
    // union-find over containment
    let mut parent: Vec<usize> = (0..faces.len()).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (a, &fa) in faces.iter().enumerate() {
        for (b, &fb) in faces.iter().enumerate().skip(a + 1) {
            if lattice.superfaces(fa).contains(&fb) || lattice.superfaces(fb).contains(&fa) {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let roots: Vec<usize> = (0..faces.len()).map(|i| root(&mut parent, i)).collect();
    let mut distinct: Vec<usize> = roots.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let component_of = |i: usize| distinct.binary_search(&roots[i]).expect("root listed");
    let bases: Vec<Vec<Vec<C64>>> =
        faces.iter().map(|&f| complex_part(&lattice.face(f).basis)).collect();
    let components: Vec<Vec<usize>> = distinct
        .iter()
        .map(|&r| (0..faces.len()).filter(|&i| roots[i] == r).map(|i| faces[i]).collect())
        .collect();
    let parallel_within_components = (q + 1 == n).then(|| {
        (0..faces.len()).all(|i| {
            (0..faces.len())
                .filter(|&j| roots[j] == roots[i])
                .all(|j| subspace_gap(&bases[i], &bases[j]) < 1e-8)
        })
    });
    let planes = faces
        .iter()
        .enumerate()
        .map(|(i, &face)| FoliationPlane {
            face,
            basis: bases[i].iter().map(|v| v.iter().map(|c| (c.re, c.im)).collect()).collect(),
            component: component_of(i),
        })
        .collect();
    FoliationReport { q, planes, components, openness, parallel_within_components }
}
