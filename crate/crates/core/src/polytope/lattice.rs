use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use serde::Serialize;

use super::geometry::{centroid, Polytope, RANK_TOL};
use super::PolytopeError;
use crate::linalg::{apply_j_columns, column_basis, numeric_rank};

pub const MAX_GENERIC_FACETS: usize = 20;

#[derive(Clone, Debug)]
pub struct Face {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    pub dim: usize,
    /// Orthonormal columns spanning the direction space of the affine hull.
    pub basis: DMatrix<f64>,
    pub nu: usize,
    /// Centroid of the vertices; lies in the relative interior.
    pub witness: Vec<f64>,
    /// Indices into the factor lattices for product polytopes.
    pub parts: Option<Vec<usize>>,
}

impl Face {
    pub fn contains_face(&self, other: &Face) -> bool {
        is_subset(&other.vertices, &self.vertices)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct FaceSummary {
    pub id: usize,
    pub vertices: Vec<usize>,
    pub dim: usize,
    pub nu: usize,
}

pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Complex dimension of `W ∩ JW` for the span `W` of the orthonormal
/// columns of `basis`.
pub fn complex_dimension(basis: &DMatrix<f64>) -> Result<usize, PolytopeError> {
    let d = basis.ncols();
    if d == 0 {
        return Ok(0);
    }
    let jb = apply_j_columns(basis);
    let mut m = DMatrix::zeros(basis.nrows(), 2 * d);
    m.view_mut((0, 0), (basis.nrows(), d)).copy_from(basis);
    m.view_mut((0, d), (basis.nrows(), d)).copy_from(&jb);
    let r = numeric_rank(&m, RANK_TOL);
    let twice = 2 * d - r;
    if !twice.is_multiple_of(2) {
        return Err(PolytopeError::Parity { dim: d, rank: r });
    }
    Ok(twice / 2)
}

/// All non-empty faces of a polytope, the body included.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    n: usize,
    vertices: Vec<Vec<f64>>,
    faces: Vec<Face>,
    index: HashMap<Vec<usize>, usize>,
    body: usize,
    /// `up[i]`: faces containing face `i`, itself included.
    up: Vec<Vec<usize>>,
    factor_lattices: Option<Vec<FaceLattice>>,
}

fn make_face(
    vertices: &[Vec<f64>],
    idx: Vec<usize>,
    parts: Option<Vec<usize>>,
) -> Result<Face, PolytopeError> {
    let dd = vertices[0].len();
    let basis = if idx.len() <= 1 {
        DMatrix::zeros(dd, 0)
    } else {
        let diffs =
            DMatrix::from_fn(dd, idx.len() - 1, |r, c| vertices[idx[c + 1]][r] - vertices[idx[0]][r]);
        column_basis(&diffs, RANK_TOL)
    };
    let nu = complex_dimension(&basis)?;
    Ok(Face { dim: basis.ncols(), witness: centroid(vertices, &idx), vertices: idx, basis, nu, parts })
}

impl FaceLattice {
    fn assemble(
        n: usize,
        vertices: Vec<Vec<f64>>,
        mut faces: Vec<Face>,
        factor_lattices: Option<Vec<FaceLattice>>,
    ) -> Self {
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.vertices.cmp(&b.vertices)));
        let index: HashMap<Vec<usize>, usize> =
            faces.iter().enumerate().map(|(i, f)| (f.vertices.clone(), i)).collect();
        let body = faces.len() - 1;
        let up = match &factor_lattices {
            Some(ls) => {
                // containment is componentwise on the factor faces
                let by_parts: HashMap<&[usize], usize> = faces
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (f.parts.as_deref().expect("product face"), i))
                    .collect();
                faces
                    .iter()
                    .map(|f| {
                        let parts = f.parts.as_ref().expect("product face");
                        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
                        for (k, l) in ls.iter().enumerate() {
                            tuples = tuples
                                .into_iter()
                                .flat_map(|t| {
                                    l.superfaces(parts[k]).iter().map(move |&g| {
                                        let mut t = t.clone();
                                        t.push(g);
                                        t
                                    })
                                })
                                .collect();
                        }
                        let mut ids: Vec<usize> =
                            tuples.iter().map(|t| by_parts[t.as_slice()]).collect();
                        ids.sort_unstable();
                        ids
                    })
                    .collect()
            }
            None => (0..faces.len())
                .map(|i| {
                    (i..faces.len()).filter(|&j| faces[j].contains_face(&faces[i])).collect()
                })
                .collect(),
        };
        FaceLattice { n, vertices, faces, index, body, up, factor_lattices }
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn body(&self) -> usize {
        self.body
    }

    pub fn proper(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(move |&i| i != self.body)
    }

    pub fn find(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    /// Faces containing `id`, itself included.
    pub fn superfaces(&self, id: usize) -> &[usize] {
        &self.up[id]
    }

    /// Faces contained in `id`, itself included.
    pub fn subfaces(&self, id: usize) -> Vec<usize> {
        (0..=id).filter(|&j| self.up[j].contains(&id)).collect()
    }

    /// Subfaces of dimension one less.
    pub fn facets_of(&self, id: usize) -> Vec<usize> {
        let d = self.faces[id].dim;
        self.subfaces(id).into_iter().filter(|&j| self.faces[j].dim + 1 == d).collect()
    }

    pub fn factor_lattices(&self) -> Option<&[FaceLattice]> {
        self.factor_lattices.as_deref()
    }

    pub fn summary(&self, id: usize) -> FaceSummary {
        let f = &self.faces[id];
        FaceSummary { id, vertices: f.vertices.clone(), dim: f.dim, nu: f.nu }
    }
}

/// Face lattice; products use the factor lattices.
pub fn face_lattice(p: &Polytope) -> Result<FaceLattice, PolytopeError> {
    match p.factors() {
        Some(factors) => product_lattice(p, factors),
        None => generic_lattice(p),
    }
}

/// Faces as intersection-closure of the facet vertex sets.
pub fn generic_lattice(p: &Polytope) -> Result<FaceLattice, PolytopeError> {
    let facets = p.facets();
    if facets.len() > MAX_GENERIC_FACETS {
        return Err(PolytopeError::FacetCap { got: facets.len(), max: MAX_GENERIC_FACETS });
    }
    let mut sets: BTreeSet<Vec<usize>> = facets.iter().map(|f| f.vertices.clone()).collect();
    let mut frontier: Vec<Vec<usize>> = sets.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for f in facets {
                let meet: Vec<usize> =
                    a.iter().copied().filter(|v| f.vertices.binary_search(v).is_ok()).collect();
                if !meet.is_empty() && sets.insert(meet.clone()) {
                    next.push(meet);
                }
            }
        }
        frontier = next;
    }
    sets.insert((0..p.vertices().len()).collect());
    let faces = sets
        .into_iter()
        .map(|s| make_face(p.vertices(), s, None))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FaceLattice::assemble(p.complex_dim(), p.vertices().to_vec(), faces, None))
}

fn product_lattice(p: &Polytope, factors: &[Polytope]) -> Result<FaceLattice, PolytopeError> {
    let lattices = factors.iter().map(generic_lattice).collect::<Result<Vec<_>, _>>()?;
    let sizes: Vec<usize> = factors.iter().map(|f| f.vertices().len()).collect();
    let mut faces = Vec::new();
    let mut choice = vec![0usize; lattices.len()];
    loop {
        // row-major vertex indices of the product face
        let mut idx = vec![0usize];
        for (k, l) in lattices.iter().enumerate() {
            let part = &l.faces[choice[k]].vertices;
            let size = sizes[k];
            idx = idx.iter().flat_map(|&b| part.iter().map(move |&v| b * size + v)).collect();
        }
        idx.sort_unstable();
        faces.push(make_face(p.vertices(), idx, Some(choice.clone()))?);
        let mut k = lattices.len();
        loop {
            if k == 0 {
                return Ok(FaceLattice::assemble(
                    p.complex_dim(),
                    p.vertices().to_vec(),
                    faces,
                    Some(lattices),
                ));
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < lattices[k].faces.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{product, product_of, standard_triangle, unit_square, build_polytope};

    fn hypercube() -> Polytope {
        let v: Vec<Vec<f64>> = (0..16)
            .map(|m| (0..4).map(|b| ((m >> b) & 1) as f64).collect())
            .collect();
        build_polytope(v, 2).unwrap()
    }

    fn by_dim(l: &FaceLattice) -> Vec<usize> {
        let top = l.faces().iter().map(|f| f.dim).max().unwrap();
        (0..=top).map(|d| l.faces().iter().filter(|f| f.dim == d).count()).collect()
    }

    #[test]
    fn square_lattice() {
        let l = face_lattice(&unit_square()).unwrap();
        assert_eq!(by_dim(&l), vec![4, 4, 1]);
        assert_eq!(l.face(l.body()).nu, 1);
    }

    #[test]
    fn hypercube_lattice() {
        let l = face_lattice(&hypercube()).unwrap();
        assert_eq!(l.faces().len(), 81);
        assert_eq!(by_dim(&l), vec![16, 32, 24, 8, 1]);
    }

    #[test]
    fn triangle_squared_lattice() {
        let tt = product(&standard_triangle(), &standard_triangle()).unwrap();
        let l = face_lattice(&tt).unwrap();
        assert_eq!(l.faces().len(), 49);
        assert!(l.factor_lattices().is_some());
    }

    #[test]
    fn compositional_matches_generic() {
        for p in [
            product(&unit_square(), &unit_square()).unwrap(),
            product(&standard_triangle(), &unit_square()).unwrap(),
            product_of(&[standard_triangle(), standard_triangle(), standard_triangle()]).unwrap(),
        ] {
            let a = face_lattice(&p).unwrap();
            let b = generic_lattice(&p).unwrap();
            assert_eq!(a.faces().len(), b.faces().len());
            for (x, y) in a.faces().iter().zip(b.faces()) {
                assert_eq!(x.vertices, y.vertices);
                assert_eq!((x.dim, x.nu), (y.dim, y.nu));
            }
        }
    }

    #[test]
    fn closed_under_intersection() {
        let l = face_lattice(&hypercube()).unwrap();
        for a in l.faces() {
            for b in l.faces() {
                let meet: Vec<usize> =
                    a.vertices.iter().copied().filter(|v| b.vertices.contains(v)).collect();
                if !meet.is_empty() {
                    assert!(l.find(&meet).is_some());
                }
            }
        }
    }

    #[test]
    fn nu_of_product_faces_adds() {
        let tt = product(&standard_triangle(), &standard_triangle()).unwrap();
        let l = face_lattice(&tt).unwrap();
        let f = l.factor_lattices().unwrap();
        for face in l.faces() {
            let parts = face.parts.as_ref().unwrap();
            let sum: usize = parts.iter().zip(f).map(|(&i, fl)| fl.face(i).nu).sum();
            assert_eq!(face.nu, sum);
        }
    }

    #[test]
    fn nu_examples() {
        let ss = product(&unit_square(), &unit_square()).unwrap();
        let l = face_lattice(&ss).unwrap();
        // an edge x edge face: both parts one-dimensional
        let ee = l
            .faces()
            .iter()
            .find(|f| {
                let p = f.parts.as_ref().unwrap();
                p.iter().zip(l.factor_lattices().unwrap()).all(|(&i, fl)| fl.face(i).dim == 1)
            })
            .unwrap();
        assert_eq!((ee.dim, ee.nu), (2, 0));
        assert_eq!(l.face(l.body()).nu, 2);
        let tt = product(&standard_triangle(), &standard_triangle()).unwrap();
        let lt = face_lattice(&tt).unwrap();
        let vq = lt
            .faces()
            .iter()
            .find(|f| {
                let p = f.parts.as_ref().unwrap();
                let fl = lt.factor_lattices().unwrap();
                fl[0].face(p[0]).dim == 0 && fl[1].face(p[1]).dim == 2
            })
            .unwrap();
        assert_eq!((vq.dim, vq.nu), (2, 1));
    }

    #[test]
    fn facet_cap() {
        let p = crate::polytope::regular_polygon(21, 1.0, [0.0, 0.0], 0.0).unwrap();
        assert!(matches!(face_lattice(&p), Err(PolytopeError::FacetCap { .. })));
    }

    #[test]
    fn totally_real_plane() {
        // span{e_x1, e_x2} in C^2
        let b = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(complex_dimension(&b).unwrap(), 0);
        let c = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
        assert_eq!(complex_dimension(&c).unwrap(), 1);
        assert_eq!(complex_dimension(&DMatrix::identity(6, 6)).unwrap(), 3);
    }
}
