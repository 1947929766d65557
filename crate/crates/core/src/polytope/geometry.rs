use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::PolytopeError;
use crate::linalg::{null_space, numeric_rank};

pub const MAX_VERTICES: usize = 64;
pub const MAX_PRODUCT_VERTICES: usize = 4096;
pub(crate) const RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Facet {
    /// Unit outward normal.
    pub normal: Vec<f64>,
    pub offset: f64,
    /// Sorted indices of the vertices on the facet.
    pub vertices: Vec<usize>,
}

impl Facet {
    pub fn slack(&self, p: &[f64]) -> f64 {
        self.offset - dot(&self.normal, p)
    }
}

/// A full-dimensional convex polytope in `C^N = R^{2N}`.
#[derive(Clone, Debug)]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
    factors: Option<Vec<Polytope>>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn coord_scale(vertices: &[Vec<f64>]) -> f64 {
    vertices.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Affine rank of the points `idx` of `vertices`.
pub(crate) fn affine_rank(vertices: &[Vec<f64>], idx: &[usize]) -> usize {
    if idx.len() <= 1 {
        return 0;
    }
    let d = vertices[idx[0]].len();
    let m = DMatrix::from_fn(d, idx.len() - 1, |r, c| vertices[idx[c + 1]][r] - vertices[idx[0]][r]);
    numeric_rank(&m, RANK_TOL)
}

impl Polytope {
    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Factor polytopes when built by [`product`], flattened.
    pub fn factors(&self) -> Option<&[Polytope]> {
        self.factors.as_deref()
    }

    pub fn tolerance(&self) -> f64 {
        1e-9 * coord_scale(&self.vertices)
    }

    pub fn centroid(&self) -> Vec<f64> {
        centroid(&self.vertices, &(0..self.vertices.len()).collect::<Vec<_>>())
    }

    /// `offset - normal . p` for every facet; all positive inside.
    pub fn slacks(&self, p: &[f64]) -> Vec<f64> {
        self.facets.iter().map(|f| f.slack(p)).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        let tol = self.tolerance();
        self.facets.iter().all(|f| f.slack(p) >= -tol)
    }
}

pub(crate) fn centroid(vertices: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let d = vertices[idx[0]].len();
    let mut c = vec![0.0; d];
    for &i in idx {
        for (a, b) in c.iter_mut().zip(&vertices[i]) {
            *a += b;
        }
    }
    c.iter_mut().for_each(|a| *a /= idx.len() as f64);
    c
}

/// Convex hull of `vertices` in `C^n`, facets found by brute force over
/// affinely independent vertex subsets.
pub fn build_polytope(vertices: Vec<Vec<f64>>, n: usize) -> Result<Polytope, PolytopeError> {
    let d = 2 * n;
    if n == 0 {
        return Err(PolytopeError::Degenerate("complex dimension must be at least 1".into()));
    }
    if vertices.len() > MAX_VERTICES {
        return Err(PolytopeError::TooManyVertices { got: vertices.len(), max: MAX_VERTICES });
    }
    for (i, v) in vertices.iter().enumerate() {
        if v.len() != d {
            return Err(PolytopeError::VertexDimension { index: i, got: v.len(), expected: d });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(PolytopeError::NonFinite(i));
        }
    }
    let tol = 1e-9 * coord_scale(&vertices);
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(vertices.len());
    for (i, v) in vertices.into_iter().enumerate() {
        if kept.iter().any(|w| w.iter().zip(&v).all(|(a, b)| (a - b).abs() <= tol)) {
            log::warn!("vertex {i} repeats an earlier vertex; dropped");
        } else {
            kept.push(v);
        }
    }
    if kept.len() < d + 1 || affine_rank(&kept, &(0..kept.len()).collect::<Vec<_>>()) < d {
        return Err(PolytopeError::Degenerate(format!(
            "vertices do not span R^{d}; no interior point"
        )));
    }
    loop {
        let facets = enumerate_facets(&kept, tol);
        let extreme: Vec<bool> = (0..kept.len())
            .map(|v| {
                let normals: Vec<&Facet> =
                    facets.iter().filter(|f| f.vertices.binary_search(&v).is_ok()).collect();
                let m = DMatrix::from_fn(d, normals.len(), |r, c| normals[c].normal[r]);
                numeric_rank(&m, RANK_TOL) == d
            })
            .collect();
        if extreme.iter().all(|&e| e) {
            return Ok(Polytope { n, vertices: kept, facets, factors: None });
        }
        let before = kept.len();
        kept = kept
            .into_iter()
            .zip(&extreme)
            .enumerate()
            .filter_map(|(i, (v, &e))| {
                if !e {
                    log::warn!("vertex {i} is not extreme; pruned");
                }
                e.then_some(v)
            })
            .collect();
        debug_assert!(kept.len() < before);
    }
}

fn hyperplane(vertices: &[Vec<f64>], idx: &[usize]) -> Option<(Vec<f64>, f64)> {
    let d = vertices[0].len();
    let m = DMatrix::from_fn(idx.len() - 1, d, |r, c| vertices[idx[r + 1]][c] - vertices[idx[0]][c]);
    let ns = null_space(&m, RANK_TOL);
    if ns.ncols() != 1 {
        return None;
    }
    let normal: Vec<f64> = ns.column(0).iter().copied().collect();
    let offset = dot(&normal, &vertices[idx[0]]);
    Some((normal, offset))
}

fn enumerate_facets(vertices: &[Vec<f64>], tol: f64) -> Vec<Facet> {
    let d = vertices[0].len();
    let m = vertices.len();
    // Grow affinely independent index sets; prune as soon as a point is dependent.
    fn grow(
        vertices: &[Vec<f64>],
        d: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == d {
            out.push(current.clone());
            return;
        }
        let start = current.last().map_or(0, |&l| l + 1);
        let need = d - current.len();
        for next in start..=(vertices.len().saturating_sub(need)) {
            current.push(next);
            if affine_rank(vertices, current) == current.len() - 1 {
                grow(vertices, d, current, out);
            }
            current.pop();
        }
    }
    let found: Vec<Facet> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut subsets = Vec::new();
            let mut current = vec![first];
            grow(vertices, d, &mut current, &mut subsets);
            subsets.into_iter().filter_map(|s| {
                let (mut normal, mut offset) = hyperplane(vertices, &s)?;
                let values: Vec<f64> = vertices.iter().map(|v| dot(&normal, v) - offset).collect();
                let above = values.iter().any(|&x| x > tol);
                let below = values.iter().any(|&x| x < -tol);
                if above && below {
                    return None;
                }
                if above {
                    normal.iter_mut().for_each(|x| *x = -*x);
                    offset = -offset;
                }
                let on: Vec<usize> = (0..values.len()).filter(|&i| values[i].abs() <= tol).collect();
                Some(Facet { normal, offset, vertices: on })
            })
        })
        .collect();
    let mut seen = BTreeSet::new();
    let mut facets: Vec<Facet> =
        found.into_iter().filter(|f| seen.insert(f.vertices.clone())).collect();
    facets.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    facets
}

/// Cartesian product; coordinates of `p` come first.
pub fn product(p: &Polytope, q: &Polytope) -> Result<Polytope, PolytopeError> {
    let (mp, mq) = (p.vertices.len(), q.vertices.len());
    if mp * mq > MAX_PRODUCT_VERTICES {
        return Err(PolytopeError::TooManyVertices { got: mp * mq, max: MAX_PRODUCT_VERTICES });
    }
    let vertices: Vec<Vec<f64>> = (0..mp)
        .flat_map(|i| (0..mq).map(move |j| (i, j)))
        .map(|(i, j)| p.vertices[i].iter().chain(&q.vertices[j]).copied().collect())
        .collect();
    let (dp, dq) = (p.real_dim(), q.real_dim());
    let mut facets = Vec::with_capacity(p.facets.len() + q.facets.len());
    for f in &p.facets {
        facets.push(Facet {
            normal: f.normal.iter().copied().chain(std::iter::repeat_n(0.0, dq)).collect(),
            offset: f.offset,
            vertices: f.vertices.iter().flat_map(|&i| (0..mq).map(move |j| i * mq + j)).collect(),
        });
    }
    for g in &q.facets {
        facets.push(Facet {
            normal: std::iter::repeat_n(0.0, dp).chain(g.normal.iter().copied()).collect(),
            offset: g.offset,
            vertices: (0..mp).flat_map(|i| g.vertices.iter().map(move |&j| i * mq + j)).collect(),
        });
    }
    let mut factors: Vec<Polytope> = Vec::new();
    for side in [p, q] {
        match &side.factors {
            Some(fs) => factors.extend(fs.iter().cloned()),
            None => factors.push(side.clone()),
        }
    }
    Ok(Polytope { n: p.n + q.n, vertices, facets, factors: Some(factors) })
}

/// Regular `k`-gon in `C` with a vertex at angle `rotation`.
pub fn regular_polygon(
    k: usize,
    radius: f64,
    center: [f64; 2],
    rotation: f64,
) -> Result<Polytope, PolytopeError> {
    if k < 3 {
        return Err(PolytopeError::Degenerate(format!("a polygon needs 3 vertices, got {k}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(PolytopeError::Degenerate(format!("radius {radius} is not positive")));
    }
    let verts = (0..k)
        .map(|j| {
            let a = rotation + 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]
        })
        .collect();
    build_polytope(verts, 1)
}

pub fn unit_square() -> Polytope {
    build_polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], 1)
        .expect("unit square")
}

pub fn standard_triangle() -> Polytope {
    build_polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 1).expect("triangle")
}

/// Product of the given factors, left to right.
pub fn product_of(factors: &[Polytope]) -> Result<Polytope, PolytopeError> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| PolytopeError::Degenerate("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, f| product(&acc, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_supporting(p: &Polytope) {
        let tol = p.tolerance();
        for f in p.facets() {
            let norm: f64 = f.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
            for (i, v) in p.vertices().iter().enumerate() {
                let s = f.slack(v);
                assert!(s >= -tol);
                assert_eq!(s.abs() <= tol, f.vertices.binary_search(&i).is_ok());
            }
        }
    }

    #[test]
    fn square_has_four_facets() {
        let s = unit_square();
        assert_eq!(s.facets().len(), 4);
        check_supporting(&s);
    }

    #[test]
    fn cross_polytope_has_sixteen_facets() {
        let mut v = Vec::new();
        for i in 0..4 {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; 4];
                e[i] = sign;
                v.push(e);
            }
        }
        let p = build_polytope(v, 2).unwrap();
        assert_eq!(p.facets().len(), 16);
        check_supporting(&p);
    }

    #[test]
    fn hypercube_has_eight_facets() {
        let v: Vec<Vec<f64>> = (0..16)
            .map(|m| (0..4).map(|b| ((m >> b) & 1) as f64).collect())
            .collect();
        let p = build_polytope(v, 2).unwrap();
        assert_eq!(p.facets().len(), 8);
        check_supporting(&p);
    }

    #[test]
    fn interior_and_repeated_vertices_pruned() {
        let v = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.5, 0.0],
        ];
        let p = build_polytope(v, 1).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
    }

    #[test]
    fn degenerate_hull_rejected() {
        let v = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(build_polytope(v, 1), Err(PolytopeError::Degenerate(_))));
        let point = vec![vec![0.5, 0.5]];
        assert!(build_polytope(point, 1).is_err());
    }

    #[test]
    fn products() {
        let ss = product(&unit_square(), &unit_square()).unwrap();
        assert_eq!(ss.vertices().len(), 16);
        assert_eq!(ss.facets().len(), 8);
        check_supporting(&ss);
        let tt = product(&standard_triangle(), &standard_triangle()).unwrap();
        assert_eq!(tt.vertices().len(), 9);
        assert_eq!(tt.facets().len(), 6);
        assert_eq!(tt.complex_dim(), 2);
        check_supporting(&tt);
        let t3 = product(&tt, &standard_triangle()).unwrap();
        assert_eq!(t3.factors().unwrap().len(), 3);
        assert_eq!(t3.facets().len(), 9);
        check_supporting(&t3);
    }

    #[test]
    fn product_vertex_cap() {
        let big = regular_polygon(64, 1.0, [0.0, 0.0], 0.0).unwrap();
        let b2 = product(&big, &big).unwrap();
        assert_eq!(b2.vertices().len(), 4096);
        assert!(matches!(
            product(&b2, &unit_square()),
            Err(PolytopeError::TooManyVertices { .. })
        ));
    }
}
