use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lattice::FaceLattice;
use super::PolytopeError;
use crate::dimension::PointCloud;

/// Pulling triangulation of a face: cone from its first vertex over the
/// triangulated facets of the face that miss that vertex.
pub fn triangulate(lattice: &FaceLattice, face: usize) -> Vec<Vec<usize>> {
    let mut memo = HashMap::new();
    pull(lattice, face, &mut memo)
}

fn pull(
    lattice: &FaceLattice,
    face: usize,
    memo: &mut HashMap<usize, Vec<Vec<usize>>>,
) -> Vec<Vec<usize>> {
    if let Some(t) = memo.get(&face) {
        return t.clone();
    }
    let f = lattice.face(face);
    let apex = f.vertices[0];
    let out = if f.dim == 0 {
        vec![vec![apex]]
    } else {
        let mut out = Vec::new();
        for g in lattice.facets_of(face) {
            if lattice.face(g).vertices.binary_search(&apex).is_ok() {
                continue;
            }
            for mut s in pull(lattice, g, memo) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    };
    memo.insert(face, out.clone());
    out
}

fn simplex_volume(vertices: &[Vec<f64>], s: &[usize]) -> f64 {
    let k = s.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let d = vertices[s[0]].len();
    let e = DMatrix::from_fn(d, k, |r, c| vertices[s[c + 1]][r] - vertices[s[0]][r]);
    let g = e.transpose() * e;
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    g.determinant().max(0.0).sqrt() / fact
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("non-empty");
    let x = u * total;
    cumulative.partition_point(|&c| c <= x).min(cumulative.len() - 1)
}

/// `count` points spread over the closed faces `faces`. Within a face the
/// density is uniform; faces are weighted by volume times `l^(dmax - d)`
/// with `l` the mean edge length.
pub fn sample_faces(
    lattice: &FaceLattice,
    faces: &[usize],
    count: usize,
    seed: u64,
) -> Result<(PointCloud, Vec<usize>), PolytopeError> {
    let dim = 2 * lattice.complex_dim();
    let mut cloud = PointCloud::new(dim, "polytope");
    if count == 0 || faces.is_empty() {
        return Ok((cloud, Vec::new()));
    }
    let verts = lattice.vertices();
    let edges: Vec<f64> = lattice
        .faces()
        .iter()
        .filter(|f| f.dim == 1)
        .map(|f| {
            let (a, b) = (&verts[f.vertices[0]], &verts[f.vertices[f.vertices.len() - 1]]);
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        })
        .collect();
    let ell = if edges.is_empty() { 1.0 } else { edges.iter().sum::<f64>() / edges.len() as f64 };
    let dmax = faces.iter().map(|&f| lattice.face(f).dim).max().unwrap_or(0);
    let mut memo = HashMap::new();
    let mut per_face = Vec::new();
    let mut face_cum = Vec::new();
    let mut acc = 0.0;
    for &f in faces {
        let simplices = pull(lattice, f, &mut memo);
        let mut cum = Vec::with_capacity(simplices.len());
        let mut vol = 0.0;
        for s in &simplices {
            vol += simplex_volume(verts, s);
            cum.push(vol);
        }
        acc += vol * ell.powi((dmax - lattice.face(f).dim) as i32);
        face_cum.push(acc);
        per_face.push((simplices, cum));
    }
    if !(acc > 0.0) {
        return Err(PolytopeError::Sampling("faces have zero total volume".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let fi = pick(&face_cum, rng.random());
        let (simplices, cum) = &per_face[fi];
        let s = &simplices[pick(cum, rng.random())];
        let w: Vec<f64> = s.iter().map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = w.iter().sum();
        let mut p = vec![0.0; dim];
        for (wi, &v) in w.iter().zip(s) {
            for (x, y) in p.iter_mut().zip(&verts[v]) {
                *x += wi / total * y;
            }
        }
        cloud.push(p).map_err(|e| PolytopeError::Sampling(e.to_string()))?;
        labels.push(faces[fi]);
    }
    Ok((cloud, labels))
}
