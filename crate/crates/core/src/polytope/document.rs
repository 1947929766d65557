use serde::Deserialize;

use super::geometry::{build_polytope, product_of, regular_polygon, Polytope};
use super::PolytopeError;

/// A planar factor: regular `k`-gon or explicit vertices.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolygonSpec {
    pub k: Option<usize>,
    pub radius: Option<f64>,
    pub center: Option<[f64; 2]>,
    pub rotation: Option<f64>,
    pub vertices: Option<Vec<[f64; 2]>>,
}

impl PolygonSpec {
    pub fn build(&self) -> Result<Polytope, PolytopeError> {
        match (&self.vertices, self.k) {
            (Some(v), None) if self.radius.is_none() && self.center.is_none() => {
                build_polytope(v.iter().map(|p| p.to_vec()).collect(), 1)
            }
            (None, Some(k)) => regular_polygon(
                k,
                self.radius.unwrap_or(1.0),
                self.center.unwrap_or([0.0, 0.0]),
                self.rotation.unwrap_or(0.0),
            ),
            _ => Err(PolytopeError::Document(
                "a polygon needs either `vertices` or `k` (with optional radius, center, rotation)"
                    .into(),
            )),
        }
    }
}

/// Either explicit vertices in `C^N` or a product of planar polygons.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDocument {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub vertices: Option<Vec<Vec<f64>>>,
    /// Vertex index sets; checked against the computed facets when given.
    pub facets: Option<Vec<Vec<usize>>>,
    pub product: Option<Vec<PolygonSpec>>,
}

impl PolytopeDocument {
    pub fn build(&self) -> Result<Polytope, PolytopeError> {
        match (&self.vertices, &self.product) {
            (Some(v), None) => {
                let n = self.n.ok_or_else(|| PolytopeError::Document("`N` is required with `vertices`".into()))?;
                let p = build_polytope(v.clone(), n)?;
                if p.vertices().len() != v.len() {
                    return Err(PolytopeError::Document(
                        "some vertices are repeated or not extreme".into(),
                    ));
                }
                if let Some(given) = &self.facets {
                    let mut given: Vec<Vec<usize>> = given
                        .iter()
                        .map(|f| {
                            let mut f = f.clone();
                            f.sort_unstable();
                            f
                        })
                        .collect();
                    given.sort();
                    let computed: Vec<Vec<usize>> =
                        p.facets().iter().map(|f| f.vertices.clone()).collect();
                    if given != computed {
                        return Err(PolytopeError::Document(format!(
                            "listed facets differ from the hull: computed {computed:?}"
                        )));
                    }
                }
                Ok(p)
            }
            (None, Some(factors)) => {
                if self.facets.is_some() {
                    return Err(PolytopeError::Document("`facets` only applies to `vertices`".into()));
                }
                let built = factors.iter().map(PolygonSpec::build).collect::<Result<Vec<_>, _>>()?;
                if let Some(n) = self.n {
                    if n != built.len() {
                        return Err(PolytopeError::Document(format!(
                            "`N` is {n} but the product has {} factors",
                            built.len()
                        )));
                    }
                }
                product_of(&built)
            }
            _ => Err(PolytopeError::Document(
                "exactly one of `vertices` and `product` must be given".into(),
            )),
        }
    }
}
