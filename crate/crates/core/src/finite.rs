//! Exact Shilov-boundary computations on finite compact spaces.
//!
//! A finite Hausdorff space is discrete, so every subset is closed and every
//! tabulated function is upper semi-continuous. Under that topology a point
//! `x` belongs to the Shilov boundary exactly when `K \ {x}` fails to be a
//! boundary, which happens exactly when some member peaks at `x`. The engine
//! uses that characterization; the test suite checks it against exhaustive
//! subset enumeration.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Indices into [`FiniteSpace::points`].
pub type PointSet = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiniteError {
    #[error("space must contain at least one point")]
    EmptySpace,
    #[error("duplicate point identifier `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("function `{name}` has {got} values, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("value {0} is not an extended real in [-inf, inf)")]
    BadValue(f64),
    #[error("sequence is empty")]
    EmptySequence,
    #[error("sequence increases at index {index}, point `{point}`: {before} -> {after}")]
    NotDecreasing {
        index: usize,
        point: String,
        before: ExtReal,
        after: ExtReal,
    },
    #[error("families do not share one space (family {0} differs)")]
    SpaceMismatch(usize),
    #[error("the Shilov boundary of family {0} is not a boundary for it")]
    ShilovNotBoundary(usize),
}

/// An element of `[-inf, inf)`.
///
/// Comparison is exact; `-0.0` is normalized to `0.0` so that ties are
/// detected reliably.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const NEG_INF: ExtReal = ExtReal(f64::NEG_INFINITY);

    pub fn new(value: f64) -> Result<Self, FiniteError> {
        if value.is_nan() || value == f64::INFINITY {
            return Err(FiniteError::BadValue(value));
        }
        Ok(ExtReal(if value == 0.0 { 0.0 } else { value }))
    }

    /// Panics on NaN or `+inf`.
    pub fn finite(value: f64) -> Self {
        Self::new(value).expect("finite extended real")
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    fn add(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0 + other.0)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<i32> for ExtReal {
    fn from(v: i32) -> Self {
        ExtReal::finite(f64::from(v))
    }
}

/// JSON form: a number or the string `"-inf"`.
impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_neg_inf() {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => ExtReal::new(v).map_err(serde::de::Error::custom),
            Raw::Str(s) if s == "-inf" => Ok(ExtReal::NEG_INF),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"-inf\", found \"{s}\""
            ))),
        }
    }
}

/// A finite (hence discrete) compact space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
}

impl FiniteSpace {
    pub fn new<I, S>(points: I) -> Result<Self, FiniteError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(FiniteError::EmptySpace);
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(FiniteError::DuplicatePoint(p.clone()));
            }
        }
        Ok(FiniteSpace { points, index })
    }

    /// Points named `0, 1, ..., n-1`.
    pub fn numbered(n: usize) -> Result<Self, FiniteError> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, id: &str) -> Result<usize, FiniteError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| FiniteError::UnknownPoint(id.to_string()))
    }

    pub fn subset<'a, I>(&self, ids: I) -> Result<PointSet, FiniteError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        ids.into_iter().map(|id| self.index_of(id)).collect()
    }

    /// Sorted identifiers of a point set.
    pub fn names(&self, set: &PointSet) -> Vec<String> {
        let mut out: Vec<String> = set.iter().map(|&i| self.points[i].clone()).collect();
        out.sort();
        out
    }

    pub fn all(&self) -> PointSet {
        (0..self.len()).collect()
    }
}

/// A tabulated function on a finite space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabFunction {
    pub name: String,
    pub values: Vec<ExtReal>,
}

impl TabFunction {
    pub fn new(name: impl Into<String>, values: Vec<ExtReal>) -> Self {
        TabFunction {
            name: name.into(),
            values,
        }
    }

    pub fn from_f64(name: impl Into<String>, values: &[f64]) -> Result<Self, FiniteError> {
        let values = values
            .iter()
            .map(|&v| ExtReal::new(v))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(name, values))
    }

    /// Characteristic function of `set` on a space with `len` points.
    pub fn indicator(name: impl Into<String>, len: usize, set: &PointSet) -> Self {
        let values = (0..len)
            .map(|i| ExtReal::finite(if set.contains(&i) { 1.0 } else { 0.0 }))
            .collect();
        Self::new(name, values)
    }

    pub fn constant(name: impl Into<String>, len: usize, c: f64) -> Self {
        Self::new(name, vec![ExtReal::finite(c); len])
    }

    pub fn max_value(&self) -> ExtReal {
        self.values
            .iter()
            .copied()
            .max()
            .unwrap_or(ExtReal::NEG_INF)
    }

    /// Pointwise sum, with `-inf + r = -inf`.
    pub fn plus(&self, other: &TabFunction) -> TabFunction {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.add(*b))
            .collect();
        TabFunction::new(format!("{}+{}", self.name, other.name), values)
    }

    /// `n * f`; `0 * (-inf)` is taken to be `0`.
    pub fn scaled(&self, n: f64) -> TabFunction {
        let values = self
            .values
            .iter()
            .map(|v| {
                if n == 0.0 {
                    ExtReal::finite(0.0)
                } else {
                    ExtReal::finite_or_neg_inf(v.0 * n)
                }
            })
            .collect();
        TabFunction::new(format!("{n}*{}", self.name), values)
    }
}

impl ExtReal {
    fn finite_or_neg_inf(v: f64) -> ExtReal {
        if v == f64::NEG_INFINITY {
            ExtReal::NEG_INF
        } else {
            ExtReal::finite(v)
        }
    }
}

/// A family of functions on one finite space. May be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    space: FiniteSpace,
    members: Vec<TabFunction>,
}

impl Family {
    pub fn new(space: FiniteSpace, members: Vec<TabFunction>) -> Result<Self, FiniteError> {
        for f in &members {
            if f.values.len() != space.len() {
                return Err(FiniteError::LengthMismatch {
                    name: f.name.clone(),
                    got: f.values.len(),
                    expected: space.len(),
                });
            }
        }
        Ok(Family { space, members })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn members(&self) -> &[TabFunction] {
        &self.members
    }

    pub fn push(&mut self, f: TabFunction) -> Result<(), FiniteError> {
        if f.values.len() != self.space.len() {
            return Err(FiniteError::LengthMismatch {
                name: f.name.clone(),
                got: f.values.len(),
                expected: self.space.len(),
            });
        }
        self.members.push(f);
        Ok(())
    }

    pub fn with_member(&self, f: TabFunction) -> Result<Family, FiniteError> {
        let mut out = self.clone();
        out.push(f)?;
        Ok(out)
    }
}

/// Points where `f` attains its maximum. Never empty.
pub fn max_set(f: &TabFunction) -> PointSet {
    let m = f.max_value();
    f.values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == m)
        .map(|(i, _)| i)
        .collect()
}

/// Whether `set` meets the max-set of every member. Vacuously true for an
/// empty family.
pub fn is_boundary(set: &PointSet, family: &Family) -> Result<bool, FiniteError> {
    let len = family.space.len();
    if let Some(&index) = set.iter().find(|&&i| i >= len) {
        return Err(FiniteError::IndexOutOfRange { index, len });
    }
    Ok(family
        .members
        .iter()
        .all(|f| max_set(f).iter().any(|x| set.contains(x))))
}

/// Points at which some member peaks, i.e. whose max-set is that single point.
pub fn peak_points(family: &Family) -> PointSet {
    family
        .members
        .iter()
        .filter_map(|f| {
            let s = max_set(f);
            (s.len() == 1).then(|| *s.iter().next().unwrap())
        })
        .collect()
}

/// Intersection of all (closed) boundaries. On a discrete space this is the
/// set of peak points.
pub fn shilov_boundary(family: &Family) -> PointSet {
    peak_points(family)
}

/// The minimal boundary, if one exists: the peak set whenever the peak set
/// is itself a boundary.
pub fn minimal_boundary(family: &Family) -> Option<PointSet> {
    let peaks = peak_points(family);
    is_boundary(&peaks, family)
        .expect("peak points lie in the space")
        .then_some(peaks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub shilov: Vec<String>,
    pub peaks: Vec<String>,
    pub minimal: Option<Vec<String>>,
    pub shilov_is_boundary: bool,
}

pub fn boundary_report(family: &Family) -> BoundaryReport {
    let shilov = shilov_boundary(family);
    let peaks = peak_points(family);
    let minimal = minimal_boundary(family);
    let shilov_is_boundary = is_boundary(&shilov, family).expect("shilov lies in the space");
    let space = family.space();
    BoundaryReport {
        shilov: space.names(&shilov),
        peaks: space.names(&peaks),
        minimal: minimal.as_ref().map(|m| space.names(m)),
        shilov_is_boundary,
    }
}

/// One strict sublevel constraint `f_member < threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub member: usize,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyWitness {
    pub generates: bool,
    /// For each point that is isolated by a polyhedron, one such polyhedron.
    pub polyhedra: BTreeMap<usize, Vec<Constraint>>,
    /// Points for which no polyhedron equals the singleton.
    pub unseparated: Vec<usize>,
}

/// Smallest strict sublevel set of `f` containing `x`, as a threshold.
fn tight_threshold(f: &TabFunction, x: usize) -> f64 {
    let v = f.values[x];
    if v.is_neg_inf() {
        let least_finite = f
            .values
            .iter()
            .filter(|w| !w.is_neg_inf())
            .map(|w| w.0)
            .fold(f64::INFINITY, f64::min);
        return if least_finite.is_finite() {
            least_finite - 1.0
        } else {
            0.0
        };
    }
    let next = f
        .values
        .iter()
        .filter(|w| **w > v)
        .map(|w| w.0)
        .fold(f64::INFINITY, f64::min);
    if next.is_finite() {
        v.0 + (next - v.0) / 2.0
    } else {
        v.0 + 1.0
    }
}

/// Decides whether the family's polyhedra generate the discrete topology,
/// i.e. isolate every point.
pub fn generates_topology(family: &Family) -> TopologyWitness {
    let n = family.space.len();
    let mut polyhedra = BTreeMap::new();
    let mut unseparated = Vec::new();
    for x in 0..n {
        let mut cell: PointSet = (0..n).collect();
        let mut constraints = Vec::new();
        for (j, f) in family.members.iter().enumerate() {
            let c = tight_threshold(f, x);
            let before = cell.len();
            cell.retain(|&y| f.values[y].0 < c);
            if cell.len() < before {
                constraints.push(Constraint {
                    member: j,
                    threshold: c,
                });
            }
        }
        if cell.len() == 1 {
            polyhedra.insert(x, constraints);
        } else {
            unseparated.push(x);
        }
    }
    TopologyWitness {
        generates: unseparated.is_empty(),
        polyhedra,
        unseparated,
    }
}

/// Evaluates an `A`-polyhedron `{ f_j < c_j }`.
pub fn polyhedron(family: &Family, constraints: &[Constraint]) -> PointSet {
    (0..family.space.len())
        .filter(|&y| {
            constraints
                .iter()
                .all(|c| family.members[c.member].values[y].0 < c.threshold)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecreasingLimit {
    pub limit: TabFunction,
    pub max_trace: Vec<ExtReal>,
}

/// Pointwise limit of a finite non-increasing sequence, with the trace of
/// maxima along the way.
pub fn decreasing_limit_max(
    space: &FiniteSpace,
    seq: &[TabFunction],
) -> Result<DecreasingLimit, FiniteError> {
    let first = seq.first().ok_or(FiniteError::EmptySequence)?;
    for f in seq {
        if f.values.len() != space.len() {
            return Err(FiniteError::LengthMismatch {
                name: f.name.clone(),
                got: f.values.len(),
                expected: space.len(),
            });
        }
    }
    for (index, pair) in seq.windows(2).enumerate() {
        for (x, (a, b)) in pair[0].values.iter().zip(&pair[1].values).enumerate() {
            if b > a {
                return Err(FiniteError::NotDecreasing {
                    index: index + 1,
                    point: space.points()[x].clone(),
                    before: *a,
                    after: *b,
                });
            }
        }
    }
    let limit = seq.last().unwrap_or(first).clone();
    let max_trace = seq.iter().map(TabFunction::max_value).collect();
    Ok(DecreasingLimit { limit, max_trace })
}

/// Shilov boundary of a union of families, each of whose Shilov boundaries
/// must be a boundary for it. Closure is the identity here, so the result is
/// the plain union of the parts.
pub fn union_shilov(families: &[Family]) -> Result<PointSet, FiniteError> {
    let Some(first) = families.first() else {
        return Ok(PointSet::new());
    };
    let mut members = Vec::new();
    for (j, fam) in families.iter().enumerate() {
        if fam.space != first.space {
            return Err(FiniteError::SpaceMismatch(j));
        }
        let s = shilov_boundary(fam);
        if !is_boundary(&s, fam)? {
            return Err(FiniteError::ShilovNotBoundary(j));
        }
        members.extend(fam.members.iter().cloned());
    }
    let union = Family::new(first.space.clone(), members)?;
    Ok(shilov_boundary(&union))
}

/// JSON input: `{ "points": [..], "functions": [{ "name", "values" }] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub points: Vec<String>,
    pub functions: Vec<TabFunction>,
}

impl FamilyDocument {
    pub fn into_family(self) -> Result<Family, FiniteError> {
        let space = FiniteSpace::new(self.points)?;
        Family::new(space, self.functions)
    }
}
