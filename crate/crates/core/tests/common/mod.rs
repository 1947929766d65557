//! Independent oracles shared by the integration suites. Nothing here calls
//! into the engine it is checking.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use shilov::finite::{Family, FiniteSpace, TabFunction};

/// Raw function tables, `-inf` as `f64::NEG_INFINITY`.
pub type Table = Vec<Vec<f64>>;

pub fn argmax(values: &[f64]) -> BTreeSet<usize> {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..values.len()).filter(|&i| values[i] == top).collect()
}

pub fn meets_all(mask: u32, table: &Table) -> bool {
    table.iter().all(|f| argmax(f).iter().any(|&i| mask & (1 << i) != 0))
}

pub fn mask_to_set(mask: u32, n: usize) -> BTreeSet<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

pub struct Enumeration {
    /// Every subset that is a boundary, as bit masks.
    pub boundaries: Vec<u32>,
    /// Intersection of all boundaries.
    pub shilov: BTreeSet<usize>,
    /// The intersection when it is itself a boundary.
    pub minimal: Option<BTreeSet<usize>>,
    /// Points x with some argmax equal to {x}.
    pub peaks: BTreeSet<usize>,
}

pub fn enumerate(n: usize, table: &Table) -> Enumeration {
    let boundaries: Vec<u32> = (0..1u32 << n).filter(|&m| meets_all(m, table)).collect();
    let inter = boundaries.iter().fold((1u32 << n) - 1, |a, &b| a & b);
    let peaks = table
        .iter()
        .map(|f| argmax(f))
        .filter(|s| s.len() == 1)
        .flatten()
        .collect();
    Enumeration {
        shilov: mask_to_set(inter, n),
        minimal: meets_all(inter, table).then(|| mask_to_set(inter, n)),
        boundaries,
        peaks,
    }
}

pub fn family(n: usize, table: &Table) -> Family {
    let members = table
        .iter()
        .enumerate()
        .map(|(j, v)| TabFunction::from_f64(format!("f{j}"), v).unwrap())
        .collect();
    Family::new(FiniteSpace::numbered(n).unwrap(), members).unwrap()
}

/// Values in `{-inf, 0, ..., 5}`.
pub fn random_table(rng: &mut impl Rng, n: usize, m: usize) -> Table {
    (0..m)
        .map(|_| {
            (0..n)
                .map(|_| match rng.random_range(0..7) {
                    0 => f64::NEG_INFINITY,
                    v => (v - 1) as f64,
                })
                .collect()
        })
        .collect()
}

/// True when every pair of points is split by a strict sublevel of some
/// member, which on a finite space is the same as isolating every point.
pub fn separates_points(n: usize, a0: &Table) -> bool {
    (0..n).all(|x| (0..n).all(|y| x == y || a0.iter().any(|g| g[y] > g[x])))
}

/// Members `n^k f + n^(k-1) g_1 + ... + g_k` for every chain of `a0` members
/// that strictly shrinks the max set at each step. With finite values in
/// `{0, 1, 2}` and `base >= 3` the max set of such a member is the
/// lexicographic argmax.
pub fn productive_closure(roots: &Table, a0: &Table, base: f64) -> Table {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<f64>> = roots.iter().chain(a0).cloned().collect();
    while let Some(f) = stack.pop() {
        let s = argmax(&f);
        for g in a0 {
            let top = s.iter().map(|&i| g[i]).fold(f64::NEG_INFINITY, f64::max);
            if s.iter().all(|&i| g[i] == top) {
                continue;
            }
            stack.push(f.iter().zip(g).map(|(a, b)| base * a + b).collect());
        }
        out.push(f);
    }
    out
}
