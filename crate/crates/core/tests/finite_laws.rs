mod common;

use common::{argmax, enumerate, family, meets_all, separates_points, productive_closure, Table};
use proptest::prelude::*;
use shilov::finite::{
    boundary_report, decreasing_limit_max, is_boundary, max_set, minimal_boundary, peak_points,
    shilov_boundary, union_shilov, Family, FiniteError, PointSet, TabFunction,
};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![1 => Just(f64::NEG_INFINITY), 6 => (0..=5i32).prop_map(f64::from)]
}

fn instance(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Table)> {
    (1..=max_n, 0..=max_m).prop_flat_map(|(n, m)| {
        (Just(n), prop::collection::vec(prop::collection::vec(value(), n), m))
    })
}

fn set_of(mask: u32, n: usize) -> PointSet {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engine_matches_subset_enumeration((n, table) in instance(10, 6)) {
        let fam = family(n, &table);
        let e = enumerate(n, &table);
        prop_assert_eq!(shilov_boundary(&fam), e.shilov.clone());
        prop_assert_eq!(peak_points(&fam), e.peaks.clone());
        prop_assert_eq!(minimal_boundary(&fam), e.minimal.clone());
        for mask in [0u32, (1 << n) - 1, 0b1010_1010 & ((1 << n) - 1)] {
            prop_assert_eq!(is_boundary(&set_of(mask, n), &fam).unwrap(), meets_all(mask, &table));
        }
    }

    #[test]
    fn max_sets_nonempty_and_union_is_boundary((n, table) in instance(8, 5)) {
        let fam = family(n, &table);
        let mut union = PointSet::new();
        for f in fam.members() {
            let s = max_set(f);
            prop_assert!(!s.is_empty());
            prop_assert_eq!(&s, &argmax(&f.values.iter().map(|v| v.value()).collect::<Vec<_>>()));
            union.extend(s);
        }
        prop_assert!(is_boundary(&union, &fam).unwrap());
    }

    #[test]
    fn shilov_monotone_in_family((n, table) in instance(8, 6), cut in 0usize..7) {
        let cut = cut.min(table.len());
        let small = family(n, &table[..cut].to_vec());
        let big = family(n, &table);
        prop_assert!(shilov_boundary(&small).is_subset(&shilov_boundary(&big)));
    }

    #[test]
    fn peaks_lie_in_every_boundary((n, table) in instance(8, 5)) {
        let fam = family(n, &table);
        let peaks = peak_points(&fam);
        for &b in &enumerate(n, &table).boundaries {
            prop_assert!(peaks.is_subset(&set_of(b, n)));
        }
        let r = boundary_report(&fam);
        if r.shilov_is_boundary {
            prop_assert!(r.peaks.iter().all(|p| r.shilov.contains(p)));
        }
        if let Some(m) = minimal_boundary(&fam) {
            prop_assert_eq!(shilov_boundary(&fam), m.clone());
            prop_assert_eq!(m, peaks);
        }
    }

    #[test]
    fn decreasing_limits_keep_the_shilov_boundary(
        (n, table) in instance(7, 4),
        f in prop::collection::vec(0..=5i32, 7),
        g in prop::collection::vec(0..=5i32, 7),
    ) {
        // f + g/k for k = 1..64 is non-increasing; for k > 5 its max set lies
        // inside that of f, so adjoining the limit f changes nothing
        let f: Vec<f64> = f[..n].iter().map(|&v| v as f64).collect();
        let g: Vec<f64> = g[..n].iter().map(|&v| v as f64).collect();
        let mut seq = Vec::new();
        for k in 1..=64 {
            let v: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b / k as f64).collect();
            seq.push(TabFunction::from_f64(format!("s{k}"), &v).unwrap());
        }
        let base = family(n, &table);
        let mut with_seq = base.clone();
        for s in &seq {
            with_seq.push(s.clone()).unwrap();
        }
        let lim = decreasing_limit_max(base.space(), &seq).unwrap();
        prop_assert_eq!(lim.max_trace.len(), 64);
        prop_assert!(lim.max_trace.windows(2).all(|w| w[1] <= w[0]));
        let inf = TabFunction::from_f64("limit", &f).unwrap();
        let extended = with_seq.with_member(inf).unwrap();
        prop_assert_eq!(shilov_boundary(&extended), shilov_boundary(&with_seq));
    }

    #[test]
    fn union_of_families((n, table) in instance(8, 6), split in 0usize..7) {
        let split = split.min(table.len());
        let parts = [family(n, &table[..split].to_vec()), family(n, &table[split..].to_vec())];
        let ok = parts.iter().all(|p| is_boundary(&shilov_boundary(p), p).unwrap());
        match union_shilov(&parts) {
            Ok(s) => {
                prop_assert!(ok);
                let mut u = shilov_boundary(&parts[0]);
                u.extend(shilov_boundary(&parts[1]));
                prop_assert_eq!(&s, &u);
                prop_assert_eq!(s, enumerate(n, &table).shilov);
            }
            Err(FiniteError::ShilovNotBoundary(_)) => prop_assert!(!ok),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
        prop_assert_eq!(union_shilov(&parts[..1]).ok(), ok_part(&parts[0]));
    }

    #[test]
    fn shilov_is_a_boundary_for_topology_closed_families(
        n in 2usize..=7,
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a0: Table = loop {
            let m = rng.random_range(2..=4);
            let t: Table = (0..m)
                .map(|_| (0..n).map(|_| rng.random_range(0..3) as f64).collect())
                .collect();
            if separates_points(n, &t) {
                break t;
            }
        };
        let roots: Table = (0..2)
            .map(|_| (0..n).map(|_| rng.random_range(0..3) as f64).collect())
            .collect();
        let closed = productive_closure(&roots, &a0, 4.0);
        let fam = family(n, &closed);
        prop_assert!(shilov::finite::generates_topology(&family(n, &a0)).generates);
        prop_assert!(is_boundary(&shilov_boundary(&fam), &fam).unwrap());
    }
}

fn ok_part(f: &Family) -> Option<PointSet> {
    is_boundary(&shilov_boundary(f), f).unwrap().then(|| shilov_boundary(f))
}
