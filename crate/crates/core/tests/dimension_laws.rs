use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shilov::dimension::{auto_scales, box_count, box_dimension, PointCloud};

/// Uniform points on the face `[0,1]^k x {0}` of the unit cube in `R^5`,
/// translated by a random vector so the grid is not aligned with it.
fn face_cloud(k: usize, count: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
    let pts = (0..count)
        .map(|_| {
            (0..5).map(|r| origin[r] + if r < k { rng.random::<f64>() } else { 0.0 }).collect()
        })
        .collect();
    PointCloud::from_points(5, pts, format!("{k}-face")).unwrap()
}

fn estimate(k: usize) -> f64 {
    let c = face_cloud(k, 100_000, 40 + k as u64);
    box_dimension(&c, &auto_scales(&c).unwrap()).unwrap().slope
}

#[test]
fn low_dimensional_faces() {
    for k in 1..=2 {
        let d = estimate(k);
        assert!((d - k as f64).abs() <= 0.15, "k = {k}: {d}");
    }
}

// Fails: with the resolution guard a k-face of side L is only resolved down
// to L/s ~ (n/10)^(1/k), where box counting sees (L/s + 1)^k boxes and the
// log-log slope is at most k (L/s)/(L/s + 1): about 2.86 for k = 3 and
// below 3.6 for k = 4 at n = 10^5. The decade used here is the most
// favourable one the guard admits.
#[test]
fn three_and_four_dimensional_faces() {
    let mut misses = Vec::new();
    for k in 3..=4 {
        let c = face_cloud(k, 100_000, 40 + k as u64);
        let mut finest = 1.0;
        while box_count(&c, finest / 1.01).unwrap() * 10 < c.len() {
            finest /= 1.01;
        }
        let mut scales: Vec<f64> = (1..8).map(|i| finest * 10f64.powf(1.0 - i as f64 / 7.0)).collect();
        scales.insert(0, 10.000_001 * finest);
        let e = box_dimension(&c, &scales).unwrap();
        eprintln!("k = {k}: slope {:.3}, counts {:?}", e.slope, e.counts);
        if (e.slope - k as f64).abs() > 0.15 {
            misses.push((k, e.slope));
        }
    }
    assert!(misses.is_empty(), "outside k +- 0.15: {misses:?}");
}

fn cloud_strategy() -> impl Strategy<Value = PointCloud> {
    (1usize..=2, any::<u64>()).prop_map(|(k, seed)| face_cloud(k, 60_000, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    // grids anchored at the origin nest only for integer ratios
    #[test]
    fn counts_do_not_increase_with_scale(c in cloud_strategy(), s in 0.001..1.0f64, m in 1u32..6) {
        prop_assert!(box_count(&c, s * m as f64).unwrap() <= box_count(&c, s).unwrap());
    }

    #[test]
    fn translation_barely_moves_estimates(
        c in cloud_strategy(),
        shift in prop::collection::vec(-10.0..10.0f64, 5),
    ) {
        // one notch coarser so both clouds clear the resolution guard
        let scales: Vec<f64> = auto_scales(&c).unwrap().iter().map(|s| 2.0 * s).collect();
        let moved = c.translated(&shift);
        let bound = 2f64.powi(5);
        for &s in &scales {
            let (a, b) = (box_count(&c, s).unwrap() as f64, box_count(&moved, s).unwrap() as f64);
            prop_assert!(a <= bound * b && b <= bound * a);
        }
        let d0 = box_dimension(&c, &scales).unwrap().slope;
        let d1 = box_dimension(&moved, &scales).unwrap().slope;
        prop_assert!((d0 - d1).abs() < 0.1, "{d0} vs {d1}");
    }
}
