//! `comp` against brute-force enumeration of every dyadic coarsening.

#[path = "support/comp_oracle.rs"]
mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{dyadic_partitions, max_deviation, Instance};

#[test]
fn enumeration_counts() {
    let counts: Vec<usize> = [1, 2, 4, 8, 16]
        .iter()
        .map(|&m| dyadic_partitions(m).len())
        .collect();
    assert_eq!(counts, vec![1, 2, 5, 26, 677]);
}

#[test]
fn comp_matches_exhaustive_oracle() {
    let worst = max_deviation(2024, &[2, 4, 8, 16], 200);
    println!("max deviation {worst:e}");
    assert!(worst <= 1e-9, "max deviation {worst:e}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn comp_nonincreasing_in_gamma(seed in any::<u64>(), g1 in 0.0f64..3.0, g2 in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = [2usize, 4, 8, 16][rng.random_range(0..4)];
        let inst = Instance::random(&mut rng, m);
        prop_assume!(!inst.s.interval(inst.start, inst.start + m).unwrap().is_degenerate());
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        prop_assert!(inst.comp(hi) <= inst.comp(lo) + 1e-12);
    }
}
