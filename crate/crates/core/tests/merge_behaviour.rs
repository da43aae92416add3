use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surf_core::distributions::{Family, MixtureSpec};
use surf_core::merge::{merge, surf, surf_halted, MergeState, SurfConfig};
use surf_core::polynomial::PiecewiseEstimate;
use surf_core::samples::sort_samples;

#[test]
fn single_polynomial_density_collapses() {
    // Beta(k+1, 1) has density (k+1) x^k, a polynomial of degree k
    for d in 0..=3usize {
        let spec = MixtureSpec::single(Family::Beta {
            a: d as f64 + 1.0,
            b: 1.0,
        })
        .unwrap();
        let n = 1 << 12;
        let ones = (0..20u64)
            .filter(|&t| {
                let s = sort_samples(&spec.sample(n - 1, 100 + t).unwrap(), n).unwrap();
                merge(&s, &SurfConfig::new(d)).unwrap().len() == 1
            })
            .count();
        assert!(ones >= 18, "d={d}: {ones}/20");
    }
}

#[test]
fn boundary_found_at_cluster_gap() {
    let n = 1usize << 12;
    let mut hits = 0;
    for t in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let raw: Vec<f64> = (0..n - 1)
            .map(|_| {
                let u: f64 = rng.random();
                if rng.random_bool(0.5) {
                    0.3 * u
                } else {
                    0.7 + 0.3 * u
                }
            })
            .collect();
        let s = sort_samples(&raw, n).unwrap();
        // X_(k) is the last sample of the left cluster
        let k = s.values().partition_point(|&x| x < 0.5);
        let q = merge(&s, &SurfConfig::new(0)).unwrap();
        let near = q
            .boundaries()
            .iter()
            .any(|&j| (j as i64 - k as i64).abs() <= 2 || (j as i64 - k as i64 - 1).abs() <= 2);
        if near {
            hits += 1;
        }
    }
    assert!(hits >= 9, "{hits}/10");
}

#[test]
fn add_one_mass_bookkeeping() {
    let n = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let raw: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
        let s = sort_samples(&raw, n).unwrap();
        for d in 0..=2 {
            let est = surf(&s, &SurfConfig::new(d)).unwrap();
            let pieces = est.pieces().len() as f64;
            // every sample lands in exactly one node cell and each of the
            // d + 1 cells of a piece adds one
            let want = (n as f64 - 1.0 + (d as f64 + 1.0) * pieces) / n as f64;
            assert!(
                (est.total_mass() - want).abs() < 1e-12,
                "{} vs {want}",
                est.total_mass()
            );
            assert!((est.total_mass() - 1.0).abs() <= (d as f64 + 1.0) * pieces / n as f64);
        }
    }
}

#[test]
fn estimate_json_round_trips_exactly() {
    let spec = surf_core::distributions::builtin("gamma-f2").unwrap();
    let n = 1 << 10;
    let s = sort_samples(&spec.sample(n - 1, 1).unwrap(), n).unwrap();
    for d in [0, 1, 3, 8] {
        let est = surf(&s, &SurfConfig::new(d)).unwrap();
        let back = PiecewiseEstimate::from_json(&est.to_json().unwrap()).unwrap();
        assert_eq!(back, est);
    }
}

#[test]
fn halting_rounds() {
    let spec = surf_core::distributions::builtin("beta-f2").unwrap();
    let n = 1 << 10;
    let s = sort_samples(&spec.sample(n - 1, 5).unwrap(), n).unwrap();
    let cfg = SurfConfig::new(1);
    let mut st = MergeState::new(
        &s,
        &SurfConfig {
            halt_t: Some(n / 2),
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(st.total_steps(), 1);
    assert!(st.step());
    assert!(!st.step());
    assert_eq!(surf_halted(&s, &cfg, 1).unwrap(), surf(&s, &cfg).unwrap());
    for t in [2usize, 8, 64, 512] {
        let est = surf_halted(&s, &cfg, t).unwrap();
        // zero-width hull cells may be dropped from the estimate
        assert!(
            est.pieces().len() + 2 >= t && est.pieces().len() <= n,
            "t={t}"
        );
    }
}
