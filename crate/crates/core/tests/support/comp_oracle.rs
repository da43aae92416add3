//! `comp` against brute-force enumeration of every dyadic coarsening.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surf_core::distributions::{Component, Family, MixtureSpec};
use surf_core::interp::{int_fit, MassRule};
use surf_core::merge::comp;
use surf_core::polynomial::{abs_l1, Piece, Polynomial};
use surf_core::samples::{refines, sort_samples, EmpiricalDistribution, Interval, SortedSamples};

/// Every dyadic partition of `[a, a + m)` as a list of block sizes.
pub fn dyadic_partitions(m: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![1]];
    }
    let halves = dyadic_partitions(m / 2);
    let mut out = vec![vec![m]];
    for l in &halves {
        for r in &halves {
            out.push(l.iter().chain(r).copied().collect());
        }
    }
    out
}

pub fn random_partition(rng: &mut ChaCha8Rng, m: usize, out: &mut Vec<usize>) {
    if m == 1 || rng.random_bool(0.4) {
        out.push(m);
    } else {
        random_partition(rng, m / 2, out);
        random_partition(rng, m / 2, out);
    }
}

pub fn cells_for(s: &SortedSamples, start: usize, sizes: &[usize]) -> Vec<Interval> {
    let mut a = start;
    sizes
        .iter()
        .map(|&k| {
            let iv = s.interval(a, a + k).unwrap();
            a += k;
            iv
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn oracle(
    fhat: &Piece,
    start: usize,
    m: usize,
    dist: &EmpiricalDistribution,
    s: &SortedSamples,
    d: usize,
    gamma: f64,
    rule: MassRule,
) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for sizes in dyadic_partitions(m) {
        let coarse =
            EmpiricalDistribution::new(sizes.iter().map(|&k| k as u64).collect(), m as u64)
                .unwrap();
        if !refines(dist, &coarse).unwrap() {
            continue;
        }
        let mut lambda_fit = 0.0;
        for iv in cells_for(s, start, &sizes) {
            if iv.is_degenerate() {
                continue;
            }
            // both densities in the local coordinate of `iv`
            let fit = int_fit(&iv, s, d, rule).unwrap();
            let scale = fhat.length();
            let g = fhat
                .local
                .compose_affine(iv.length() / scale, (iv.lo - fhat.lo) / scale);
            let diff = fit.local.sub(&g);
            if !diff.is_zero() {
                lambda_fit += iv.length() * abs_l1(&diff, 0.0, 1.0).unwrap();
            }
        }
        let penalty: f64 = sizes
            .iter()
            .map(|&k| gamma * (k as f64 / m as f64).sqrt())
            .sum();
        best = best.max(lambda_fit - penalty);
    }
    best
}

pub struct Instance {
    pub s: SortedSamples,
    pub d: usize,
    pub rule: MassRule,
    pub start: usize,
    pub m: usize,
    pub sizes: Vec<usize>,
    pub fhat: Piece,
}

impl Instance {
    pub fn random(rng: &mut ChaCha8Rng, m: usize) -> Self {
        let n = [32usize, 64, 128][rng.random_range(0..3)];
        let a = rng.random_range(0.5..6.0);
        let b = rng.random_range(0.5..6.0);
        let w = rng.random_range(0.1..0.9);
        let spec = MixtureSpec::new(vec![
            Component {
                weight: w,
                family: Family::Beta { a, b },
            },
            Component {
                weight: 1.0 - w,
                family: Family::Beta { a: b + 1.0, b: a },
            },
        ])
        .unwrap();
        let raw = spec.sample(n - 1, rng.random()).unwrap();
        let s = sort_samples(&raw, n).unwrap();
        let d = rng.random_range(0..=3);
        let rule = if rng.random_bool(0.5) {
            MassRule::AddOne
        } else {
            MassRule::Raw
        };
        let start = m * rng.random_range(0..n / m);
        let mut sizes = Vec::new();
        random_partition(rng, m, &mut sizes);
        // blocks touching the hull can be zero-width; avoid them for fhat
        let whole = s.interval(start, start + m).unwrap();
        let mut fhat = int_fit(&whole, &s, d, rule).unwrap();
        if rng.random_bool(0.5) {
            let bump: Vec<f64> = (0..=d).map(|_| rng.random_range(-0.3..0.3)).collect();
            fhat.local = fhat.local.add(&Polynomial::new(bump));
        }
        Self {
            s,
            d,
            rule,
            start,
            m,
            sizes,
            fhat,
        }
    }

    pub fn dist(&self) -> EmpiricalDistribution {
        EmpiricalDistribution::new(
            self.sizes.iter().map(|&k| k as u64).collect(),
            self.m as u64,
        )
        .unwrap()
    }

    pub fn comp(&self, gamma: f64) -> f64 {
        let cells = cells_for(&self.s, self.start, &self.sizes);
        comp(
            &self.fhat,
            &cells,
            &self.dist(),
            &self.s,
            self.d,
            gamma,
            self.rule,
        )
        .unwrap()
    }
}

/// Largest `|comp - oracle|` over `count` random instances per block size.
pub fn max_deviation(seed: u64, sizes: &[usize], count: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for &m in sizes {
        for _ in 0..count {
            let inst = loop {
                let i = Instance::random(&mut rng, m);
                if !i.s.interval(i.start, i.start + m).unwrap().is_degenerate() {
                    break i;
                }
            };
            let gamma = rng.random_range(0.0..2.0);
            let got = inst.comp(gamma);
            let want = oracle(
                &inst.fhat,
                inst.start,
                m,
                &inst.dist(),
                &inst.s,
                inst.d,
                gamma,
                inst.rule,
            );
            worst = worst.max((got - want).abs());
        }
    }
    worst
}
