//! Kolmogorov-Smirnov checks of true block masses.

use statrs::distribution::{Beta, ContinuousCDF};
use surf_core::distributions::builtin;

/// `sqrt(-ln(alpha / 2) / 2)`: the asymptotic one-sample KS critical value
/// times `sqrt(m)`.
pub fn ks_critical(alpha: f64, m: usize) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (m as f64).sqrt()
}

pub fn ks_stat(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

/// True masses `P_{a,b} = F(X_(b)) - F(X_(a))` with `F(X_(0)) = 0` and
/// `F(X_(n)) = 1`.
pub fn true_masses(
    spec_name: &str,
    n: usize,
    reps: usize,
    pairs: &[(usize, usize)],
) -> Vec<Vec<f64>> {
    let spec = builtin(spec_name).unwrap();
    let mut out = vec![Vec::with_capacity(reps); pairs.len()];
    for r in 0..reps {
        let mut xs = spec.sample(n - 1, r as u64).unwrap();
        xs.sort_by(f64::total_cmp);
        let mut u = vec![0.0];
        u.extend(xs.iter().map(|&x| spec.cdf(x)));
        u.push(1.0);
        for (k, &(a, b)) in pairs.iter().enumerate() {
            out[k].push(u[b] - u[a]);
        }
    }
    out
}

/// Largest KS statistic of the block masses against `Beta(b - a, n - (b - a))`
/// and whether every pair stays under the critical value at level `alpha`.
pub fn block_law_check(
    spec_name: &str,
    n: usize,
    reps: usize,
    pairs: &[(usize, usize)],
    alpha: f64,
) -> (f64, bool) {
    let crit = ks_critical(alpha, reps);
    let masses = true_masses(spec_name, n, reps, pairs);
    let mut worst = 0.0f64;
    for (&(a, b), mut xs) in pairs.iter().zip(masses) {
        let law = Beta::new((b - a) as f64, (n - (b - a)) as f64).unwrap();
        worst = worst.max(ks_stat(&mut xs, |x| law.cdf(x)));
    }
    (worst, worst < crit)
}
