//! Helpers for the exit-criteria suite in `tests/acceptance.rs`.

use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use rand::Rng;
use surf_core::distributions::{Component, Family, MixtureSpec};

static SERIAL: Mutex<()> = Mutex::new(());

/// Held by every criterion so timings never overlap with other work.
pub fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Prints the criterion's `[PASS]`/`[FAIL]` line, then asserts it.
pub fn report(id: u32, title: &str, ok: bool, detail: &str) {
    let tag = if ok { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {id}. {title}: {detail}");
    assert!(ok, "criterion {id} ({title}) failed: {detail}");
}

pub fn failing_suffix(fails: &[String]) -> String {
    if fails.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", fails.join("; "))
    }
}

pub fn available_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |k| k.get())
}

/// Fastest of `reps` runs, with the last result.
pub fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..reps.max(1) {
        let t = Instant::now();
        let v = f();
        best = best.min(t.elapsed());
        out = Some(v);
    }
    (best, out.expect("at least one run"))
}

/// A random density of degree `d` on `[0, 1]`: a positive combination of
/// Bernstein basis polynomials, each a Beta(k + 1, d - k + 1) density.
pub fn random_polynomial_density(rng: &mut impl Rng, d: usize) -> MixtureSpec {
    let w: Vec<f64> = (0..=d).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    let comps = w
        .iter()
        .enumerate()
        .map(|(k, &wk)| Component {
            weight: wk / total,
            family: Family::Beta {
                a: (k + 1) as f64,
                b: (d - k + 1) as f64,
            },
        })
        .collect();
    MixtureSpec::new(comps).expect("weights sum to one")
}
