//! Adaptive Gauss-Lobatto-Kronrod integration.
//!
//! The rule samples both segment ends, so a kink sitting just inside an end
//! shows up in the error estimate instead of slipping between the nodes.

use std::collections::BinaryHeap;

use crate::error::{Result, SurfError};

/// `sqrt(2/3)`, the extra Kronrod node.
const ALPHA: f64 = 0.816_496_580_927_726;
/// `1/sqrt(5)`, the interior Lobatto node.
const BETA: f64 = 0.447_213_595_499_958;

/// Seven-point Kronrod estimate of `∫_a^b f` and its distance from the
/// embedded four-point Lobatto rule. Non-finite end values count as zero so
/// integrable end singularities still refine.
pub fn lobatto_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let ends = finite(f(a)) + finite(f(b));
    let outer = f(c - h * ALPHA) + f(c + h * ALPHA);
    let inner = f(c - h * BETA) + f(c + h * BETA);
    let mid = f(c);
    let lobatto = ends / 6.0 + inner * 5.0 / 6.0;
    let kronrod =
        ends * 11.0 / 210.0 + outer * 72.0 / 245.0 + inner * 125.0 / 294.0 + mid * 16.0 / 35.0;
    (kronrod * h, ((kronrod - lobatto) * h).abs())
}

#[derive(PartialEq)]
struct Segment {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Equal segments the interval starts from, so one coarse rule cannot
/// agree with itself across a narrow feature.
const INITIAL_SEGMENTS: usize = 8;

/// Integration settings.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-14,
            max_segments: 4000,
        }
    }
}

/// `∫_a^b f` by bisecting the segment with the largest error estimate until
/// the total estimate is within tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a > b {
        return Err(SurfError::ReversedBounds { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    let step = (b - a) / INITIAL_SEGMENTS as f64;
    for i in 0..INITIAL_SEGMENTS {
        let lo = a + step * i as f64;
        let hi = if i + 1 == INITIAL_SEGMENTS {
            b
        } else {
            lo + step
        };
        let (value, err) = lobatto_kronrod(&f, lo, hi);
        total += value;
        total_err += err;
        heap.push(Segment {
            err,
            a: lo,
            b: hi,
            value,
        });
    }
    loop {
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            // confirm against fresh sums before stopping
            total = heap.iter().map(|s: &Segment| s.value).sum();
            total_err = heap.iter().map(|s| s.err).sum();
            if total_err <= tol.abs.max(tol.rel * total.abs()) {
                return Ok(total);
            }
        }
        if heap.len() >= tol.max_segments {
            return Err(SurfError::Quadrature {
                value: total,
                bound: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // cannot split further in floating point
            return Err(SurfError::Quadrature {
                value: total,
                bound: total_err,
            });
        }
        let (v1, e1) = lobatto_kronrod(&f, worst.a, mid);
        let (v2, e2) = lobatto_kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            err: e1,
            a: worst.a,
            b: mid,
            value: v1,
        });
        heap.push(Segment {
            err: e2,
            a: mid,
            b: worst.b,
            value: v2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kink_and_singularity() {
        let v = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 0.29).abs() <= 1e-10 * 0.29, "{v}");
        // ∫_0^1 x^{-1/2} = 2
        let tol = Tolerance {
            rel: 1e-9,
            ..Tolerance::default()
        };
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, tol).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn kink_just_inside_a_segment_end() {
        // |p| with a root at 0.9029, a hair past the dyadic point 0.9026
        let c = [
            -0.868_351_077_848_454_9,
            0.439_041_551_030_640_7,
            0.541_362_854_311_344_2,
            -0.943_550_997_612_460_8,
            -0.337_843_308_362_681_06,
            0.006_019_238_739_277_011,
            0.873_283_399_600_762_1,
            0.535_389_099_114_100_8,
            0.477_839_174_721_297_33,
        ];
        let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck).abs();
        let tol = Tolerance {
            rel: 1e-13,
            ..Tolerance::default()
        };
        let v = integrate(p, 0.304_099_799_184_600_2, 1.900_004_245_691_085, tol).unwrap();
        // reference from 40-digit arithmetic split at the root
        assert!((v - 36.204_741_341_990_26).abs() < 1e-10, "{v}");
    }

    #[test]
    fn reports_non_convergence() {
        let tol = Tolerance {
            max_segments: 3,
            ..Tolerance::default()
        };
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, tol);
        assert!(matches!(r, Err(SurfError::Quadrature { .. })));
    }
}
