//! Order statistics, statistically equivalent blocks and the dyadic
//! distributions that index them.
//!
//! A sample set of `n - 1` sorted values splits the line into `n` index
//! slots. The block `I_{a,b}` spans slots `a..b` and carries empirical mass
//! `(b - a) / n` no matter which distribution produced the samples.
//!
//! Order statistics are 1-based (`X_(1) ..= X_(n-1)`), matching
//! [`SortedSamples::order_stat`]. The outermost blocks `I_{0,b}` and
//! `I_{a,n}` are unbounded in theory; here they are clipped to the sample
//! hull `[X_(1), X_(n-1)]`.

use std::ops::Range;

use num_rational::Ratio;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SurfError};

/// Increasingly sorted sample values `X_(1) <= ... <= X_(n-1)` together with
/// the power-of-two budget `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSamples {
    values: Vec<f64>,
    n: usize,
}

impl SortedSamples {
    /// Wraps already sorted values. `values.len()` must equal `n - 1`.
    pub fn new(values: Vec<f64>, n: usize) -> Result<Self> {
        check_power_of_two(n)?;
        if values.len() != n - 1 {
            return Err(SurfError::TooFewSamples {
                needed: n - 1,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SurfError::NonFinite { index });
        }
        if let Some(index) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(SurfError::Unsorted { index: index + 1 });
        }
        Ok(Self { values, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `log2 n`, the number of merge rounds.
    pub fn depth(&self) -> u32 {
        self.n.trailing_zeros()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `k`-th order statistic, `1 <= k <= n - 1`.
    pub fn order_stat(&self, k: usize) -> f64 {
        assert!(k >= 1 && k < self.n, "order statistic {k} out of range");
        self.values[k - 1]
    }

    /// `[X_(1), X_(n-1)]`.
    pub fn hull(&self) -> (f64, f64) {
        (self.values[0], self.values[self.n - 2])
    }

    /// Slice positions of the samples that fall in `I_{a,b}`.
    ///
    /// `I_{a,b}` holds `X_(max(a,1)) .. X_(b-1)`; for `b = n` that range ends
    /// at `X_(n-1)`, the closed right edge of the hull.
    pub fn sample_range(&self, a: usize, b: usize) -> Range<usize> {
        (a.max(1) - 1)..(b - 1)
    }

    /// The block `I_{a,b}` clipped to the hull.
    pub fn interval(&self, a: usize, b: usize) -> Result<Interval> {
        if a >= b || b > self.n {
            return Err(SurfError::InvalidRange { a, b, n: self.n });
        }
        let (hull_lo, hull_hi) = self.hull();
        let lo = if a == 0 { hull_lo } else { self.values[a - 1] };
        let hi = if b == self.n {
            hull_hi
        } else {
            self.values[b - 1]
        };
        Ok(Interval {
            lo_index: a,
            hi_index: b,
            lo,
            hi,
            closed: b == self.n,
        })
    }
}

fn check_power_of_two(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(SurfError::NotPowerOfTwo(n));
    }
    Ok(())
}

/// Takes the first `n - 1` values of `raw` and sorts them ascending.
pub fn sort_samples(raw: &[f64], n: usize) -> Result<SortedSamples> {
    check_power_of_two(n)?;
    if raw.len() < n - 1 {
        return Err(SurfError::TooFewSamples {
            needed: n - 1,
            got: raw.len(),
        });
    }
    let mut values = raw[..n - 1].to_vec();
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(SurfError::NonFinite { index });
    }
    values.sort_by(f64::total_cmp);
    SortedSamples::new(values, n)
}

/// Largest power of two `n` with `n - 1 <= count`.
pub fn budget_for(count: usize) -> Option<usize> {
    if count == 0 {
        return None;
    }
    let n = (count + 1).next_power_of_two();
    Some(if n - 1 > count { n / 2 } else { n })
}

/// Chooses `n` as [`budget_for`] and keeps a seeded uniformly random subset
/// of `n - 1` values, discarding the excess.
pub fn subsample(raw: &[f64], seed: u64) -> Result<SortedSamples> {
    let n = budget_for(raw.len()).ok_or(SurfError::TooFewSamples { needed: 1, got: 0 })?;
    if n - 1 == raw.len() {
        return sort_samples(raw, n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = index::sample(&mut rng, raw.len(), n - 1).into_vec();
    keep.sort_unstable();
    let picked: Vec<f64> = keep.into_iter().map(|i| raw[i]).collect();
    sort_samples(&picked, n)
}

/// A block `I_{a,b}` with its real bounds.
///
/// Cells are half-open `[lo, hi)` except the block ending at slot `n`,
/// which is closed on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo_index: usize,
    pub hi_index: usize,
    pub lo: f64,
    pub hi: f64,
    pub closed: bool,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Zero-width after clipping: the outermost unit blocks and runs of tied
    /// samples.
    pub fn is_degenerate(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn slots(&self) -> usize {
        self.hi_index - self.lo_index
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && (x < self.hi || (self.closed && x == self.hi))
    }
}

/// `q_{a,b} = (b - a) / n`, exactly.
pub fn empirical_mass(a: usize, b: usize, s: &SortedSamples) -> Result<Ratio<u64>> {
    if a >= b || b > s.n() {
        return Err(SurfError::InvalidRange { a, b, n: s.n() });
    }
    Ok(Ratio::new((b - a) as u64, s.n() as u64))
}

/// Vector of masses `counts[i] / denom`, each a positive multiple of
/// `1 / denom` with `denom` a power of two.
///
/// The total may be below one, in which case this is a sub-distribution
/// (a group of cells inside a larger partition).
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    counts: Vec<u64>,
    denom: u64,
}

impl EmpiricalDistribution {
    pub fn new(counts: Vec<u64>, denom: u64) -> Result<Self> {
        if denom == 0 || !denom.is_power_of_two() {
            return Err(SurfError::InvalidDistribution(format!(
                "denominator {denom} is not a power of two"
            )));
        }
        if counts.is_empty() {
            return Err(SurfError::InvalidDistribution("no masses".into()));
        }
        if counts.contains(&0) {
            return Err(SurfError::InvalidDistribution(
                "every mass must be at least 1/denom".into(),
            ));
        }
        let total: u64 = counts.iter().sum();
        if total > denom {
            return Err(SurfError::InvalidDistribution(format!(
                "masses sum to {total}/{denom} > 1"
            )));
        }
        Ok(Self { counts, denom })
    }

    /// `(1/k, ..., 1/k)` over denominator `denom`.
    pub fn uniform(pieces: u64, denom: u64) -> Result<Self> {
        if pieces == 0 || !denom.is_multiple_of(pieces) {
            return Err(SurfError::InvalidDistribution(format!(
                "{pieces} equal pieces do not divide {denom}"
            )));
        }
        Self::new(vec![denom / pieces; pieces as usize], denom)
    }

    /// Parses masses such as `[(3, 8), (5, 8)]` onto a common denominator.
    pub fn from_fractions(masses: &[(u64, u64)]) -> Result<Self> {
        let denom = masses.iter().map(|&(_, d)| d).max().unwrap_or(1);
        let counts = masses
            .iter()
            .map(|&(num, den)| {
                if den == 0 || denom % den != 0 {
                    Err(SurfError::InvalidDistribution(format!(
                        "{num}/{den} is not dyadic"
                    )))
                } else {
                    Ok(num * (denom / den))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(counts, denom)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn mass(&self, i: usize) -> Ratio<u64> {
        Ratio::new(self.counts[i], self.denom)
    }

    pub fn masses(&self) -> Vec<Ratio<u64>> {
        (0..self.len()).map(|i| self.mass(i)).collect()
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn total(&self) -> Ratio<u64> {
        Ratio::new(self.total_count(), self.denom)
    }

    /// Every mass is `1 / 2^v`.
    pub fn is_binary(&self) -> bool {
        self.counts.iter().all(|c| c.is_power_of_two())
    }

    /// Binary, and every cell starts at a multiple of its own size, i.e. the
    /// cells are nodes of the dyadic tree over the unit interval.
    pub fn is_aligned(&self) -> bool {
        let mut start = 0u64;
        for &c in &self.counts {
            if !c.is_power_of_two() || !start.is_multiple_of(c) {
                return false;
            }
            start += c;
        }
        true
    }

    /// Cumulative counts `0, c_1, c_1 + c_2, ...` (length `len + 1`).
    pub fn boundaries(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.counts.len() + 1);
        let mut acc = 0;
        out.push(0);
        for &c in &self.counts {
            acc += c;
            out.push(acc);
        }
        out
    }

    /// Rescales a dyadic sub-distribution so it sums to one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_count();
        if !total.is_power_of_two() {
            return Err(SurfError::InvalidDistribution(format!(
                "total {total}/{} is not dyadic",
                self.denom
            )));
        }
        Self::new(self.counts.clone(), total)
    }

    /// Splits a normalized distribution into its two equal-mass halves, each
    /// renormalized to one.
    pub fn halves(&self) -> Result<(Self, Self)> {
        let total = self.total_count();
        if total != self.denom || total < 2 {
            return Err(SurfError::InvalidDistribution(
                "halves() needs a normalized distribution with denominator >= 2".into(),
            ));
        }
        let half = total / 2;
        let mut acc = 0;
        let mut split = None;
        for (i, &c) in self.counts.iter().enumerate() {
            if acc == half {
                split = Some(i);
                break;
            }
            acc += c;
            if acc > half {
                return Err(SurfError::NonDyadicSplit(i));
            }
        }
        let split = split.ok_or(SurfError::NonDyadicSplit(self.counts.len()))?;
        Ok((
            Self::new(self.counts[..split].to_vec(), half)?,
            Self::new(self.counts[split..].to_vec(), half)?,
        ))
    }
}

/// Equal masses compare equal regardless of the stored denominator.
impl PartialEq for EmpiricalDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.counts.len() == other.counts.len()
            && self
                .counts
                .iter()
                .zip(&other.counts)
                .all(|(&a, &b)| a as u128 * other.denom as u128 == b as u128 * self.denom as u128)
    }
}

impl Eq for EmpiricalDistribution {}

/// The contiguous blocks induced by a full distribution: cell `i` covers
/// slots `r_i n .. (r_i + q_i) n`.
pub fn partition_of(dist: &EmpiricalDistribution, s: &SortedSamples) -> Result<Vec<Interval>> {
    if dist.total_count() != dist.denom() {
        return Err(SurfError::InvalidDistribution(format!(
            "masses sum to {}, not 1",
            dist.total()
        )));
    }
    let n = s.n() as u64;
    let slots = dist
        .boundaries()
        .into_iter()
        .map(|cum| {
            let scaled = cum as u128 * n as u128;
            if !scaled.is_multiple_of(dist.denom() as u128) {
                Err(SurfError::NonIntegerBoundary {
                    num: cum,
                    den: dist.denom(),
                    n: s.n(),
                })
            } else {
                Ok((scaled / dist.denom() as u128) as usize)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    slots.windows(2).map(|w| s.interval(w[0], w[1])).collect()
}

/// Replaces every mass by the terms of its binary expansion, largest first.
pub fn binary_decompose(dist: &EmpiricalDistribution) -> EmpiricalDistribution {
    let mut counts = Vec::with_capacity(dist.len() * 2);
    for &c in dist.counts() {
        for bit in (0..u64::BITS).rev() {
            let term = 1u64 << bit;
            if c & term != 0 {
                counts.push(term);
            }
        }
    }
    EmpiricalDistribution {
        counts,
        denom: dist.denom(),
    }
}

/// True iff every cell of `fine` lies inside a cell of `coarse`, i.e. each
/// boundary of `coarse` is also a boundary of `fine`.
pub fn refines(fine: &EmpiricalDistribution, coarse: &EmpiricalDistribution) -> Result<bool> {
    let (tf, df) = (fine.total_count() as u128, fine.denom() as u128);
    let (tc, dc) = (coarse.total_count() as u128, coarse.denom() as u128);
    if tf * dc != tc * df {
        return Err(SurfError::MassMismatch {
            left: fine.total().to_string(),
            right: coarse.total().to_string(),
        });
    }
    // Bring both onto the larger denominator; both are powers of two.
    let common = df.max(dc);
    let fine_b: Vec<u128> = fine
        .boundaries()
        .into_iter()
        .map(|b| b as u128 * (common / df))
        .collect();
    Ok(coarse
        .boundaries()
        .into_iter()
        .map(|b| b as u128 * (common / dc))
        .all(|b| fine_b.binary_search(&b).is_ok()))
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn mass_is_additive(a in 0usize..63, gap1 in 1usize..32, gap2 in 1usize..32) {
            let n = 128;
            let s = SortedSamples::new((1..n).map(|i| i as f64).collect(), n).unwrap();
            let c = (a + gap1).min(n - 1);
            let b = (c + gap2).min(n);
            prop_assume!(a < c && c < b);
            let whole = empirical_mass(a, b, &s).unwrap();
            let parts = empirical_mass(a, c, &s).unwrap() + empirical_mass(c, b, &s).unwrap();
            prop_assert_eq!(whole, parts);
        }

        #[test]
        fn decomposition_refines_and_shrinks_penalty(counts in prop::collection::vec(1u64..64, 1..8)) {
            let total: u64 = counts.iter().sum();
            let denom = total.next_power_of_two();
            let mut counts = counts;
            // pad so the masses sum to one
            if denom > total {
                counts.push(denom - total);
            }
            let d = EmpiricalDistribution::new(counts, denom).unwrap();
            let b = binary_decompose(&d);
            prop_assert!(b.is_binary());
            prop_assert!(refines(&b, &d).unwrap());
            let root = |x: &EmpiricalDistribution| -> f64 {
                x.counts().iter().map(|&c| (c as f64 / x.denom() as f64).sqrt()).sum()
            };
            prop_assert!(root(&b) <= root(&d) / (2f64.sqrt() - 1.0) + 1e-12);
        }
    }
}
