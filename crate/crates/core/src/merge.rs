//! Bottom-up merging of dyadic blocks.
//!
//! The merge keeps a binary distribution over the `n` sample slots, starting
//! from `n` unit cells. At step `i` the cells are grouped by the level-`i`
//! nodes of the dyadic tree, and each group collapses into one cell when
//! [`comp`] reports that no coarsening of it gains more in fit than it pays
//! in penalty.
//!
//! Every dyadic block is fitted once up front into a level table; the
//! recursion then only composes and compares stored polynomials.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SurfError};
use crate::interp::{Coeffs, Fitter, MassRule, NodeTable, FIT_LEN, MAX_FIT_DEGREE};
use crate::polynomial::{compose_affine_into, unit_l1_diff, Piece, PiecewiseEstimate, Polynomial};
use crate::samples::{EmpiricalDistribution, Interval, SortedSamples};

/// `alpha` reproducing the published experiments.
pub const DEFAULT_ALPHA: f64 = 0.25;
/// `alpha` inside the regime where the error guarantee holds (`alpha > 2`).
pub const THEORY_ALPHA: f64 = 4.5;
pub const DEFAULT_DELTA: f64 = 0.1;

/// How the penalty handed to a group scales with the group's mass `q`.
///
/// Inside a group the masses are renormalized to sum to one, so the
/// penalty `gamma * Σ sqrt(p)` is relative to the group. `Group` passes
/// `gamma` unchanged to every group. `Absolute` passes `gamma * sqrt(q)`,
/// which equals `gamma * Σ sqrt(p)` over the un-normalized masses and so
/// matches the fit term, which is an absolute ℓ1 distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyScale {
    Group,
    #[default]
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfConfig {
    pub degree: usize,
    pub alpha: f64,
    pub delta: f64,
    /// Overrides `sqrt(5 ln(n / delta) / n)`.
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub parallel: bool,
    /// Stop once every cell has mass at least `1 / t`.
    pub halt_t: Option<usize>,
    pub mass_rule: MassRule,
    pub penalty: PenaltyScale,
}

impl Default for SurfConfig {
    fn default() -> Self {
        Self::new(1)
    }
}

impl SurfConfig {
    pub fn new(degree: usize) -> Self {
        Self {
            degree,
            alpha: DEFAULT_ALPHA,
            delta: DEFAULT_DELTA,
            epsilon: None,
            seed: 0,
            parallel: true,
            halt_t: None,
            mass_rule: MassRule::AddOne,
            penalty: PenaltyScale::Absolute,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree > MAX_FIT_DEGREE {
            return Err(SurfError::DegreeTooLarge {
                degree: self.degree,
                max: MAX_FIT_DEGREE,
            });
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(SurfError::Config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(SurfError::Config(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(SurfError::Config(format!(
                    "epsilon must be positive, got {e}"
                )));
            }
        }
        Ok(())
    }

    /// `sqrt(5 ln(n / delta) / n)` unless overridden.
    pub fn epsilon_for(&self, n: usize) -> f64 {
        self.epsilon.unwrap_or_else(|| {
            let n = n as f64;
            (5.0 * (n / self.delta).ln() / n).sqrt()
        })
    }

    /// `alpha * r_d * epsilon * sqrt(d + 1)`, with `r_d` recomputed from the
    /// stored nodes.
    pub fn gamma_for(&self, n: usize) -> Result<f64> {
        self.validate()?;
        let r = NodeTable::get().entry(self.degree)?.recomputed;
        Ok(self.alpha * r * self.epsilon_for(n) * ((self.degree + 1) as f64).sqrt())
    }

    /// Number of merge steps: `D - log2 t`, or `D` without a halt.
    pub fn steps_for(&self, n: usize) -> Result<u32> {
        let depth = n.trailing_zeros();
        match self.halt_t {
            None => Ok(depth),
            Some(t) if t.is_power_of_two() && t < n => Ok(depth - t.trailing_zeros()),
            Some(t) => Err(SurfError::InvalidHalt { t, n }),
        }
    }
}

/// `gamma * Σ sqrt(p)` over the masses renormalized to sum to one.
pub fn lambda_penalty(dist: &EmpiricalDistribution, gamma: f64) -> f64 {
    let total = dist.total_count() as f64;
    gamma
        * dist
            .counts()
            .iter()
            .map(|&c| (c as f64 / total).sqrt())
            .sum::<f64>()
}

#[derive(Debug, Clone, Copy)]
struct NodeFit {
    lo: f64,
    hi: f64,
    /// `None` for a zero-length block.
    c: Option<Coeffs>,
}

/// Fits of every dyadic block, level by level: `levels[l][k]` covers slots
/// `k 2^l .. (k + 1) 2^l`.
struct FitTable {
    levels: Vec<Vec<NodeFit>>,
}

impl FitTable {
    fn build(s: &SortedSamples, fitter: &Fitter, top: u32, parallel: bool) -> Self {
        let n = s.n();
        let fit_node = |l: u32, k: usize| {
            let (a, b) = (k << l, (k + 1) << l);
            let iv = s.interval(a, b).expect("dyadic block is in range");
            let held = &s.values()[s.sample_range(a, b)];
            NodeFit {
                lo: iv.lo,
                hi: iv.hi,
                c: fitter.fit(held, iv.lo, iv.hi),
            }
        };
        let levels = (0..=top)
            .map(|l| {
                let count = n >> l;
                if parallel {
                    (0..count).into_par_iter().map(|k| fit_node(l, k)).collect()
                } else {
                    (0..count).map(|k| fit_node(l, k)).collect()
                }
            })
            .collect();
        Self { levels }
    }

    fn get(&self, c: Cell) -> &NodeFit {
        &self.levels[c.level as usize][c.index]
    }
}

/// A dyadic block: level `l`, index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    level: u32,
    index: usize,
}

impl Cell {
    fn start(self) -> usize {
        self.index << self.level
    }
}

/// ℓ1 distance over `node` between its own fit and the group fit.
fn lambda_term(node: &NodeFit, group: &NodeFit, k: usize) -> f64 {
    let (Some(nc), Some(gc)) = (node.c, group.c) else {
        return 0.0;
    };
    let len_n = node.hi - node.lo;
    let len_g = group.hi - group.lo;
    let mut local = [0.0; FIT_LEN];
    compose_affine_into(
        &gc[..k],
        len_n / len_g,
        (node.lo - group.lo) / len_g,
        &mut local[..k],
    );
    len_n * unit_l1_diff(&nc[..k], &local[..k])
}

/// Cell lists above this size fork the recursion.
const FORK_CELLS: usize = 2048;

struct Comparator<'a> {
    table: &'a FitTable,
    k: usize,
    parallel: bool,
}

impl Comparator<'_> {
    /// `cells` are the current cells inside `node`, in order.
    fn comp(&self, group: &NodeFit, node: Cell, cells: &[Cell], gamma: f64) -> f64 {
        let mu = lambda_term(self.table.get(node), group, self.k) - gamma;
        if cells.len() == 1 {
            debug_assert_eq!(cells[0], node);
            return mu;
        }
        let left = Cell {
            level: node.level - 1,
            index: 2 * node.index,
        };
        let right = Cell {
            level: node.level - 1,
            index: 2 * node.index + 1,
        };
        let split = cells.partition_point(|c| c.start() < right.start());
        let g = gamma / SQRT_2;
        let (l, r) = if self.parallel && cells.len() > FORK_CELLS {
            rayon::join(
                || self.comp(group, left, &cells[..split], g),
                || self.comp(group, right, &cells[split..], g),
            )
        } else {
            (
                self.comp(group, left, &cells[..split], g),
                self.comp(group, right, &cells[split..], g),
            )
        };
        mu.max(l + r)
    }
}

/// The merge pass, one step at a time.
pub struct MergeState<'a> {
    samples: &'a SortedSamples,
    fitter: Fitter,
    table: FitTable,
    cells: Vec<Cell>,
    step: u32,
    last: u32,
    gamma: f64,
    parallel: bool,
    penalty: PenaltyScale,
}

impl<'a> MergeState<'a> {
    pub fn new(s: &'a SortedSamples, cfg: &SurfConfig) -> Result<Self> {
        cfg.validate()?;
        let n = s.n();
        let last = cfg.steps_for(n)?;
        let fitter = Fitter::new(cfg.degree, n, cfg.mass_rule)?;
        let table = FitTable::build(s, &fitter, last, cfg.parallel);
        Ok(Self {
            samples: s,
            fitter,
            table,
            cells: (0..n).map(|index| Cell { level: 0, index }).collect(),
            step: 0,
            last,
            gamma: cfg.gamma_for(n)?,
            parallel: cfg.parallel,
            penalty: cfg.penalty,
        })
    }

    /// Steps completed so far.
    pub fn steps_done(&self) -> u32 {
        self.step
    }

    pub fn total_steps(&self) -> u32 {
        self.last
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.last
    }

    /// Runs one step; returns `false` once all steps are done.
    pub fn step(&mut self) -> bool {
        if self.is_done() {
            return false;
        }
        let i = self.step + 1;
        let n = self.samples.n();
        let mut bounds = Vec::with_capacity((n >> i) + 1);
        for (pos, c) in self.cells.iter().enumerate() {
            if pos == 0 || (c.start() >> i) != (self.cells[pos - 1].start() >> i) {
                bounds.push(pos);
            }
        }
        bounds.push(self.cells.len());

        let group_mass = (1u64 << i) as f64 / n as f64;
        let gamma = match self.penalty {
            PenaltyScale::Group => self.gamma,
            PenaltyScale::Absolute => self.gamma * group_mass.sqrt(),
        };
        let cmp = Comparator {
            table: &self.table,
            k: self.fitter.degree() + 1,
            parallel: self.parallel,
        };
        let cells = &self.cells;
        let decide = |w: &[usize]| {
            let slice = &cells[w[0]..w[1]];
            let node = Cell {
                level: i,
                index: slice[0].start() >> i,
            };
            let group = cmp.table.get(node);
            cmp.comp(group, node, slice, gamma) <= 0.0
        };
        let merged: Vec<bool> = if self.parallel {
            bounds.par_windows(2).map(decide).collect()
        } else {
            bounds.windows(2).map(decide).collect()
        };

        let mut next = Vec::with_capacity(self.cells.len());
        for (w, m) in bounds.windows(2).zip(merged) {
            if m {
                next.push(Cell {
                    level: i,
                    index: self.cells[w[0]].start() >> i,
                });
            } else {
                next.extend_from_slice(&self.cells[w[0]..w[1]]);
            }
        }
        self.cells = next;
        self.step = i;
        true
    }

    pub fn run(&mut self) {
        while self.step() {}
    }

    /// The held binary distribution over denominator `n`.
    pub fn distribution(&self) -> EmpiricalDistribution {
        EmpiricalDistribution::new(
            self.cells.iter().map(|c| 1u64 << c.level).collect(),
            self.samples.n() as u64,
        )
        .expect("cells partition the slots")
    }

    /// Fits on the held partition; zero-length cells are dropped.
    pub fn estimate(&self) -> Result<PiecewiseEstimate> {
        let d = self.fitter.degree();
        let pieces: Vec<Piece> = self
            .cells
            .iter()
            .filter_map(|&c| {
                let f = self.table.get(c);
                f.c.map(|coeffs| {
                    let mut p = Piece::new(f.lo, f.hi, Polynomial::new(coeffs[..=d].to_vec()));
                    p.range = Some((c.start(), (c.index + 1) << c.level));
                    p
                })
            })
            .collect();
        if pieces.is_empty() {
            return Err(SurfError::InvalidEstimate(
                "all samples coincide; the hull has zero length".into(),
            ));
        }
        PiecewiseEstimate::new(d, pieces)
    }
}

/// Runs every merge step (or `D - log2 t` with a halt) and returns the
/// final binary distribution.
pub fn merge(s: &SortedSamples, cfg: &SurfConfig) -> Result<EmpiricalDistribution> {
    let mut state = MergeState::new(s, cfg)?;
    state.run();
    Ok(state.distribution())
}

/// The piecewise fit on the merged partition.
pub fn surf(s: &SortedSamples, cfg: &SurfConfig) -> Result<PiecewiseEstimate> {
    let mut state = MergeState::new(s, cfg)?;
    state.run();
    state.estimate()
}

/// [`surf`] stopped after `D - log2 t` steps.
pub fn surf_halted(s: &SortedSamples, cfg: &SurfConfig, t: usize) -> Result<PiecewiseEstimate> {
    let cfg = SurfConfig {
        halt_t: Some(t),
        ..cfg.clone()
    };
    surf(s, &cfg)
}

/// Best gain of any dyadic coarsening of `cells` over the single fit
/// `fhat`, net of penalty.
///
/// `dist` is the normalized distribution of `cells`; it must be aligned to
/// the dyadic tree so that every split falls on a cell boundary. Fits are
/// computed on demand. Returns the maximum over coarsenings `p` of
/// `‖fit_p - fhat‖ - gamma Σ sqrt(p)`.
pub fn comp(
    fhat: &Piece,
    cells: &[Interval],
    dist: &EmpiricalDistribution,
    s: &SortedSamples,
    d: usize,
    gamma: f64,
    rule: MassRule,
) -> Result<f64> {
    if dist.total_count() != dist.denom() {
        return Err(SurfError::InvalidDistribution(
            "comp needs a normalized distribution".into(),
        ));
    }
    if cells.len() != dist.len() {
        return Err(SurfError::InvalidDistribution(format!(
            "{} cells for {} masses",
            cells.len(),
            dist.len()
        )));
    }
    if let Some(i) = cells
        .windows(2)
        .position(|w| w[0].hi_index != w[1].lo_index)
    {
        return Err(SurfError::InvalidRange {
            a: cells[i].hi_index,
            b: cells[i + 1].lo_index,
            n: s.n(),
        });
    }
    let slots = (cells[cells.len() - 1].hi_index - cells[0].lo_index) as u64;
    for (c, &m) in cells.iter().zip(dist.counts()) {
        if c.slots() as u64 * dist.denom() != m * slots {
            return Err(SurfError::InvalidDistribution(format!(
                "cell [{}, {}) does not carry mass {m}/{}",
                c.lo_index,
                c.hi_index,
                dist.denom()
            )));
        }
    }
    let k = d + 1;
    if fhat.local.coeffs().len() > k {
        return Err(SurfError::InvalidEstimate("fhat degree exceeds d".into()));
    }
    let fitter = Fitter::new(d, s.n(), rule)?;
    let mut g = [0.0; FIT_LEN];
    g[..fhat.local.coeffs().len()].copy_from_slice(fhat.local.coeffs());
    let group = NodeFit {
        lo: fhat.lo,
        hi: fhat.hi,
        c: Some(g),
    };
    comp_on_demand(&group, cells, dist, s, &fitter, gamma)
}

fn comp_on_demand(
    group: &NodeFit,
    cells: &[Interval],
    dist: &EmpiricalDistribution,
    s: &SortedSamples,
    fitter: &Fitter,
    gamma: f64,
) -> Result<f64> {
    let (a, b) = (cells[0].lo_index, cells[cells.len() - 1].hi_index);
    let iv = s.interval(a, b)?;
    if !iv.is_degenerate() && (iv.lo < group.lo || iv.hi > group.hi) {
        return Err(SurfError::CoverageGap(if iv.lo < group.lo {
            iv.lo
        } else {
            iv.hi
        }));
    }
    let node = NodeFit {
        lo: iv.lo,
        hi: iv.hi,
        c: fitter.fit(&s.values()[s.sample_range(a, b)], iv.lo, iv.hi),
    };
    let mu = lambda_term(&node, group, fitter.degree() + 1) - gamma;
    if cells.len() == 1 {
        return Ok(mu);
    }
    let (dl, dr) = dist.halves()?;
    let (cl, cr) = cells.split_at(dl.len());
    let g = gamma / SQRT_2;
    let l = comp_on_demand(group, cl, &dl, s, fitter, g)?;
    let r = comp_on_demand(group, cr, &dr, s, fitter, g)?;
    Ok(mu.max(l + r))
}
