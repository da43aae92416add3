//! Interpolating fits on a fixed node partition and the ratio constants
//! that bound their error.
//!
//! A fit maps an interval onto `[0, 1]`, counts the samples in each node
//! cell `J_i`, and returns the unique degree-`d` polynomial whose integral
//! over `J_i` equals the cell's mass.

mod nodes;
mod ratio;

pub use nodes::{NodeEntry, NodePartition, NodeTable, RatioClaim, MAX_FIT_DEGREE};
pub use ratio::{extremal_polys, optimize_nodes, ratio, ratio_sup};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SurfError};
use crate::linalg;
use crate::polynomial::{Piece, Polynomial};
use crate::samples::{Interval, SortedSamples};

/// How cell counts become masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassRule {
    /// `(n_J + 1) / n`.
    #[default]
    AddOne,
    /// `n_J / n`.
    Raw,
}

impl MassRule {
    fn offset(self) -> f64 {
        match self {
            MassRule::AddOne => 1.0,
            MassRule::Raw => 0.0,
        }
    }
}

/// The polynomial on `[0, 1]` whose integral over cell `i` is `masses[i]`.
pub fn fit_on_unit(masses: &[f64], nodes: &NodePartition) -> Result<Polynomial> {
    let k = nodes.degree() + 1;
    if masses.len() != k {
        return Err(SurfError::DegeneratePartition(format!(
            "{} masses for {k} cells",
            masses.len()
        )));
    }
    nodes.require_strict()?;
    let mut a = nodes.moment_matrix();
    let mut b = masses.to_vec();
    linalg::solve(&mut a, &mut b).map_err(|_| {
        SurfError::DegeneratePartition(format!("moment system singular for {:?}", nodes.nodes()))
    })?;
    Ok(Polynomial::new(b))
}

pub(crate) const FIT_LEN: usize = MAX_FIT_DEGREE + 1;

/// Local-coordinate density coefficients; entries past `d` are zero.
pub(crate) type Coeffs = [f64; FIT_LEN];

/// Fits with a fixed degree, budget and mass rule, using the stored
/// inverse moment matrix.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fitter {
    d: usize,
    n: f64,
    rule: MassRule,
    entry: &'static NodeEntry,
}

impl Fitter {
    pub(crate) fn new(d: usize, n: usize, rule: MassRule) -> Result<Self> {
        Ok(Self {
            d,
            n: n as f64,
            rule,
            entry: NodeTable::get().entry(d)?,
        })
    }

    pub(crate) fn degree(&self) -> usize {
        self.d
    }

    /// `samples` are the sorted values lying in `[lo, hi]`. Returns `None`
    /// for a zero-length interval.
    pub(crate) fn fit(&self, samples: &[f64], lo: f64, hi: f64) -> Option<Coeffs> {
        let len = hi - lo;
        if !(len > 0.0) {
            return None;
        }
        let k = self.d + 1;
        let nodes = self.entry.partition.nodes();
        let mut masses = [0.0; FIT_LEN];
        let mut prev = 0;
        for i in 0..k {
            let cum = if i + 1 == k {
                samples.len()
            } else {
                let edge = nodes[i + 1];
                samples.partition_point(|&x| (x - lo) / len < edge)
            };
            masses[i] = ((cum - prev) as f64 + self.rule.offset()) / self.n;
            prev = cum;
        }
        let inv = &self.entry.inverse;
        let mut out = [0.0; FIT_LEN];
        for (j, o) in out.iter_mut().enumerate().take(k) {
            let row = &inv[j * k..(j + 1) * k];
            let h: f64 = row.iter().zip(&masses[..k]).map(|(a, q)| a * q).sum();
            *o = h / len;
        }
        Some(out)
    }
}

/// Fits a degree-`d` density on the block `iv` from the samples it holds.
///
/// The result is a piece in local coordinates carrying the block's slot
/// range.
pub fn int_fit(iv: &Interval, s: &SortedSamples, d: usize, rule: MassRule) -> Result<Piece> {
    if iv.is_degenerate() {
        return Err(SurfError::ZeroLength);
    }
    let fitter = Fitter::new(d, s.n(), rule)?;
    let held = &s.values()[s.sample_range(iv.lo_index, iv.hi_index)];
    let c = fitter
        .fit(held, iv.lo, iv.hi)
        .ok_or(SurfError::ZeroLength)?;
    let mut piece = Piece::new(iv.lo, iv.hi, Polynomial::new(c[..=d].to_vec()));
    piece.range = Some((iv.lo_index, iv.hi_index));
    Ok(piece)
}
