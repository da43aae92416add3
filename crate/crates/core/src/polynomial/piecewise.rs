//! Piecewise polynomial densities.
//!
//! Each piece stores its polynomial in the local coordinate
//! `t = (x - lo) / (hi - lo)` so that far-from-origin supports do not blow
//! up the monomial coefficients. The stored polynomial is still a density in
//! `x`: its value at `t` is the density at `x`.
//!
//! JSON schema (round-trips exactly):
//!
//! ```json
//! {
//!   "degree": 1,
//!   "hull": [lo, hi],
//!   "basis": "local",
//!   "pieces": [[lo, hi, c0, c1, ...], ...],
//!   "index_ranges": [[a, b], ...]
//! }
//! ```
//!
//! `index_ranges` is optional and records the sample-slot range each piece
//! was fitted on.

use serde::{Deserialize, Serialize};

use super::{compose_affine_into, roots::abs_l1_unit, Polynomial, MAX_DEGREE};
use crate::error::{Result, SurfError};

/// Relative threshold below which a difference polynomial counts as zero.
pub const ZERO_DIFF_REL: f64 = 1e-14;

/// `p(phi(x)) / L` as a polynomial in global `x`, where `phi` maps `[lo, hi]`
/// affinely onto `[0, 1]` and `L = hi - lo`. Mass is preserved.
pub fn rescale_density(p: &Polynomial, lo: f64, hi: f64) -> Result<Polynomial> {
    let len = hi - lo;
    if !(len > 0.0) {
        return Err(SurfError::ZeroLength);
    }
    // t = x / len - lo / len
    Ok(p.compose_affine(1.0 / len, -lo / len).scale(1.0 / len))
}

/// One piece of an estimate: a density on `[lo, hi]` in local coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    /// Density as a function of `t in [0, 1]`.
    pub local: Polynomial,
    /// Sample-slot range `[a, b)` the piece was fitted on, if known.
    pub range: Option<(usize, usize)>,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, local: Polynomial) -> Self {
        Self {
            lo,
            hi,
            local,
            range: None,
        }
    }

    /// A piece from a unit-interval density `h` (integrating to the piece
    /// mass over `[0, 1]`) placed on `[lo, hi]`.
    pub fn from_unit(h: &Polynomial, lo: f64, hi: f64) -> Result<Self> {
        let len = hi - lo;
        if !(len > 0.0) {
            return Err(SurfError::ZeroLength);
        }
        Ok(Self::new(lo, hi, h.scale(1.0 / len)))
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.local.eval((x - self.lo) / self.length())
    }

    /// The same density expressed in global `x`.
    pub fn global(&self) -> Polynomial {
        let len = self.length();
        self.local.compose_affine(1.0 / len, -self.lo / len)
    }

    pub fn mass(&self) -> f64 {
        self.length() * super::integral(self.local.coeffs(), 0.0, 1.0)
    }

    /// Writes the local polynomial re-expressed on the sub-range `[x0, x1]`
    /// (in that sub-range's own unit coordinate) into `out`.
    pub(crate) fn local_on(&self, x0: f64, x1: f64, out: &mut [f64]) {
        let len = self.length();
        let c = self.local.coeffs();
        compose_affine_into(
            c,
            (x1 - x0) / len,
            (x0 - self.lo) / len,
            &mut out[..c.len()],
        );
    }
}

/// `∫_0^1 |u - v|` on a shared unit coordinate, with the near-zero rule.
pub(crate) fn unit_l1_diff(u: &[f64], v: &[f64]) -> f64 {
    let len = u.len().max(v.len());
    let mut diff = [0.0; MAX_DEGREE + 1];
    let mut scale = 0.0f64;
    let mut max = 0.0f64;
    for (k, slot) in diff.iter_mut().enumerate().take(len) {
        let a = u.get(k).copied().unwrap_or(0.0);
        let b = v.get(k).copied().unwrap_or(0.0);
        *slot = a - b;
        scale = scale.max(a.abs()).max(b.abs());
        max = max.max(slot.abs());
    }
    if max <= ZERO_DIFF_REL * scale {
        return 0.0;
    }
    abs_l1_unit(&diff[..len])
}

/// Contiguous pieces covering the hull.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseEstimate {
    degree: usize,
    pieces: Vec<Piece>,
}

impl PiecewiseEstimate {
    /// Checks that pieces have positive length and abut exactly.
    pub fn new(degree: usize, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(SurfError::InvalidEstimate("no pieces".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if !(p.hi > p.lo) || !p.lo.is_finite() || !p.hi.is_finite() {
                return Err(SurfError::InvalidEstimate(format!(
                    "piece {i} has bounds [{}, {}]",
                    p.lo, p.hi
                )));
            }
            if p.local.degree() > degree {
                return Err(SurfError::InvalidEstimate(format!(
                    "piece {i} has degree {} above {degree}",
                    p.local.degree()
                )));
            }
        }
        if let Some(w) = pieces.windows(2).find(|w| w[0].hi != w[1].lo) {
            return Err(SurfError::CoverageGap(w[0].hi));
        }
        Ok(Self { degree, pieces })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    /// Index of the piece containing `x`; pieces are half-open except the
    /// last one.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.hull();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.pieces.partition_point(|p| p.hi <= x);
        Some(i.min(self.pieces.len() - 1))
    }

    /// Density at `x`; zero outside the hull.
    pub fn eval(&self, x: f64) -> f64 {
        self.locate(x).map_or(0.0, |i| self.pieces[i].eval(x))
    }

    pub fn total_mass(&self) -> f64 {
        self.pieces.iter().map(Piece::mass).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&EstimateJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: EstimateJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct EstimateJson {
    degree: usize,
    hull: [f64; 2],
    basis: String,
    pieces: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index_ranges: Option<Vec<[usize; 2]>>,
}

impl From<&PiecewiseEstimate> for EstimateJson {
    fn from(e: &PiecewiseEstimate) -> Self {
        let (lo, hi) = e.hull();
        let pieces = e
            .pieces
            .iter()
            .map(|p| {
                let mut row = vec![p.lo, p.hi];
                row.extend_from_slice(p.local.coeffs());
                row
            })
            .collect();
        let index_ranges = e
            .pieces
            .iter()
            .map(|p| p.range.map(|(a, b)| [a, b]))
            .collect::<Option<Vec<_>>>();
        Self {
            degree: e.degree,
            hull: [lo, hi],
            basis: "local".into(),
            pieces,
            index_ranges,
        }
    }
}

impl TryFrom<EstimateJson> for PiecewiseEstimate {
    type Error = SurfError;

    fn try_from(raw: EstimateJson) -> Result<Self> {
        if raw.basis != "local" {
            return Err(SurfError::InvalidEstimate(format!(
                "unsupported basis {:?}",
                raw.basis
            )));
        }
        if let Some(r) = &raw.index_ranges {
            if r.len() != raw.pieces.len() {
                return Err(SurfError::InvalidEstimate(
                    "index_ranges length differs from pieces".into(),
                ));
            }
        }
        let mut pieces = Vec::with_capacity(raw.pieces.len());
        for (i, row) in raw.pieces.into_iter().enumerate() {
            if row.len() < 3 {
                return Err(SurfError::InvalidEstimate(format!(
                    "piece {i} needs [lo, hi, c0, ...]"
                )));
            }
            let mut piece = Piece::new(row[0], row[1], Polynomial::try_new(row[2..].to_vec())?);
            piece.range = raw.index_ranges.as_ref().map(|r| (r[i][0], r[i][1]));
            pieces.push(piece);
        }
        let est = PiecewiseEstimate::new(raw.degree, pieces)?;
        if est.hull() != (raw.hull[0], raw.hull[1]) {
            return Err(SurfError::InvalidEstimate(
                "hull does not match the piece bounds".into(),
            ));
        }
        Ok(est)
    }
}

/// Exact `∫_lo^hi |u - v|`, summed over the common refinement of the two
/// piece grids.
pub fn l1_distance_piecewise(
    u: &PiecewiseEstimate,
    v: &PiecewiseEstimate,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if lo > hi {
        return Err(SurfError::ReversedBounds { a: lo, b: hi });
    }
    for e in [u, v] {
        let (hl, hh) = e.hull();
        if lo < hl {
            return Err(SurfError::CoverageGap(lo));
        }
        if hi > hh {
            return Err(SurfError::CoverageGap(hi));
        }
    }
    if lo == hi {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = u
        .pieces
        .iter()
        .chain(&v.pieces)
        .flat_map(|p| [p.lo, p.hi])
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = 0.0;
    let mut bu = [0.0; MAX_DEGREE + 1];
    let mut bv = [0.0; MAX_DEGREE + 1];
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let mid = 0.5 * (x0 + x1);
        let pu = &u.pieces[u.locate(mid).ok_or(SurfError::CoverageGap(mid))?];
        let pv = &v.pieces[v.locate(mid).ok_or(SurfError::CoverageGap(mid))?];
        let (lu, lv) = (pu.local.coeffs().len(), pv.local.coeffs().len());
        pu.local_on(x0, x1, &mut bu);
        pv.local_on(x0, x1, &mut bv);
        total += (x1 - x0) * unit_l1_diff(&bu[..lu], &bv[..lv]);
    }
    Ok(total)
}
