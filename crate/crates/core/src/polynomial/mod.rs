//! Low-degree real polynomials in the monomial basis.

mod piecewise;
mod roots;

pub use piecewise::{
    l1_distance_piecewise, rescale_density, Piece, PiecewiseEstimate, ZERO_DIFF_REL,
};

pub(crate) use piecewise::unit_l1_diff;
pub use roots::{abs_l1, real_roots_in};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SurfError};

/// Largest degree the root finder and the fixed-size buffers support.
pub const MAX_DEGREE: usize = 16;

/// `c[0] + c[1] x + ... + c[d] x^d`. The leading coefficient may be zero;
/// the degree is nominal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Panics on non-finite coefficients or more than `MAX_DEGREE + 1` terms.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "polynomial coefficients must be finite"
        );
        assert!(coeffs.len() <= MAX_DEGREE + 1, "degree above {MAX_DEGREE}");
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { coeffs }
    }

    pub fn try_new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(SurfError::DegreeTooLarge {
                degree: coeffs.len() - 1,
                max: MAX_DEGREE,
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(SurfError::InvalidEstimate("non-finite coefficient".into()));
        }
        Ok(Self::new(coeffs))
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Nominal degree (stored length minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Signed integral over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if a > b {
            return Err(SurfError::ReversedBounds { a, b });
        }
        Ok(integral(&self.coeffs, a, b))
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&0.0) + other.coeffs.get(i).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// `p(alpha * x + beta)`.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Self {
        let mut out = vec![0.0; self.coeffs.len()];
        compose_affine_into(&self.coeffs, alpha, beta, &mut out);
        Self::new(out)
    }
}

pub(crate) fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

/// `P(b) - P(a)` for the antiderivative `P` with `P(0) = 0`.
pub(crate) fn integral(c: &[f64], a: f64, b: f64) -> f64 {
    let anti = |x: f64| {
        let mut acc = 0.0;
        for (k, &ck) in c.iter().enumerate().rev() {
            acc = acc * x + ck / (k + 1) as f64;
        }
        acc * x
    };
    anti(b) - anti(a)
}

/// Writes the coefficients of `p(alpha * x + beta)` into `out`
/// (`out.len() == c.len()`).
pub(crate) fn compose_affine_into(c: &[f64], alpha: f64, beta: f64, out: &mut [f64]) {
    debug_assert_eq!(c.len(), out.len());
    out.iter_mut().for_each(|o| *o = 0.0);
    let d = c.len() - 1;
    // Horner in the polynomial ring: acc <- acc * (alpha x + beta) + c_k.
    out[0] = c[d];
    let mut len = 1;
    for k in (0..d).rev() {
        for j in (0..len).rev() {
            let v = out[j];
            out[j + 1] += alpha * v;
            out[j] = beta * v;
        }
        out[0] += c[k];
        len += 1;
    }
}
