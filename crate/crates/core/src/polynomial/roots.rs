//! Real-root isolation by Sturm sequences and exact absolute integrals.
//!
//! Everything is done on the unit interval: a query on `[a, b]` is first
//! mapped to `s in [0, 1]` via `x = a + (b - a) s`. Chains live in fixed-size
//! stack buffers since this sits on the innermost loop of the merge pass.

use super::{compose_affine_into, horner, integral, Polynomial, MAX_DEGREE};
use crate::error::{Result, SurfError};

/// Absolute accuracy of reported roots.
pub const ROOT_TOL: f64 = 1e-12;

const N: usize = MAX_DEGREE + 1;

/// Coefficients below this fraction of the largest one are dropped from the
/// top when determining the effective degree on the unit interval.
const TRIM_REL: f64 = 1e-14;

/// A remainder whose largest coefficient (after the chain is normalized to
/// unit max-norm) falls below this is treated as zero: the previous member
/// is then the gcd of `p` and `p'`.
const REMAINDER_ZERO: f64 = 1e-11;

const fn binomials() -> [[f64; N]; N] {
    let mut t = [[0.0; N]; N];
    let mut n = 0;
    while n < N {
        t[n][0] = 1.0;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0.0 };
            k += 1;
        }
        n += 1;
    }
    t
}

static BINOM: [[f64; N]; N] = binomials();

fn effective_len(c: &[f64]) -> usize {
    let max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0;
    }
    let mut len = c.len();
    while len > 1 && c[len - 1].abs() <= TRIM_REL * max {
        len -= 1;
    }
    len
}

struct Sturm {
    polys: [[f64; N]; N],
    lens: [usize; N],
    count: usize,
}

impl Sturm {
    fn new(p: &[f64]) -> Self {
        let mut s = Sturm {
            polys: [[0.0; N]; N],
            lens: [0; N],
            count: 0,
        };
        // p itself stays unscaled so exact zeros of p stay exact
        s.polys[0][..p.len()].copy_from_slice(p);
        s.lens[0] = p.len();
        s.count = 1;
        let d = p.len() - 1;
        let mut deriv = [0.0; N];
        for k in 1..=d {
            deriv[k - 1] = k as f64 * p[k];
        }
        s.push(&deriv[..d]);
        while s.lens[s.count - 1] > 1 {
            let mut a = s.polys[s.count - 2];
            if s.count == 2 {
                let max = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                a.iter_mut().for_each(|v| *v /= max);
            }
            let la = s.lens[s.count - 2];
            let b = s.polys[s.count - 1];
            let lb = s.lens[s.count - 1];
            let mut r = [0.0; N];
            let lr = neg_remainder(&a[..la], &b[..lb], &mut r);
            if lr == 0 {
                break;
            }
            s.push(&r[..lr]);
        }
        s
    }

    /// Appends `p` scaled to unit max-norm (a positive factor, so signs are
    /// unchanged).
    fn push(&mut self, p: &[f64]) {
        let max = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let slot = &mut self.polys[self.count];
        for (dst, src) in slot.iter_mut().zip(p) {
            *dst = src / max;
        }
        self.lens[self.count] = p.len();
        self.count += 1;
    }

    fn variations(&self, x: f64) -> i32 {
        let mut changes = 0;
        let mut last = 0.0f64;
        for i in 0..self.count {
            let v = horner(&self.polys[i][..self.lens[i]], x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
        changes
    }
}

/// `-(a mod b)` written into `out`; returns its effective length, 0 when the
/// remainder vanishes. Both inputs have unit max-norm.
fn neg_remainder(a: &[f64], b: &[f64], out: &mut [f64; N]) -> usize {
    let mut rem = [0.0; N];
    rem[..a.len()].copy_from_slice(a);
    let lb = b.len();
    let lead = b[lb - 1];
    let mut top = a.len();
    while top >= lb {
        let q = rem[top - 1] / lead;
        let shift = top - lb;
        for j in 0..lb {
            rem[shift + j] -= q * b[j];
        }
        rem[top - 1] = 0.0;
        top -= 1;
    }
    let max = rem[..lb - 1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max <= REMAINDER_ZERO {
        return 0;
    }
    let mut len = lb - 1;
    while len > 1 && rem[len - 1].abs() <= TRIM_REL * max {
        len -= 1;
    }
    for j in 0..len {
        out[j] = -rem[j];
    }
    len
}

/// Safeguarded Newton on a sign-changing bracket.
fn refine_bracket(p: &[f64], lo: f64, hi: f64, flo: f64, tol: f64) -> f64 {
    let (mut xl, mut xh) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = value_and_slope(p, x);
    for _ in 0..200 {
        if f == 0.0 {
            return x;
        }
        let newton_leaves = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0;
        if newton_leaves || (2.0 * f).abs() > (dx_old * df).abs() {
            dx_old = dx;
            dx = 0.5 * (xh - xl);
            x = xl + dx;
        } else {
            dx_old = dx;
            dx = f / df;
            x -= dx;
        }
        if dx.abs() < tol {
            return x;
        }
        let fd = value_and_slope(p, x);
        f = fd.0;
        df = fd.1;
        if f < 0.0 {
            xl = x;
        } else {
            xh = x;
        }
    }
    x
}

fn value_and_slope(c: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &ck in c.iter().rev() {
        d = d * x + v;
        v = v * x + ck;
    }
    (v, d)
}

struct Isolator<'a> {
    p: &'a [f64],
    chain: Sturm,
    tol: f64,
    roots: Vec<f64>,
}

impl Isolator<'_> {
    fn isolate(&mut self, lo: f64, hi: f64, vlo: i32, vhi: i32) {
        let k = vlo - vhi;
        if k <= 0 {
            return;
        }
        if hi - lo <= self.tol {
            self.roots.push(0.5 * (lo + hi));
            return;
        }
        if k == 1 {
            let fhi = horner(self.p, hi);
            if fhi == 0.0 {
                self.roots.push(hi);
                return;
            }
            let flo = horner(self.p, lo);
            if flo != 0.0 && (flo > 0.0) != (fhi > 0.0) {
                let r = refine_bracket(self.p, lo, hi, flo, self.tol);
                self.roots.push(r);
                return;
            }
            // even multiplicity: no sign change, keep bisecting on counts
        }
        let mid = 0.5 * (lo + hi);
        let vmid = self.chain.variations(mid);
        self.isolate(lo, mid, vlo, vmid);
        self.isolate(mid, hi, vmid, vhi);
    }
}

/// Roots of `c` in `[0, 1]`, ascending, deduplicated within `tol`.
pub(crate) fn unit_roots(c: &[f64], tol: f64) -> Vec<f64> {
    let len = effective_len(c);
    if len <= 1 {
        return Vec::new();
    }
    let c = &c[..len];
    let mut roots = Vec::new();
    if len == 2 {
        let r = -c[0] / c[1];
        if (0.0..=1.0).contains(&r) {
            roots.push(r);
        }
        return roots;
    }
    if c[0] == 0.0 {
        roots.push(0.0);
    }
    let chain = Sturm::new(c);
    let v0 = chain.variations(0.0);
    let v1 = chain.variations(1.0);
    let mut iso = Isolator {
        p: c,
        chain,
        tol,
        roots,
    };
    iso.isolate(0.0, 1.0, v0, v1);
    let mut roots = iso.roots;
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= tol);
    roots
}

/// All real roots of `p` in `[a, b]`, ascending, to absolute accuracy
/// [`ROOT_TOL`] and deduplicated within it.
pub fn real_roots_in(p: &Polynomial, a: f64, b: f64) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(SurfError::ZeroPolynomial);
    }
    if a > b {
        return Err(SurfError::ReversedBounds { a, b });
    }
    if a == b {
        return Ok(if p.eval(a) == 0.0 {
            vec![a]
        } else {
            Vec::new()
        });
    }
    let width = b - a;
    let mut q = [0.0; N];
    let q = &mut q[..p.coeffs().len()];
    compose_affine_into(p.coeffs(), width, a, q);
    let tol = (ROOT_TOL / width).max(4.0 * f64::EPSILON);
    let mut roots: Vec<f64> = unit_roots(q, tol)
        .into_iter()
        .map(|s| (a + width * s).clamp(a, b))
        .collect();
    roots.dedup_by(|y, x| (*y - *x).abs() <= ROOT_TOL);
    Ok(roots)
}

/// `true` when all Bernstein coefficients on `[0, 1]` share a sign, which
/// proves `p` does not change sign there.
fn bernstein_one_signed(c: &[f64]) -> bool {
    let d = c.len() - 1;
    let (mut pos, mut neg) = (false, false);
    for k in 0..=d {
        let mut b = 0.0;
        for (j, &cj) in c.iter().enumerate().take(k + 1) {
            b += BINOM[k][j] / BINOM[d][j] * cj;
        }
        pos |= b > 0.0;
        neg |= b < 0.0;
        if pos && neg {
            return false;
        }
    }
    true
}

/// `∫_0^1 |p|` for a polynomial given by coefficients.
pub(crate) fn abs_l1_unit(c: &[f64]) -> f64 {
    let len = effective_len(c);
    if len == 0 {
        return 0.0;
    }
    let c = &c[..len];
    if len == 1 {
        return c[0].abs();
    }
    if bernstein_one_signed(c) {
        return integral(c, 0.0, 1.0).abs();
    }
    let mut total = 0.0;
    let mut prev = 0.0;
    for r in unit_roots(c, ROOT_TOL) {
        total += integral(c, prev, r).abs();
        prev = r;
    }
    total + integral(c, prev, 1.0).abs()
}

/// `∫_a^b |p|`, summing absolute signed areas between consecutive roots.
pub fn abs_l1(p: &Polynomial, a: f64, b: f64) -> Result<f64> {
    if p.is_zero() {
        return Err(SurfError::ZeroPolynomial);
    }
    if a > b {
        return Err(SurfError::ReversedBounds { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let width = b - a;
    let mut q = [0.0; N];
    let q = &mut q[..p.coeffs().len()];
    compose_affine_into(p.coeffs(), width, a, q);
    Ok(width * abs_l1_unit(q))
}
