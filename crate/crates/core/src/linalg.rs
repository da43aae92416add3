//! Small dense linear solves (row-major, partial pivoting).

use crate::error::{Result, SurfError};

/// Pivots below this fraction of the largest matrix entry count as zero.
const PIVOT_REL: f64 = 1e-13;

/// Solves `a x = b` in place: on success `b` holds `x`. `a` is `k x k`
/// row-major and is destroyed.
pub fn solve(a: &mut [f64], b: &mut [f64]) -> Result<()> {
    let k = b.len();
    assert_eq!(a.len(), k * k, "matrix is not {k} x {k}");
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(SurfError::Singular);
    }
    for col in 0..k {
        let (piv, best) = (col..k)
            .map(|r| (r, a[r * k + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= PIVOT_REL * scale {
            return Err(SurfError::Singular);
        }
        if piv != col {
            for j in 0..k {
                a.swap(col * k + j, piv * k + j);
            }
            b.swap(col, piv);
        }
        let diag = a[col * k + col];
        for r in col + 1..k {
            let f = a[r * k + col] / diag;
            if f == 0.0 {
                continue;
            }
            for j in col..k {
                a[r * k + j] -= f * a[col * k + j];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..k).rev() {
        let mut acc = b[col];
        for j in col + 1..k {
            acc -= a[col * k + j] * b[j];
        }
        b[col] = acc / a[col * k + col];
    }
    Ok(())
}

/// Inverse of a `k x k` row-major matrix, column by column.
pub fn invert(a: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut inv = vec![0.0; k * k];
    for col in 0..k {
        let mut work = a.to_vec();
        let mut e = vec![0.0; k];
        e[col] = 1.0;
        solve(&mut work, &mut e)?;
        for r in 0..k {
            inv[r * k + col] = e[r];
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_pivoting() {
        // first pivot is zero without row exchange
        let mut a = vec![0.0, 1.0, 2.0, 1.0];
        let mut b = vec![3.0, 4.0];
        solve(&mut a, &mut b).unwrap();
        assert!((b[0] - 0.5).abs() < 1e-15 && (b[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_detected() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 1.0];
        assert!(matches!(solve(&mut a, &mut b), Err(SurfError::Singular)));
    }

    #[test]
    fn inverse_round_trip() {
        let a = vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = invert(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|m| a[i * 3 + m] * inv[m * 3 + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }
}
