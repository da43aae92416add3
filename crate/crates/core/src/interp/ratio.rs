use crate::error::{Result, SurfError};
use crate::linalg;
use crate::polynomial::{abs_l1, Polynomial};

use super::nodes::NodePartition;

/// `∫_0^1 |h|` over `Σ_i |∫_{J_i} h|`; `+inf` when every cell has zero net
/// area.
pub fn ratio(nodes: &NodePartition, h: &Polynomial) -> Result<f64> {
    if h.is_zero() {
        return Err(SurfError::ZeroPolynomial);
    }
    let num = abs_l1(h, 0.0, 1.0)?;
    let den: f64 = nodes
        .nodes()
        .windows(2)
        .map(|w| h.integrate(w[0], w[1]).map(f64::abs))
        .sum::<Result<f64>>()?;
    if den <= 1e-14 * num {
        return Ok(f64::INFINITY);
    }
    Ok(num / den)
}

/// For each cell `i`, the monic degree-`d` polynomial whose integral
/// vanishes on every other cell.
pub fn extremal_polys(nodes: &NodePartition) -> Result<Vec<Polynomial>> {
    nodes.require_strict()?;
    let d = nodes.degree();
    if d == 0 {
        return Ok(vec![Polynomial::constant(1.0)]);
    }
    let k = d + 1;
    let moments = nodes.moment_matrix();
    (0..k)
        .map(|i| {
            // unknowns c_0..c_{d-1}; rows are the cells other than i
            let mut a = Vec::with_capacity(d * d);
            let mut b = Vec::with_capacity(d);
            for row in (0..k).filter(|&r| r != i) {
                a.extend_from_slice(&moments[row * k..row * k + d]);
                b.push(-moments[row * k + d]);
            }
            linalg::solve(&mut a, &mut b).map_err(|_| {
                SurfError::DegeneratePartition(format!("no extremal polynomial for cell {i}"))
            })?;
            b.push(1.0);
            Ok(Polynomial::new(b))
        })
        .collect()
}

/// Worst-case ratio over all degree-`d` polynomials, attained on the
/// extremal set.
pub fn ratio_sup(nodes: &NodePartition) -> Result<f64> {
    extremal_polys(nodes)?
        .iter()
        .map(|h| ratio(nodes, h))
        .try_fold(1.0f64, |m, r| r.map(|r| m.max(r)))
}

fn objective(d: usize, half: &[f64]) -> f64 {
    if half.iter().any(|&m| !(m > 0.0 && m < 0.5)) || half.windows(2).any(|w| w[0] >= w[1]) {
        return f64::INFINITY;
    }
    NodePartition::symmetric(d, half)
        .and_then(|p| ratio_sup(&p))
        .unwrap_or(f64::INFINITY)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while b - a > tol {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
    }
    if fc <= fe {
        (c, fc)
    } else {
        (e, fe)
    }
}

/// Grid scan followed by golden-section refinement of the bracketing cells.
fn scan_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let grid = grid.max(8);
    let step = (hi - lo) / grid as f64;
    let (best, _) =
        (1..grid)
            .map(|i| (i, f(lo + step * i as f64)))
            .fold(
                (1, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
    let a = lo + step * (best - 1) as f64;
    let b = lo + step * (best + 1) as f64;
    golden_section(f, a, b, 1e-10)
}

fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], scale: f64, iters: usize) -> Vec<f64> {
    let k = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..k {
        let mut v = start.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if spread < 1e-10 {
            break;
        }
        let centroid: Vec<f64> = (0..k)
            .map(|j| simplex[..k].iter().map(|v| v[j]).sum::<f64>() / k as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[k])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < vals[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[k] = expanded;
                vals[k] = fe;
            } else {
                simplex[k] = reflected;
                vals[k] = fr;
            }
        } else if fr < vals[k - 1] {
            simplex[k] = reflected;
            vals[k] = fr;
        } else {
            let contracted = if fr < vals[k] {
                along(-0.5)
            } else {
                along(0.5)
            };
            let fc = f(&contracted);
            if fc < vals[k].min(fr) {
                simplex[k] = contracted;
                vals[k] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=k {
                    simplex[i] = simplex[i]
                        .iter()
                        .zip(&best)
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=k)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    simplex.swap_remove(best)
}

/// Searches node partitions of degree `d` minimizing [`ratio_sup`].
///
/// `d = 1` scans the single interior node over `(0, 1)`. Higher degrees
/// search symmetric partitions: one free node is scanned on a `grid`-point
/// mesh over `(0, 1/2)` and refined by golden section; several free nodes
/// are refined by Nelder-Mead from Chebyshev-Lobatto points.
pub fn optimize_nodes(d: usize, grid: usize) -> Result<NodePartition> {
    match d {
        0 => Ok(NodePartition::new(vec![0.0, 1.0])?.with_ratio(1.0)),
        1 => {
            let f = |m: f64| {
                NodePartition::new(vec![0.0, m, 1.0])
                    .and_then(|p| ratio_sup(&p))
                    .unwrap_or(f64::INFINITY)
            };
            let (m, r) = scan_1d(f, 0.0, 1.0, grid);
            Ok(NodePartition::new(vec![0.0, m, 1.0])?.with_ratio(r))
        }
        2 | 3 => {
            let (m, r) = scan_1d(|m| objective(d, &[m]), 0.0, 0.5, grid);
            Ok(NodePartition::symmetric(d, &[m])?.with_ratio(r))
        }
        _ => {
            let k = d / 2;
            let start: Vec<f64> = (1..=k)
                .map(|i| {
                    let theta = std::f64::consts::PI * i as f64 / (d + 1) as f64;
                    0.5 - 0.5 * theta.cos()
                })
                .collect();
            let mut best = nelder_mead(|v| objective(d, v), &start, 0.01, 400 * k);
            // restart once from the optimum to escape a collapsed simplex
            best = nelder_mead(|v| objective(d, v), &best, 0.002, 400 * k);
            let r = objective(d, &best);
            Ok(NodePartition::symmetric(d, &best)?.with_ratio(r))
        }
    }
}
