//! Node-constant table: recomputed ratios against the published ones.

use std::io::Write;

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use surf_core::interp::{optimize_nodes, NodeTable, RatioClaim, MAX_FIT_DEGREE};

pub const HEADER: &str =
    "degree,nodes,recomputed_ratio,published_ratio,claim,delta,optimized_nodes,optimized_ratio";

/// Node lists are space-separated inside one field. The optimized columns
/// are empty unless optimization was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub degree: usize,
    pub nodes: String,
    pub recomputed_ratio: f64,
    pub published_ratio: f64,
    pub claim: String,
    pub delta: f64,
    pub optimized_nodes: Option<String>,
    pub optimized_ratio: Option<f64>,
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a node field back into numbers.
pub fn split_nodes(field: &str) -> Result<Vec<f64>> {
    Ok(field
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<Vec<f64>, _>>()?)
}

/// `optimize` runs the node search with `grid` scan points per degree.
pub fn verify_nodes(
    degrees: std::ops::RangeInclusive<usize>,
    optimize: Option<usize>,
) -> Result<Vec<VerifyRow>> {
    if *degrees.end() > MAX_FIT_DEGREE {
        bail!("degree must be ≤ {MAX_FIT_DEGREE}, got {}", degrees.end());
    }
    let table = NodeTable::get();
    degrees
        .map(|d| {
            let e = table.entry(d)?;
            let (optimized_nodes, optimized_ratio) = match optimize {
                Some(grid) => {
                    let p = optimize_nodes(d, grid)?;
                    (Some(join(p.nodes())), p.ratio())
                }
                None => (None, None),
            };
            Ok(VerifyRow {
                degree: d,
                nodes: join(e.partition.nodes()),
                recomputed_ratio: e.recomputed,
                published_ratio: e.published,
                claim: match e.claim {
                    RatioClaim::Exact => "exact",
                    RatioClaim::Approx => "approx",
                    RatioClaim::UpperBound => "upper-bound",
                }
                .to_string(),
                delta: e.recomputed - e.published,
                optimized_nodes,
                optimized_ratio,
            })
        })
        .collect()
}

pub fn write_csv(w: &mut dyn Write, rows: &[VerifyRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    if rows.is_empty() {
        out.write_record(HEADER.split(','))?;
    }
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
