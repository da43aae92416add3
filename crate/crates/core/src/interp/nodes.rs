use std::sync::OnceLock;

use crate::error::{Result, SurfError};
use crate::linalg;

use super::ratio::ratio_sup;

/// Largest degree with a stored node partition.
pub const MAX_FIT_DEGREE: usize = 8;

/// Breakpoints `0 = n_0 <= n_1 <= ... <= n_{d+1} = 1` of the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePartition {
    nodes: Vec<f64>,
    ratio: Option<f64>,
}

impl NodePartition {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(SurfError::DegeneratePartition(
                "need at least the two endpoints".into(),
            ));
        }
        if nodes[0] != 0.0 || nodes[nodes.len() - 1] != 1.0 {
            return Err(SurfError::DegeneratePartition(
                "endpoints must be exactly 0 and 1".into(),
            ));
        }
        if nodes.iter().any(|v| !v.is_finite()) || nodes.windows(2).any(|w| w[0] > w[1]) {
            return Err(SurfError::DegeneratePartition(format!(
                "nodes {nodes:?} are not nondecreasing"
            )));
        }
        Ok(Self { nodes, ratio: None })
    }

    /// Interior nodes `m_1 < ... < m_k < 1/2` mirrored about one half; a
    /// middle node at 1/2 is inserted when `d` is odd.
    pub fn symmetric(d: usize, half: &[f64]) -> Result<Self> {
        if half.len() != d / 2 {
            return Err(SurfError::DegeneratePartition(format!(
                "degree {d} needs {} free nodes, got {}",
                d / 2,
                half.len()
            )));
        }
        let mut nodes = Vec::with_capacity(d + 2);
        nodes.push(0.0);
        nodes.extend_from_slice(half);
        if d % 2 == 1 {
            nodes.push(0.5);
        }
        nodes.extend(half.iter().rev().map(|m| 1.0 - m));
        nodes.push(1.0);
        Self::new(nodes)
    }

    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.ratio = Some(ratio);
        self
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn ratio(&self) -> Option<f64> {
        self.ratio
    }

    pub fn is_strict(&self) -> bool {
        self.nodes.windows(2).all(|w| w[0] < w[1])
    }

    pub(crate) fn require_strict(&self) -> Result<()> {
        if self.is_strict() {
            Ok(())
        } else {
            Err(SurfError::DegeneratePartition(format!(
                "nodes {:?} contain an empty cell",
                self.nodes
            )))
        }
    }

    /// Row-major `(d+1) x (d+1)` matrix of `∫_{J_i} x^j`.
    pub fn moment_matrix(&self) -> Vec<f64> {
        let k = self.nodes.len() - 1;
        let mut m = vec![0.0; k * k];
        for i in 0..k {
            let (a, b) = (self.nodes[i], self.nodes[i + 1]);
            let (mut pa, mut pb) = (a, b);
            for j in 0..k {
                m[i * k + j] = (pb - pa) / (j + 1) as f64;
                pa *= a;
                pb *= b;
            }
        }
        m
    }
}

/// How the published ratio for a row is stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioClaim {
    Exact,
    Approx,
    UpperBound,
}

/// One row of the table: nodes, the published ratio, the ratio recomputed
/// from the nodes, and the inverse moment matrix used by every fit.
#[derive(Debug, Clone)]
pub struct NodeEntry {
    pub partition: NodePartition,
    pub published: f64,
    pub claim: RatioClaim,
    pub recomputed: f64,
    pub(crate) inverse: Vec<f64>,
}

#[derive(Debug)]
pub struct NodeTable {
    entries: Vec<NodeEntry>,
}

const ROWS: [(&[f64], f64, RatioClaim); MAX_FIT_DEGREE + 1] = [
    (&[0.0, 1.0], 1.0, RatioClaim::Exact),
    (&[0.0, 0.5, 1.0], 1.25, RatioClaim::Exact),
    (&[0.0, 0.2599, 0.7401, 1.0], 1.423, RatioClaim::Approx),
    (&[0.0, 0.1548, 0.5, 0.8452, 1.0], 1.559, RatioClaim::Approx),
    (
        &[0.0, 0.1015, 0.348, 0.652, 0.8985, 1.0],
        1.675,
        RatioClaim::UpperBound,
    ),
    (
        &[0.0, 0.071, 0.254, 0.5, 0.746, 0.929, 1.0],
        1.774,
        RatioClaim::UpperBound,
    ),
    (
        &[0.0, 0.053, 0.192, 0.390, 0.610, 0.808, 0.947, 1.0],
        1.857,
        RatioClaim::UpperBound,
    ),
    (
        &[0.0, 0.0405, 0.149, 0.310, 0.5, 0.690, 0.851, 0.9595, 1.0],
        1.930,
        RatioClaim::UpperBound,
    ),
    (
        &[
            0.0, 0.032, 0.119, 0.252, 0.414, 0.586, 0.749, 0.881, 0.968, 1.0,
        ],
        1.999,
        RatioClaim::UpperBound,
    ),
];

impl NodeTable {
    /// The shared read-only table for degrees `0..=8`.
    pub fn get() -> &'static NodeTable {
        static TABLE: OnceLock<NodeTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            let entries = ROWS
                .iter()
                .map(|&(nodes, published, claim)| {
                    let partition =
                        NodePartition::new(nodes.to_vec()).expect("stored nodes are valid");
                    let recomputed = ratio_sup(&partition).expect("stored nodes are strict");
                    let k = nodes.len() - 1;
                    let inverse = linalg::invert(&partition.moment_matrix(), k)
                        .expect("stored nodes give an invertible system");
                    NodeEntry {
                        partition: partition.with_ratio(recomputed),
                        published,
                        claim,
                        recomputed,
                        inverse,
                    }
                })
                .collect();
            NodeTable { entries }
        })
    }

    pub fn entry(&self, d: usize) -> Result<&NodeEntry> {
        self.entries.get(d).ok_or(SurfError::DegreeTooLarge {
            degree: d,
            max: MAX_FIT_DEGREE,
        })
    }

    pub fn entries(&self) -> &[NodeEntry] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(NodePartition::new(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(NodePartition::new(vec![0.1, 1.0]).is_err());
        assert!(NodePartition::new(vec![0.0, 0.6, 0.4, 1.0]).is_err());
        let dup = NodePartition::new(vec![0.0, 0.5, 0.5, 1.0]).unwrap();
        assert!(!dup.is_strict());
    }

    #[test]
    fn symmetric_layout() {
        let p = NodePartition::symmetric(3, &[0.1548]).unwrap();
        assert_eq!(p.nodes(), &[0.0, 0.1548, 0.5, 1.0 - 0.1548, 1.0]);
        let p = NodePartition::symmetric(2, &[0.2599]).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.nodes()[2], 1.0 - 0.2599);
    }

    #[test]
    fn table_rows_are_symmetric() {
        for e in NodeTable::get().entries() {
            let n = e.partition.nodes();
            for (a, b) in n.iter().zip(n.iter().rev()) {
                // printed to three or four digits
                assert!((a + b - 1.0).abs() <= 1e-3 + 1e-12, "{n:?}");
            }
        }
        assert!(NodeTable::get().entry(9).is_err());
    }
}
