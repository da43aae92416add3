//! Piecewise polynomial density estimation from statistically equivalent
//! blocks.
//!
//! Samples are sorted once; every interval the estimator touches is a block
//! of consecutive order statistics. Each block is fitted by a degree-`d`
//! polynomial that matches the empirical masses of a fixed set of node
//! cells, and a bottom-up merge over the dyadic tree of blocks decides which
//! neighbouring blocks share one polynomial.
//!
//! ```
//! use surf_core::{distributions::builtin, merge::{surf, SurfConfig}, samples::subsample};
//!
//! let spec = builtin("beta-f3").unwrap();
//! let raw = spec.sample(1023, 7).unwrap();
//! let s = subsample(&raw, 7).unwrap();
//! let est = surf(&s, &SurfConfig::new(1)).unwrap();
//! assert!(est.pieces().len() >= 1);
//! ```

pub mod distributions;
pub mod error;
pub mod interp;
pub mod linalg;
pub mod merge;
pub mod polynomial;
pub mod quadrature;
pub mod sample_file;
pub mod samples;

pub use error::{Result, SurfError};
