//! Click simulation and robustness benchmarking for interactive image
//! segmentation.
//!
//! The crate is organised bottom-up:
//!
//! - [`imaging`]: binary masks, exact Euclidean distance transform, Gaussian
//!   blur, connected components, IoU and RLE.
//! - [`clicks`]: the baseline "center of the largest error" click, the
//!   uniform / distance-transform clickability models, ground-truth
//!   clickability maps built from real clicks, decile clicking groups and
//!   weighted sampling.
//! - [`metrics`]: click-set comparisons (PL1, exact 2D Wasserstein, 2D
//!   Kolmogorov-Smirnov) and map-vs-clicks scores (NSS, PDE).
//! - [`harness`]: multi-round evaluation of a segmenter under a click
//!   strategy, aggregate robustness statistics and the newline-delimited
//!   JSON segmenter adapter protocol.
//! - [`dataset`]: the released click CSV schema, click/batch validity and
//!   instance manifests.

pub mod clicks;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod imaging;
pub mod metrics;

pub use error::{Error, Result};
