//! Click-set comparisons and clickability-map scores.

mod clickset;
mod ks2d;
mod pl1;
mod saliency;
mod transport;

pub use clickset::{ClickSet, Frame};
pub use ks2d::{ks2d, ks2d_permutation, ks2d_statistic, KsResult, KS_ALPHA};
pub use pl1::pl1;
pub use saliency::{nss, pde};
pub use transport::{emd_uniform, wasserstein2d};
