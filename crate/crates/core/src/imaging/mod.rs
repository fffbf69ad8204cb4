//! Pixel-level primitives shared by every other module.

mod blur;
mod components;
mod edt;
mod mask;
mod png;
mod rle;

pub use blur::{gaussian_blur, gaussian_kernel};
pub use components::{connected_components, Connectivity, LabeledRegions};
pub use edt::{distance_transform, squared_distance_to_nearest};
pub use mask::{error_regions, iou, BinaryMask, ScalarField};
pub use png::{load_mask_png, save_mask_png};
pub use rle::{rle_decode, rle_encode};
