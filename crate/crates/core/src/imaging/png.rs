use std::path::Path;

use image::{GrayImage, ImageReader, Luma};

use super::mask::BinaryMask;
use crate::error::{Error, Result};

/// Loads a mask from any grayscale-convertible image; nonzero pixels are true.
pub fn load_mask_png(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let img = ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .decode()
        .map_err(|e| Error::format(path.display().to_string(), e.to_string()))?
        .into_luma16();
    let (w, h) = img.dimensions();
    BinaryMask::from_bits(
        w as usize,
        h as usize,
        img.pixels().map(|p| p.0[0] != 0).collect(),
    )
}

/// Writes a single-channel 8-bit PNG with 0 for false and 255 for true.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut img = GrayImage::new(mask.width() as u32, mask.height() as u32);
    for (i, px) in img.pixels_mut().enumerate() {
        *px = Luma([if mask.bits()[i] { 255 } else { 0 }]);
    }
    img.save(path)
        .map_err(|e| Error::format(path.display().to_string(), e.to_string()))
}
