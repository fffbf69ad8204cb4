use super::records::ClickRecord;
use crate::clicks::click_radius;
use crate::error::{Error, Result};
use crate::imaging::{squared_distance_to_nearest, BinaryMask};

/// Clicks per collection batch.
pub const BATCH_SIZE: usize = 10;
/// Valid clicks a batch needs to be kept.
pub const MIN_VALID_PER_BATCH: usize = 7;

/// Maps `(x, y)` from a `w` x `h` frame to the nearest pixel of a
/// `width` x `height` grid (pixel centers aligned).
pub fn rescale_point(
    x: u32,
    y: u32,
    (w, h): (u32, u32),
    (width, height): (usize, usize),
) -> (usize, usize) {
    let map = |v: u32, from: u32, to: usize| {
        if from as usize == to {
            return v as usize;
        }
        let scaled = ((v as f64 + 0.5) * to as f64 / from as f64).floor() as usize;
        scaled.min(to - 1)
    };
    (map(x, w, width), map(y, h, height))
}

/// Checks clicks against one object mask: a click is valid when it lies on
/// the mask or within one click radius of it (inclusive).
pub struct ClickValidator {
    width: usize,
    height: usize,
    radius_sq: f64,
    /// `None` for an empty mask, which accepts nothing.
    dist_sq: Option<Vec<u64>>,
}

impl ClickValidator {
    pub fn new(mask: &BinaryMask, diag_fraction: f64) -> Self {
        let r = click_radius(mask.width(), mask.height(), diag_fraction);
        Self {
            width: mask.width(),
            height: mask.height(),
            radius_sq: r * r,
            dist_sq: squared_distance_to_nearest(mask),
        }
    }

    /// `(x, y)` in mask coordinates.
    pub fn is_valid_at(&self, x: usize, y: usize) -> bool {
        if x >= self.width || y >= self.height {
            return false;
        }
        self.dist_sq
            .as_ref()
            .is_some_and(|d| d[y * self.width + x] as f64 <= self.radius_sq)
    }

    pub fn is_valid(&self, record: &ClickRecord) -> bool {
        let (x, y) = rescale_point(
            record.x,
            record.y,
            (record.w, record.h),
            (self.width, self.height),
        );
        self.is_valid_at(x, y)
    }
}

pub fn validate_click(record: &ClickRecord, mask: &BinaryMask, diag_fraction: f64) -> bool {
    ClickValidator::new(mask, diag_fraction).is_valid(record)
}

/// A batch counts when at least 7 of its 10 clicks are valid.
pub fn validate_batch(valid: &[bool]) -> Result<bool> {
    if valid.len() != BATCH_SIZE {
        return Err(Error::invalid(format!(
            "a batch has {BATCH_SIZE} clicks, got {}",
            valid.len()
        )));
    }
    Ok(valid.iter().filter(|&&v| v).count() >= MIN_VALID_PER_BATCH)
}
