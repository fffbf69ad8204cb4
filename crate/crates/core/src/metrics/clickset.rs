use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

/// Object bounding box used to normalize click coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn new(x0: f64, y0: f64, width: f64, height: f64) -> Result<Self> {
        if !(width >= 1.0 && height >= 1.0) {
            return Err(Error::invalid(format!(
                "frame size must be at least 1x1, got {width}x{height}"
            )));
        }
        Ok(Self {
            x0,
            y0,
            width,
            height,
        })
    }

    /// Bounding box of the mask's true pixels (inclusive, so a single pixel is 1x1).
    pub fn of_mask(mask: &BinaryMask) -> Result<Self> {
        let (x0, y0, x1, y1) = mask.bbox().ok_or(Error::NoErrorRegion)?;
        Self::new(
            x0 as f64,
            y0 as f64,
            (x1 - x0 + 1) as f64,
            (y1 - y0 + 1) as f64,
        )
    }

    pub fn normalize(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.x0) / self.width, (y - self.y0) / self.height)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClickSet {
    pub points: Vec<(f64, f64)>,
    pub frame: Frame,
}

impl ClickSet {
    pub fn new(points: Vec<(f64, f64)>, frame: Frame) -> Self {
        Self { points, frame }
    }

    pub fn from_pixels(pixels: &[(usize, usize)], frame: Frame) -> Self {
        Self::new(
            pixels.iter().map(|&(x, y)| (x as f64, y as f64)).collect(),
            frame,
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn normalized(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|&p| self.frame.normalize(p))
            .collect()
    }
}

pub(crate) fn check_pair(a: &ClickSet, b: &ClickSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("click sets must be non-empty"));
    }
    if a.frame != b.frame {
        return Err(Error::invalid(
            "click sets must share a normalization frame",
        ));
    }
    Ok(())
}
