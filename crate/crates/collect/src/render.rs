//! Target presentations for the five display modes.

use std::fmt;
use std::str::FromStr;

use clickbench::imaging::{distance_transform, BinaryMask};
use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::CollectError;

/// Gray used behind cut-out objects.
pub const BACKGROUND_GRAY: Rgb<u8> = Rgb([128, 128, 128]);
pub const HIGHLIGHT_GREEN: Rgb<u8> = Rgb([0, 255, 0]);
/// Contour thickness of the highlight mode, in pixels.
pub const HIGHLIGHT_WIDTH: f64 = 2.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplayMode {
    Text,
    #[default]
    Cutout,
    ShiftedCutout,
    Silhouette,
    Highlight,
}

impl DisplayMode {
    pub const ALL: [DisplayMode; 5] = [
        DisplayMode::Text,
        DisplayMode::Cutout,
        DisplayMode::ShiftedCutout,
        DisplayMode::Silhouette,
        DisplayMode::Highlight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DisplayMode::Text => "text",
            DisplayMode::Cutout => "cutout",
            DisplayMode::ShiftedCutout => "shifted_cutout",
            DisplayMode::Silhouette => "silhouette",
            DisplayMode::Highlight => "highlight",
        }
    }
}

impl fmt::Display for DisplayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DisplayMode {
    type Err = CollectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DisplayMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| CollectError::BadRequest(format!("unknown display mode {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Image(RgbImage),
    Text(String),
}

/// Stand-in photograph for instances without an image file: light background,
/// darker object.
pub fn placeholder_image(mask: &BinaryMask) -> RgbImage {
    RgbImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        if mask.get(x as usize, y as usize) {
            Rgb([70, 90, 140])
        } else {
            Rgb([225, 225, 215])
        }
    })
}

fn cutout(image: &RgbImage, mask: &BinaryMask, (dx, dy): (usize, usize)) -> RgbImage {
    let mut out = RgbImage::from_pixel(image.width(), image.height(), BACKGROUND_GRAY);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                out.put_pixel(
                    (x - dx) as u32,
                    (y - dy) as u32,
                    *image.get_pixel(x as u32, y as u32),
                );
            }
        }
    }
    out
}

/// Renders how the target object is presented before the click.
pub fn render_target(
    image: &RgbImage,
    mask: &BinaryMask,
    mode: DisplayMode,
    description: Option<&str>,
) -> Result<Target, CollectError> {
    if (image.width() as usize, image.height() as usize) != mask.dims() {
        return Err(CollectError::Internal(format!(
            "image is {}x{} but mask is {}x{}",
            image.width(),
            image.height(),
            mask.width(),
            mask.height()
        )));
    }
    let img = match mode {
        DisplayMode::Text => {
            return description
                .map(|d| Target::Text(d.to_string()))
                .ok_or(CollectError::MissingDescription);
        }
        DisplayMode::Cutout => cutout(image, mask, (0, 0)),
        DisplayMode::ShiftedCutout => {
            let (x0, y0, _, _) = mask.bbox().unwrap_or((0, 0, 0, 0));
            cutout(image, mask, (x0, y0))
        }
        DisplayMode::Silhouette => RgbImage::from_fn(image.width(), image.height(), |x, y| {
            if mask.get(x as usize, y as usize) {
                Rgb([255, 255, 255])
            } else {
                Rgb([0, 0, 0])
            }
        }),
        DisplayMode::Highlight => {
            // inner band of the object: distance to the outside at most the width
            let dt = distance_transform(mask);
            let mut out = image.clone();
            for (x, y, px) in out.enumerate_pixels_mut() {
                let d = dt.get(x as usize, y as usize);
                if d > 0.0 && d <= HIGHLIGHT_WIDTH {
                    *px = HIGHLIGHT_GREEN;
                }
            }
            out
        }
    };
    Ok(Target::Image(img))
}
