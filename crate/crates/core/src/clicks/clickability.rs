use super::probmap::ProbabilityMap;
use super::Click;
use crate::error::{Error, Result};
use crate::imaging::{distance_transform, gaussian_blur, BinaryMask, ScalarField};

/// Click radius in the collection UI as a fraction of the image diagonal.
pub const DEFAULT_DIAG_FRACTION: f64 = 0.01;

/// Gaussian sigma (pixels) used to spread ground-truth clicks.
pub const DEFAULT_CM_SIGMA: f64 = 5.0;

/// Masks with less total mass than this are treated as empty.
const DEGENERATE_MASS: f64 = 1e-12;

pub fn click_radius(width: usize, height: usize, diag_fraction: f64) -> f64 {
    diag_fraction * ((width * width + height * height) as f64).sqrt()
}

/// An error mask blurred by the click radius, clamped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftErrorMask {
    pub field: ScalarField,
    pub click_radius: f64,
}

pub fn soft_error_mask(error: &BinaryMask, diag_fraction: f64) -> Result<SoftErrorMask> {
    if error.is_empty() {
        return Err(Error::NoErrorRegion);
    }
    if diag_fraction.is_nan() || diag_fraction <= 0.0 {
        return Err(Error::invalid(format!(
            "diag_fraction must be positive, got {diag_fraction}"
        )));
    }
    let radius = click_radius(error.width(), error.height(), diag_fraction);
    let mut field = gaussian_blur(&error.to_field(), radius)?;
    field
        .values_mut()
        .iter_mut()
        .for_each(|v| *v = v.clamp(0.0, 1.0));
    Ok(SoftErrorMask {
        field,
        click_radius: radius,
    })
}

/// Ground-truth clickability map: accumulate clicks, blur by `sigma`,
/// condition on the soft error mask and normalize.
pub fn build_clickability_map(
    clicks: &[Click],
    error: &BinaryMask,
    sigma: f64,
    diag_fraction: f64,
) -> Result<ProbabilityMap> {
    if clicks.is_empty() {
        return Err(Error::invalid("at least one click is required"));
    }
    let (w, h) = error.dims();
    let mut hits = vec![0.0; w * h];
    for c in clicks {
        if c.x >= w || c.y >= h {
            return Err(Error::invalid(format!(
                "click ({}, {}) outside {w}x{h} image",
                c.x, c.y
            )));
        }
        hits[c.y * w + c.x] += 1.0;
    }
    let density = gaussian_blur(&ScalarField::from_raw(w, h, hits), sigma)?;
    let soft = soft_error_mask(error, diag_fraction)?;
    let product: Vec<f64> = density
        .values()
        .iter()
        .zip(soft.field.values())
        .map(|(d, m)| d * m)
        .collect();
    let total: f64 = product.iter().sum();
    if total < DEGENERATE_MASS {
        return Err(Error::DegenerateMap(
            "clicks fall outside the soft error mask support".into(),
        ));
    }
    ProbabilityMap::from_weights(w, h, product)
}

/// Every error pixel equally likely.
pub fn uniform_model(error: &BinaryMask) -> Result<ProbabilityMap> {
    if error.is_empty() {
        return Err(Error::NoErrorRegion);
    }
    let p = 1.0 / error.count() as f64;
    let probs = error
        .bits()
        .iter()
        .map(|&b| if b { p } else { 0.0 })
        .collect();
    ProbabilityMap::from_weights(error.width(), error.height(), probs)
}

/// Probability proportional to the distance from the region boundary.
pub fn dt_model(error: &BinaryMask) -> Result<ProbabilityMap> {
    if error.is_empty() {
        return Err(Error::NoErrorRegion);
    }
    ProbabilityMap::from_field(&distance_transform(error))
}
