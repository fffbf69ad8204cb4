use super::mask::ScalarField;
use crate::error::{Error, Result};

/// Discrete Gaussian weights over `[-r, r]` with `r = ceil(3 sigma)`,
/// normalized to sum to one.
pub fn gaussian_kernel(sigma: f64) -> Result<Vec<f64>> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / denom).exp())
        .collect();
    let total: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= total);
    Ok(k)
}

/// Separable Gaussian blur with zero padding: mass that falls outside the
/// image is dropped, callers renormalize if they need to.
pub fn gaussian_blur(field: &ScalarField, sigma: f64) -> Result<ScalarField> {
    let kernel = gaussian_kernel(sigma)?;
    let r = (kernel.len() / 2) as isize;
    let (w, h) = field.dims();
    let src = field.values();

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, &kw) in kernel.iter().enumerate() {
                let sx = x as isize + ki as isize - r;
                if sx >= 0 && (sx as usize) < w {
                    acc += kw * row[sx as usize];
                }
            }
            tmp[y * w + x] = acc;
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (ki, &kw) in kernel.iter().enumerate() {
                let sy = y as isize + ki as isize - r;
                if sy >= 0 && (sy as usize) < h {
                    acc += kw * tmp[sy as usize * w + x];
                }
            }
            // rounding can leave tiny negatives only if inputs were negative; clamp anyway
            out[y * w + x] = acc.max(0.0);
        }
    }
    Ok(ScalarField::from_raw(w, h, out))
}
