use std::fs;
use std::path::Path;

use image::ImageReader;

use crate::error::{Error, Result};
use crate::imaging::ScalarField;

/// Per-pixel click probability, non-negative and summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMap {
    width: usize,
    height: usize,
    probs: Vec<f64>,
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

impl ProbabilityMap {
    /// Normalizes non-negative weights to a distribution.
    pub fn from_weights(width: usize, height: usize, mut weights: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || weights.len() != width * height {
            return Err(Error::invalid(format!(
                "map of {width}x{height} cannot hold {} values",
                weights.len()
            )));
        }
        if let Some(v) = weights.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(format!("negative or non-finite weight {v}")));
        }
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateMap("all weights are zero".into()));
        }
        // leave already-normalized inputs untouched
        if (total - 1.0).abs() > 1e-12 {
            weights.iter_mut().for_each(|w| *w /= total);
        }
        Ok(Self {
            width,
            height,
            probs: weights,
        })
    }

    pub fn from_field(field: &ScalarField) -> Result<Self> {
        Self::from_weights(field.width(), field.height(), field.values().to_vec())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[y * self.width + x]
    }

    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    /// Bilinear resampling (pixel-center aligned) followed by renormalization.
    pub fn resample(&self, width: usize, height: usize) -> Result<Self> {
        if (width, height) == self.dims() {
            return Ok(self.clone());
        }
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let mut out = Vec::with_capacity(width * height);
        for y in 0..height {
            let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (self.height - 1) as f64);
            let y0 = fy.floor() as usize;
            let y1 = (y0 + 1).min(self.height - 1);
            let ty = fy - y0 as f64;
            for x in 0..width {
                let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (self.width - 1) as f64);
                let x0 = fx.floor() as usize;
                let x1 = (x0 + 1).min(self.width - 1);
                let tx = fx - x0 as f64;
                let top = self.get(x0, y0) * (1.0 - tx) + self.get(x1, y0) * tx;
                let bottom = self.get(x0, y1) * (1.0 - tx) + self.get(x1, y1) * tx;
                out.push(top * (1.0 - ty) + bottom * ty);
            }
        }
        Self::from_weights(width, height, out)
    }
}

/// Reads a map from a 16-bit (or 8-bit) grayscale PNG, or from the raw format:
/// `u32` height, `u32` width (little endian), then `height * width` `f64`
/// little-endian values in row-major order. The result is resampled to
/// `target_dims` (width, height) when given and renormalized.
pub fn load_probability_map(
    path: impl AsRef<Path>,
    target_dims: Option<(usize, usize)>,
) -> Result<ProbabilityMap> {
    let path = path.as_ref();
    let location = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| Error::format(&location, e.to_string()))?;
    let to_format = |e: Error| match e {
        Error::InvalidParameter(m) | Error::DegenerateMap(m) => Error::format(&location, m),
        other => other,
    };

    let map = if bytes.starts_with(PNG_MAGIC) {
        let img = ImageReader::new(std::io::Cursor::new(&bytes))
            .with_guessed_format()
            .map_err(|e| Error::format(&location, e.to_string()))?
            .decode()
            .map_err(|e| Error::format(&location, e.to_string()))?
            .into_luma16();
        let (w, h) = img.dimensions();
        let values = img.pixels().map(|p| p.0[0] as f64).collect();
        ProbabilityMap::from_weights(w as usize, h as usize, values).map_err(to_format)?
    } else {
        if bytes.len() < 8 {
            return Err(Error::format(&location, "truncated header"));
        }
        let height = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let body = &bytes[8..];
        if body.len() != width * height * 8 {
            return Err(Error::format(
                &location,
                format!(
                    "expected {} bytes of values for {width}x{height}, found {}",
                    width * height * 8,
                    body.len()
                ),
            ));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        ProbabilityMap::from_weights(width, height, values).map_err(to_format)?
    };

    match target_dims {
        Some((w, h)) if (w, h) != map.dims() => map.resample(w, h).map_err(to_format),
        _ => Ok(map),
    }
}

/// Writes the raw binary format read by [`load_probability_map`].
pub fn save_probability_map(map: &ProbabilityMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(8 + map.probs.len() * 8);
    bytes.extend_from_slice(&(map.height as u32).to_le_bytes());
    bytes.extend_from_slice(&(map.width as u32).to_le_bytes());
    for p in &map.probs {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{ImageBuffer, Luma};

    #[test]
    fn binary_roundtrip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        let map = ProbabilityMap::from_weights(3, 2, vec![1.0, 2.0, 3.0, 0.0, 0.5, 0.25]).unwrap();
        save_probability_map(&map, &p).unwrap();
        assert_eq!(load_probability_map(&p, None).unwrap(), map);
        assert_eq!(load_probability_map(&p, Some((3, 2))).unwrap(), map);
    }

    #[test]
    fn unnormalized_constant_becomes_uniform() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.png");
        let img: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_pixel(4, 5, Luma([7000]));
        img.save(&p).unwrap();
        let map = load_probability_map(&p, None).unwrap();
        assert_eq!(map.dims(), (4, 5));
        assert!(map.probs().iter().all(|&v| (v - 0.05).abs() < 1e-15));
    }

    #[test]
    fn downscaled_uniform_stays_uniform() {
        let map = ProbabilityMap::from_weights(8, 6, vec![1.0; 48]).unwrap();
        let small = map.resample(4, 3).unwrap();
        assert!(small.probs().iter().all(|&v| (v - 1.0 / 12.0).abs() < 1e-9));
    }

    #[test]
    fn bilinear_matches_hand_interpolation() {
        // 2x1 -> 4x1: sample centers map to -0.25, 0.25, 0.75, 1.25 -> clamped
        let map = ProbabilityMap::from_weights(2, 1, vec![0.25, 0.75]).unwrap();
        let up = map.resample(4, 1).unwrap();
        let raw = [
            0.25,
            0.25 * 0.75 + 0.75 * 0.25,
            0.25 * 0.25 + 0.75 * 0.75,
            0.75,
        ];
        let s: f64 = raw.iter().sum();
        for (a, b) in up.probs().iter().zip(raw.iter()) {
            assert!((a - b / s).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.bin");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&1u32.to_le_bytes());
        bytes.extend_from_slice(&2u32.to_le_bytes());
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
        bytes.extend_from_slice(&(-1.0f64).to_le_bytes());
        std::fs::write(&p, &bytes).unwrap();
        assert!(matches!(
            load_probability_map(&p, None),
            Err(Error::Format { .. })
        ));

        let zero = dir.path().join("zero.bin");
        bytes.truncate(8);
        bytes.extend_from_slice(&0.0f64.to_le_bytes());
        bytes.extend_from_slice(&0.0f64.to_le_bytes());
        std::fs::write(&zero, &bytes).unwrap();
        assert!(matches!(
            load_probability_map(&zero, None),
            Err(Error::Format { .. })
        ));

        let short = dir.path().join("short.bin");
        std::fs::write(&short, [0u8; 3]).unwrap();
        assert!(matches!(
            load_probability_map(&short, None),
            Err(Error::Format { .. })
        ));

        assert!(matches!(
            load_probability_map(dir.path().join("missing.bin"), None),
            Err(Error::Format { .. })
        ));
    }
}
