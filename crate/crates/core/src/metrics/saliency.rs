//! Scores of a clickability map against observed clicks.

use crate::clicks::ProbabilityMap;
use crate::error::{Error, Result};

fn check_clicks(map: &ProbabilityMap, clicks: &[(usize, usize)]) -> Result<()> {
    if clicks.is_empty() {
        return Err(Error::invalid("no clicks to score"));
    }
    let (w, h) = map.dims();
    if let Some(&(x, y)) = clicks.iter().find(|&&(x, y)| x >= w || y >= h) {
        return Err(Error::invalid(format!(
            "click ({x}, {y}) outside {w}x{h} map"
        )));
    }
    Ok(())
}

/// Normalized scanpath saliency: mean of the z-scored map (population std
/// over all pixels) at the clicked pixels. A constant map scores 0.
pub fn nss(map: &ProbabilityMap, clicks: &[(usize, usize)]) -> Result<f64> {
    check_clicks(map, clicks)?;
    let probs = map.probs();
    let n = probs.len() as f64;
    let mean = probs.iter().sum::<f64>() / n;
    let var = probs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 {
        return Ok(0.0);
    }
    let total: f64 = clicks
        .iter()
        .map(|&(x, y)| (map.get(x, y) - mean) / std)
        .sum();
    Ok(total / clicks.len() as f64)
}

/// Mean per-pixel probability at the clicked pixels.
pub fn pde(map: &ProbabilityMap, clicks: &[(usize, usize)]) -> Result<f64> {
    check_clicks(map, clicks)?;
    Ok(clicks.iter().map(|&(x, y)| map.get(x, y)).sum::<f64>() / clicks.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clicks::uniform_model;
    use crate::imaging::BinaryMask;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_map_scores_zero() {
        let map = ProbabilityMap::from_weights(4, 4, vec![1.0; 16]).unwrap();
        assert_eq!(nss(&map, &[(0, 0), (3, 2)]).unwrap(), 0.0);
    }

    #[test]
    fn single_peak_hand_value() {
        let mut w = vec![0.0; 9];
        w[4] = 1.0;
        let map = ProbabilityMap::from_weights(3, 3, w).unwrap();
        let std = (1.0f64 / 9.0 - 1.0 / 81.0).sqrt();
        let expected = (1.0 - 1.0 / 9.0) / std;
        let got = nss(&map, &[(1, 1)]).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 2.8284271247).abs() < 1e-9);
    }

    #[test]
    fn top_pixels_maximize_nss() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w: Vec<f64> = (0..36).map(|_| rng.random::<f64>()).collect();
        let map = ProbabilityMap::from_weights(6, 6, w).unwrap();
        let mut order: Vec<usize> = (0..36).collect();
        order.sort_by(|&a, &b| map.probs()[b].total_cmp(&map.probs()[a]));
        let top: Vec<_> = order[..3].iter().map(|&i| (i % 6, i / 6)).collect();
        let best = nss(&map, &top).unwrap();
        for _ in 0..200 {
            let other: Vec<_> = (0..3)
                .map(|_| (rng.random_range(0..6), rng.random_range(0..6)))
                .collect();
            assert!(nss(&map, &other).unwrap() <= best + 1e-12);
        }
    }

    #[test]
    fn nss_ignores_affine_rescaling() {
        let w = vec![1.0, 2.0, 5.0, 0.5, 0.0, 3.0];
        let scaled: Vec<f64> = w.iter().map(|v| 4.0 * v + 0.7).collect();
        let a = ProbabilityMap::from_weights(3, 2, w).unwrap();
        let b = ProbabilityMap::from_weights(3, 2, scaled).unwrap();
        let clicks = [(2, 0), (1, 1)];
        assert!((nss(&a, &clicks).unwrap() - nss(&b, &clicks).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn pde_of_uniform_model() {
        let e = BinaryMask::from_fn(10, 10, |x, y| x < 5 && y < 4);
        let map = uniform_model(&e).unwrap();
        assert!((pde(&map, &[(1, 1), (4, 3)]).unwrap() - 1.0 / 20.0).abs() < 1e-15);
        assert_eq!(pde(&map, &[(9, 9)]).unwrap(), 0.0);
    }

    #[test]
    fn out_of_bounds() {
        let map = ProbabilityMap::from_weights(2, 2, vec![1.0; 4]).unwrap();
        assert!(nss(&map, &[(2, 0)]).is_err());
        assert!(pde(&map, &[]).is_err());
    }
}
