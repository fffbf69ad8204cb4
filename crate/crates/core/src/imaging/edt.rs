//! Exact Euclidean distance transform.
//!
//! Two separable passes of the lower-envelope-of-parabolas transform over
//! squared integer distances. Parabola intersections are compared as exact
//! rationals, so the result equals a brute-force nearest-feature search
//! bit for bit (both end in `sqrt` of the same integer).

use super::mask::{BinaryMask, ScalarField};

const INF: i64 = i64::MAX;

/// Boundary of an envelope segment, `num / den` with `den > 0`.
#[derive(Clone, Copy, Debug)]
enum Bound {
    NegInf,
    At(i128, i128),
    PosInf,
}

impl Bound {
    /// `self < q` for an integer `q`.
    fn lt_int(self, q: i128) -> bool {
        match self {
            Bound::NegInf => true,
            Bound::At(n, d) => n < q * d,
            Bound::PosInf => false,
        }
    }

    /// `n / d <= self`.
    fn ge_ratio(self, n: i128, d: i128) -> bool {
        match self {
            Bound::NegInf => false,
            Bound::At(zn, zd) => n * zd <= zn * d,
            Bound::PosInf => true,
        }
    }
}

/// In-place 1D squared-distance transform of `f` (entries equal to `INF`
/// carry no feature). `v` and `z` are scratch buffers.
fn transform_1d(f: &[i64], out: &mut [i64], v: &mut Vec<usize>, z: &mut Vec<Bound>) {
    v.clear();
    z.clear();
    let n = f.len();
    let Some(first) = f.iter().position(|&x| x != INF) else {
        out.fill(INF);
        return;
    };
    v.push(first);
    z.push(Bound::NegInf);
    z.push(Bound::PosInf);

    for q in first + 1..n {
        if f[q] == INF {
            continue;
        }
        let qi = q as i128;
        let lhs_q = f[q] as i128 + qi * qi;
        loop {
            let k = v.len() - 1;
            let p = v[k] as i128;
            let num = lhs_q - (f[v[k]] as i128 + p * p);
            let den = 2 * (qi - p);
            if z[k].ge_ratio(num, den) {
                v.pop();
                z.pop();
                // z[k] becomes the new open upper bound
                *z.last_mut().unwrap() = Bound::PosInf;
            } else {
                *z.last_mut().unwrap() = Bound::At(num, den);
                v.push(q);
                z.push(Bound::PosInf);
                break;
            }
        }
    }

    let mut k = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while z[k + 1].lt_int(q as i128) {
            k += 1;
        }
        let d = q as i64 - v[k] as i64;
        *slot = d * d + f[v[k]];
    }
}

fn squared_edt(features: &[bool], width: usize, height: usize) -> Vec<i64> {
    let mut grid: Vec<i64> = features.iter().map(|&f| if f { 0 } else { INF }).collect();
    let mut v = Vec::new();
    let mut z = Vec::new();

    // columns
    let mut col = vec![0i64; height];
    let mut col_out = vec![0i64; height];
    for x in 0..width {
        for y in 0..height {
            col[y] = grid[y * width + x];
        }
        transform_1d(&col, &mut col_out, &mut v, &mut z);
        for y in 0..height {
            grid[y * width + x] = col_out[y];
        }
    }

    // rows
    let mut row_out = vec![0i64; width];
    for y in 0..height {
        let row = &grid[y * width..(y + 1) * width];
        transform_1d(row, &mut row_out, &mut v, &mut z);
        grid[y * width..(y + 1) * width].copy_from_slice(&row_out);
    }
    grid
}

/// Exact Euclidean distance from every pixel to the nearest pixel where the
/// mask is false.
///
/// The image is surrounded by a virtual ring of false pixels, so a mask that
/// is true everywhere still has a finite "center": a 1x1 true mask yields 1.
pub fn distance_transform(mask: &BinaryMask) -> ScalarField {
    let (w, h) = mask.dims();
    let (pw, ph) = (w + 2, h + 2);
    let mut features = vec![true; pw * ph];
    for y in 0..h {
        for x in 0..w {
            features[(y + 1) * pw + x + 1] = !mask.get(x, y);
        }
    }
    let sq = squared_edt(&features, pw, ph);
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            values.push((sq[(y + 1) * pw + x + 1] as f64).sqrt());
        }
    }
    ScalarField::from_raw(w, h, values)
}

/// Squared distance from every pixel to the nearest true pixel of `features`
/// (no border convention); `None` when the mask is empty.
pub fn squared_distance_to_nearest(features: &BinaryMask) -> Option<Vec<u64>> {
    if features.is_empty() {
        return None;
    }
    let sq = squared_edt(features.bits(), features.width(), features.height());
    Some(sq.into_iter().map(|d| d as u64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(mask: &BinaryMask) -> Vec<f64> {
        let (w, h) = mask.dims();
        let (w, h) = (w as i64, h as i64);
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if !mask.get(x as usize, y as usize) {
                    out.push(0.0);
                    continue;
                }
                let mut best = i64::MAX;
                for yy in -1..=h {
                    for xx in -1..=w {
                        let outside = xx < 0 || yy < 0 || xx >= w || yy >= h;
                        if outside || !mask.get(xx as usize, yy as usize) {
                            best = best.min((x - xx).pow(2) + (y - yy).pow(2));
                        }
                    }
                }
                out.push((best as f64).sqrt());
            }
        }
        out
    }

    #[test]
    fn empty_mask_is_all_zero() {
        let dt = distance_transform(&BinaryMask::new(7, 5));
        assert!(dt.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_true_pixel_sees_border_ring() {
        let dt = distance_transform(&BinaryMask::full(1, 1));
        assert_eq!(dt.values(), &[1.0]);
    }

    #[test]
    fn matches_brute_force_on_sparse_and_dense_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for density in [0.05, 0.5, 0.97] {
            for _ in 0..4 {
                let w = rng.random_range(1..24);
                let h = rng.random_range(1..24);
                let mask = BinaryMask::from_fn(w, h, |_, _| rng.random_bool(density));
                assert_eq!(
                    distance_transform(&mask).values(),
                    brute_force(&mask).as_slice()
                );
            }
        }
    }

    #[test]
    fn nearest_feature_without_border() {
        let mut m = BinaryMask::new(5, 1);
        m.set(0, 0, true);
        let sq = squared_distance_to_nearest(&m).unwrap();
        assert_eq!(sq, vec![0, 1, 4, 9, 16]);
        assert!(squared_distance_to_nearest(&BinaryMask::new(3, 3)).is_none());
    }
}
