//! Two-sample, two-dimensional Kolmogorov-Smirnov test (Fasano-Franceschini
//! variant of Peacock's test).
//!
//! Every point of either sample anchors four quadrants
//! (`x > X, y > Y`), (`x <= X, y > Y`), (`x <= X, y <= Y`), (`x > X, y <= Y`).
//! The statistic is the largest difference between the two samples' quadrant
//! fractions, computed separately with anchors from each sample and averaged.
//! The asymptotic p-value follows the Press-Teukolsky approximation, which
//! corrects the effective sample size by the samples' coordinate correlation.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clickset::ClickSet;
use crate::error::{Error, Result};

/// Samples whose p-value exceeds this are "not significantly different".
pub const KS_ALPHA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

impl KsResult {
    fn new(statistic: f64, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            statistic,
            p_value,
            pass: p_value > KS_ALPHA,
        }
    }
}

/// Cumulative count grid over pooled coordinate ranks.
struct QuadrantCounter {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // prefix[s][i * ny + j] = points of sample s with rank_x <= i and rank_y <= j
    prefix: [Vec<u32>; 2],
    sizes: [usize; 2],
}

fn unique_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn rank(sorted: &[f64], v: f64) -> usize {
    sorted.partition_point(|&s| s < v)
}

impl QuadrantCounter {
    fn new(a: &[(f64, f64)], b: &[(f64, f64)]) -> Self {
        let xs = unique_sorted(a.iter().chain(b).map(|p| p.0).collect());
        let ys = unique_sorted(a.iter().chain(b).map(|p| p.1).collect());
        let (nx, ny) = (xs.len(), ys.len());
        let build = |pts: &[(f64, f64)]| {
            let mut grid = vec![0u32; nx * ny];
            for &(x, y) in pts {
                grid[rank(&xs, x) * ny + rank(&ys, y)] += 1;
            }
            for i in 0..nx {
                for j in 0..ny {
                    let mut v = grid[i * ny + j];
                    if i > 0 {
                        v += grid[(i - 1) * ny + j];
                    }
                    if j > 0 {
                        v += grid[i * ny + j - 1];
                    }
                    if i > 0 && j > 0 {
                        v -= grid[(i - 1) * ny + j - 1];
                    }
                    grid[i * ny + j] = v;
                }
            }
            grid
        };
        let prefix = [build(a), build(b)];
        Self {
            xs,
            ys,
            prefix,
            sizes: [a.len(), b.len()],
        }
    }

    /// Quadrant fractions of sample `s` anchored at `(x, y)`, in the order
    /// upper-right, upper-left, lower-left, lower-right.
    fn fractions(&self, s: usize, (x, y): (f64, f64)) -> [f64; 4] {
        let ny = self.ys.len();
        let (i, j) = (rank(&self.xs, x), rank(&self.ys, y));
        let (li, lj) = (self.xs.len() - 1, ny - 1);
        let p = &self.prefix[s];
        let n = self.sizes[s] as i64;
        let ll = p[i * ny + j] as i64;
        let left = p[i * ny + lj] as i64;
        let low = p[li * ny + j] as i64;
        let ul = left - ll;
        let lr = low - ll;
        let ur = n - ll - ul - lr;
        let nf = n as f64;
        [
            ur as f64 / nf,
            ul as f64 / nf,
            ll as f64 / nf,
            lr as f64 / nf,
        ]
    }

    fn max_diff(&self, anchors: &[(f64, f64)]) -> f64 {
        anchors
            .iter()
            .map(|&p| {
                let fa = self.fractions(0, p);
                let fb = self.fractions(1, p);
                (0..4).map(|k| (fa[k] - fb[k]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn statistic(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let counter = QuadrantCounter::new(a, b);
    0.5 * (counter.max_diff(a) + counter.max_diff(b))
}

fn pearson(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.0 / n, sy + p.1 / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Complementary Kolmogorov distribution `Q(lambda)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    const EPS1: f64 = 1e-3;
    const EPS2: f64 = 1e-8;
    let a2 = -2.0 * lambda * lambda;
    let mut fac = 2.0;
    let mut sum = 0.0;
    let mut prev_term = 0.0f64;
    for j in 1..=100 {
        let jf = j as f64;
        let term = fac * (a2 * jf * jf).exp();
        sum += term;
        if term.abs() <= EPS1 * prev_term || term.abs() <= EPS2 * sum {
            return sum;
        }
        fac = -fac;
        prev_term = term.abs();
    }
    // the series only fails to converge for lambda -> 0
    1.0
}

fn check_sizes(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<()> {
    let smallest = a.len().min(b.len());
    if smallest < 3 {
        return Err(Error::InsufficientSample {
            needed: 3,
            got: smallest,
        });
    }
    Ok(())
}

/// Test statistic only, on raw coordinates.
pub fn ks2d_statistic(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    check_sizes(a, b)?;
    Ok(statistic(a, b))
}

/// Statistic with the asymptotic p-value.
pub fn ks2d(a: &ClickSet, b: &ClickSet) -> Result<KsResult> {
    let (pa, pb) = (a.normalized(), b.normalized());
    check_sizes(&pa, &pb)?;
    let d = statistic(&pa, &pb);
    let (n1, n2) = (pa.len() as f64, pb.len() as f64);
    let sqen = (n1 * n2 / (n1 + n2)).sqrt();
    let (r1, r2) = (pearson(&pa), pearson(&pb));
    let rr = (1.0 - 0.5 * (r1 * r1 + r2 * r2)).sqrt();
    let lambda = d * sqen / (1.0 + rr * (0.25 - 0.75 / sqen));
    Ok(KsResult::new(d, kolmogorov_q(lambda)))
}

/// Statistic with a permutation p-value over `n_permutations` relabelings of
/// the pooled sample; meant for small samples where the asymptotic formula is
/// unreliable.
pub fn ks2d_permutation(
    a: &ClickSet,
    b: &ClickSet,
    n_permutations: usize,
    rng: &mut impl Rng,
) -> Result<KsResult> {
    let (pa, pb) = (a.normalized(), b.normalized());
    check_sizes(&pa, &pb)?;
    let observed = statistic(&pa, &pb);
    let mut pooled: Vec<(f64, f64)> = pa.iter().chain(&pb).copied().collect();
    let n1 = pa.len();
    let mut extreme = 0usize;
    for _ in 0..n_permutations {
        pooled.shuffle(rng);
        let (x, y) = pooled.split_at(n1);
        if statistic(x, y) >= observed - 1e-12 {
            extreme += 1;
        }
    }
    let p = (1 + extreme) as f64 / (1 + n_permutations) as f64;
    Ok(KsResult::new(observed, p))
}
