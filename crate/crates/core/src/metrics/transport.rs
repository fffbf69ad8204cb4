//! Exact earth mover's distance between two uniform point clouds.
//!
//! Point `i` of the first cloud supplies `m` units and point `j` of the second
//! demands `n` units (n, m = cloud sizes), which keeps every flow integral.
//! The transportation problem is solved by successive shortest paths with
//! Johnson potentials on the dense bipartite residual graph.

use super::clickset::{check_pair, ClickSet};
use crate::error::Result;

fn euclid(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

/// 1-Wasserstein distance between uniform distributions on `a` and `b`.
pub fn emd_uniform(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (n, m) = (a.len(), b.len());
    assert!(n > 0 && m > 0, "point clouds must be non-empty");
    let cost: Vec<f64> = a
        .iter()
        .flat_map(|&p| b.iter().map(move |&q| euclid(p, q)))
        .collect();
    let c = |i: usize, j: usize| cost[i * m + j];

    let mut supply = vec![m as i64; n];
    let mut demand = vec![n as i64; m];
    let mut flow = vec![0i64; n * m];
    // potentials: sources 0..n, sinks n..n+m
    let mut pot = vec![0.0f64; n + m];
    let mut dist = vec![f64::INFINITY; n + m];
    let mut prev = vec![usize::MAX; n + m];
    let mut done = vec![false; n + m];
    let mut remaining = (n * m) as i64;

    while remaining > 0 {
        dist.fill(f64::INFINITY);
        prev.fill(usize::MAX);
        done.fill(false);
        for i in 0..n {
            if supply[i] > 0 {
                dist[i] = 0.0;
            }
        }

        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..n + m {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                for j in 0..m {
                    let v = n + j;
                    if done[v] {
                        continue;
                    }
                    let nd = best + (c(u, j) + pot[u] - pot[v]).max(0.0);
                    if nd < dist[v] {
                        dist[v] = nd;
                        prev[v] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if done[i] || flow[i * m + j] == 0 {
                        continue;
                    }
                    let nd = best + (-c(i, j) + pot[u] - pot[i]).max(0.0);
                    if nd < dist[i] {
                        dist[i] = nd;
                        prev[i] = u;
                    }
                }
            }
        }

        let target = (0..m)
            .filter(|&j| demand[j] > 0)
            .min_by(|&x, &y| dist[n + x].total_cmp(&dist[n + y]))
            .expect("unmet demand implies an open sink");
        let reach = dist[n + target];

        // bottleneck along the path
        let mut push = demand[target];
        let mut v = n + target;
        loop {
            let u = prev[v];
            if v >= n {
                // u is a source feeding sink v
                if prev[u] == usize::MAX {
                    push = push.min(supply[u]);
                    break;
                }
            } else {
                // reverse edge sink u -> source v cancels flow[v][u]
                push = push.min(flow[v * m + (u - n)]);
            }
            v = u;
        }

        let mut v = n + target;
        loop {
            let u = prev[v];
            if v >= n {
                flow[u * m + (v - n)] += push;
                if prev[u] == usize::MAX {
                    supply[u] -= push;
                    break;
                }
            } else {
                flow[v * m + (u - n)] -= push;
            }
            v = u;
        }
        demand[target] -= push;
        remaining -= push;

        for (p, d) in pot.iter_mut().zip(&dist) {
            *p += d.min(reach);
        }
    }

    let total: f64 = flow
        .iter()
        .zip(&cost)
        .map(|(&f, &cij)| f as f64 * cij)
        .sum();
    total / (n * m) as f64
}

/// Exact 1-Wasserstein distance between the two click sets after normalizing
/// both axes by the object frame.
pub fn wasserstein2d(a: &ClickSet, b: &ClickSet) -> Result<f64> {
    check_pair(a, b)?;
    Ok(emd_uniform(&a.normalized(), &b.normalized()))
}
