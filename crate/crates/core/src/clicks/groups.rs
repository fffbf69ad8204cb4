//! Equal-mass clicking groups.
//!
//! Pixels are sorted by ascending probability and laid end to end on the
//! cumulative-mass axis; group `i` of `n` owns the mass interval
//! `[(i-1)/n, i/n)`. A pixel straddling a boundary contributes a slice to each
//! group it overlaps, so every group carries exactly `1/n` of the mass and the
//! last group holds the most probable pixels.

use rand::Rng;

use super::probmap::ProbabilityMap;
use super::{Click, Polarity};
use crate::error::{Error, Result};

/// Slices thinner than this fraction of the total mass are rounding
/// artifacts at interval boundaries and are folded into the neighbouring slice.
const SLIVER: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Group {
    pixels: Vec<usize>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ClickingGroups {
    source: ProbabilityMap,
    groups: Vec<Group>,
    total_mass: f64,
}

impl ClickingGroups {
    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn source(&self) -> &ProbabilityMap {
        &self.source
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `(raster index, weight)` pairs of group `index` (1-based).
    pub fn members(&self, index: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let g = &self.groups[index - 1];
        g.pixels.iter().copied().zip(g.weights.iter().copied())
    }

    pub fn group_mass(&self, index: usize) -> f64 {
        self.groups[index - 1].weights.iter().sum()
    }

    /// Weight-averaged pixel probability of group `index` (1-based).
    pub fn mean_probability(&self, index: usize) -> f64 {
        let probs = self.source.probs();
        let (num, den) = self
            .members(index)
            .fold((0.0, 0.0), |(n, d), (px, w)| (n + w * probs[px], d + w));
        num / den
    }
}

pub fn partition_groups(map: &ProbabilityMap, n_groups: usize) -> Result<ClickingGroups> {
    if n_groups == 0 {
        return Err(Error::invalid("n_groups must be at least 1"));
    }
    let probs = map.probs();
    let mut order: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    // stable: equal probabilities keep raster order
    order.sort_by(|&a, &b| probs[a].total_cmp(&probs[b]));

    let total: f64 = order.iter().map(|&i| probs[i]).sum();
    let bounds: Vec<f64> = (0..=n_groups)
        .map(|k| {
            if k == n_groups {
                total
            } else {
                total * k as f64 / n_groups as f64
            }
        })
        .collect();
    let sliver = SLIVER * total;

    let mut groups = vec![
        Group {
            pixels: Vec::new(),
            weights: Vec::new(),
            cumulative: Vec::new(),
        };
        n_groups
    ];

    let mut start = 0.0;
    let mut g = 0;
    let mut slices: Vec<(usize, f64)> = Vec::new();
    for (rank, &px) in order.iter().enumerate() {
        let p = probs[px];
        let end = if rank + 1 == order.len() {
            total
        } else {
            start + p
        };
        slices.clear();
        while g < n_groups {
            let overlap = end.min(bounds[g + 1]) - start.max(bounds[g]);
            if overlap > 0.0 {
                slices.push((g, overlap));
            }
            if bounds[g + 1] <= end && g + 1 < n_groups {
                g += 1;
            } else {
                break;
            }
        }
        // drop boundary slivers, moving their mass to the largest slice
        if slices.len() > 1 {
            let biggest = slices
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .map(|(i, _)| i)
                .unwrap();
            let mut moved = 0.0;
            for (i, s) in slices.iter_mut().enumerate() {
                if i != biggest && s.1 <= sliver {
                    moved += s.1;
                    s.1 = 0.0;
                }
            }
            slices[biggest].1 += moved;
        }
        for &(gi, w) in &slices {
            if w > 0.0 {
                groups[gi].pixels.push(px);
                groups[gi].weights.push(w);
            }
        }
        start = end;
    }

    for (i, group) in groups.iter_mut().enumerate() {
        if group.pixels.is_empty() {
            return Err(Error::DegenerateMap(format!(
                "clicking group {} is empty",
                i + 1
            )));
        }
        let mut acc = 0.0;
        group.cumulative = group
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
    }

    Ok(ClickingGroups {
        source: map.clone(),
        groups,
        total_mass: total,
    })
}

fn draw_pixel(group: &Group, rng: &mut impl Rng) -> usize {
    let total = *group.cumulative.last().unwrap();
    let u = rng.random::<f64>() * total;
    let i = group.cumulative.partition_point(|&c| c <= u);
    group.pixels[i.min(group.pixels.len() - 1)]
}

/// Draws a pixel from group `group_index` (1-based) with probability
/// proportional to its within-group weight.
pub fn sample_click(
    groups: &ClickingGroups,
    group_index: usize,
    polarity: Polarity,
    rng: &mut impl Rng,
) -> Result<Click> {
    if group_index == 0 || group_index > groups.n_groups() {
        return Err(Error::invalid(format!(
            "group index {group_index} outside 1..={}",
            groups.n_groups()
        )));
    }
    let px = draw_pixel(&groups.groups[group_index - 1], rng);
    let w = groups.source.width();
    Ok(Click::simulated(px % w, px / w, polarity))
}

/// Draws from the whole map: a group uniformly (all carry equal mass), then a
/// pixel within it.
pub fn sample_full_map(groups: &ClickingGroups, polarity: Polarity, rng: &mut impl Rng) -> Click {
    let g = rng.random_range(0..groups.n_groups());
    let px = draw_pixel(&groups.groups[g], rng);
    let w = groups.source.width();
    Click::simulated(px % w, px / w, polarity)
}
