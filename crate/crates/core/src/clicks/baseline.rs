use super::{Click, Polarity};
use crate::error::{Error, Result};
use crate::imaging::{
    connected_components, distance_transform, error_regions, BinaryMask, Connectivity,
};

/// The error component the baseline strategy would correct next.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineTarget {
    pub region: BinaryMask,
    pub polarity: Polarity,
}

/// Largest connected error component of `pred` against `gt`.
///
/// Ties on size go to false-negative components, then to the component whose
/// first pixel comes earliest in raster order.
pub fn baseline_target(
    pred: &BinaryMask,
    gt: &BinaryMask,
    connectivity: Connectivity,
) -> Result<BaselineTarget> {
    let (fn_mask, fp_mask) = error_regions(pred, gt)?;

    // (size, polarity rank, seed, polarity, region id); lower rank wins ties
    let mut best: Option<(usize, u8, usize, Polarity, u32)> = None;
    let mut labelings = Vec::with_capacity(2);
    for (rank, (mask, polarity)) in [
        (&fn_mask, Polarity::Positive),
        (&fp_mask, Polarity::Negative),
    ]
    .into_iter()
    .enumerate()
    {
        let regions = connected_components(mask, connectivity);
        for (i, seed) in regions.seeds().into_iter().enumerate() {
            let id = i as u32 + 1;
            let size = regions.region_sizes[id as usize];
            let better = match best {
                None => true,
                Some((bs, br, bseed, _, _)) => {
                    size > bs || (size == bs && (rank as u8, seed) < (br, bseed))
                }
            };
            if better {
                best = Some((size, rank as u8, seed, polarity, id));
            }
        }
        labelings.push(regions);
    }

    let (_, rank, _, polarity, id) = best.ok_or(Error::NoErrorRegion)?;
    Ok(BaselineTarget {
        region: labelings[rank as usize].region_mask(id),
        polarity,
    })
}

/// Click at the point of the largest error component farthest from its
/// boundary. Positive for a missed (false-negative) region, negative for a
/// false-positive one.
pub fn baseline_click(
    pred: &BinaryMask,
    gt: &BinaryMask,
    connectivity: Connectivity,
) -> Result<Click> {
    let target = baseline_target(pred, gt, connectivity)?;
    let dt = distance_transform(&target.region);
    let idx = dt.argmax();
    let w = target.region.width();
    Ok(Click::simulated(idx % w, idx / w, target.polarity))
}
