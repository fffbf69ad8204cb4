use std::path::PathBuf;

use log::debug;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::EvalConfig;
use super::model::ClickModel;
use super::seed::{instance_key, stream_seed};
use super::segmenter::{SegmentRequest, Segmenter};
use crate::clicks::{
    baseline_target, partition_groups, sample_click, sample_full_map, Click, Polarity,
    ProbabilityMap,
};
use crate::error::{Error, Result};
use crate::imaging::{distance_transform, iou, BinaryMask};

/// One object to segment.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: String,
    pub image: Option<PathBuf>,
    pub gt: BinaryMask,
    /// Precomputed clickability map, used by [`super::PriorMapModel`].
    pub prior: Option<ProbabilityMap>,
    /// First-round real clicks in mask coordinates.
    pub real_clicks: Vec<(usize, usize)>,
}

impl Instance {
    pub fn new(id: impl Into<String>, gt: BinaryMask) -> Self {
        Self {
            id: id.into(),
            image: None,
            gt,
            prior: None,
            real_clicks: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClickStrategy {
    Baseline,
    /// Sample from clicking group `i` (1-based).
    Group(usize),
    /// Sample from the whole map; the index separates independent repeats.
    FullMap(usize),
    /// Replay fixed clicks, then continue with baseline clicks.
    Replay(Vec<Click>),
}

impl ClickStrategy {
    fn stream_id(&self) -> u64 {
        match self {
            ClickStrategy::Baseline | ClickStrategy::Replay(_) => 0,
            ClickStrategy::Group(i) => *i as u64,
            ClickStrategy::FullMap(i) => 1_000 + *i as u64,
        }
    }
}

/// IoU after each click, padded to `max_clicks` with the last value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub ious: Vec<f64>,
    pub noc: u32,
    pub converged: bool,
    /// The segmenter failed before the run finished.
    pub failed: bool,
}

impl Trajectory {
    /// Builds a trajectory from observed IoUs (at most `cap` of them).
    pub fn from_ious(mut ious: Vec<f64>, threshold: f64, cap: u32, failed: bool) -> Self {
        ious.truncate(cap as usize);
        let last = ious.last().copied().unwrap_or(0.0);
        ious.resize(cap as usize, last);
        let hit = ious.iter().position(|&v| v >= threshold);
        Self {
            noc: hit.map_or(cap, |k| k as u32 + 1),
            converged: hit.is_some(),
            ious,
            failed,
        }
    }
}

fn next_click(
    strategy: &ClickStrategy,
    instance: &Instance,
    pred: &BinaryMask,
    model: &dyn ClickModel,
    config: &EvalConfig,
    round: u32,
) -> Result<Click> {
    let target = baseline_target(pred, &instance.gt, config.connectivity()?)?;
    let baseline = |region: &BinaryMask, polarity: Polarity| {
        let idx = distance_transform(region).argmax();
        Click::simulated(idx % region.width(), idx / region.width(), polarity)
    };

    let click = match strategy {
        ClickStrategy::Baseline => baseline(&target.region, target.polarity),
        ClickStrategy::Replay(clicks) => match clicks.get(round as usize - 1) {
            Some(c) => *c,
            None => baseline(&target.region, target.polarity),
        },
        ClickStrategy::Group(_) | ClickStrategy::FullMap(_) => {
            let map = model.map(instance, &target.region, config.diag_fraction)?;
            let groups = partition_groups(&map, config.n_groups)?;
            let seed = stream_seed(
                config.master_seed,
                instance_key(&instance.id),
                strategy.stream_id(),
                round as u64,
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match strategy {
                ClickStrategy::Group(i) => sample_click(&groups, *i, target.polarity, &mut rng)?,
                _ => sample_full_map(&groups, target.polarity, &mut rng),
            }
        }
    };
    Ok(click.with_round(round))
}

/// Runs up to `max_clicks` interaction rounds on one instance.
///
/// Every round the next click targets the largest error component of the
/// current prediction; the segmenter sees the whole click history and its
/// previous mask. Segmenter failures end the run with `failed = true` instead
/// of propagating, so one bad instance cannot abort a dataset run.
pub fn run_instance(
    segmenter: &mut dyn Segmenter,
    instance: &Instance,
    strategy: &ClickStrategy,
    model: &dyn ClickModel,
    config: &EvalConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if instance.gt.is_empty() {
        return Err(Error::invalid(format!(
            "instance {} has an empty mask",
            instance.id
        )));
    }
    let (w, h) = instance.gt.dims();
    let mut pred = BinaryMask::new(w, h);
    let mut clicks: Vec<Click> = Vec::new();
    let mut ious = Vec::with_capacity(config.max_clicks as usize);
    let mut failed = false;

    for round in 1..=config.max_clicks {
        let click = match next_click(strategy, instance, &pred, model, config, round) {
            Ok(c) => c,
            Err(Error::NoErrorRegion) => {
                ious.push(1.0);
                break;
            }
            Err(e) => return Err(e),
        };
        clicks.push(click);
        let request = SegmentRequest {
            instance,
            clicks: &clicks,
            prev_mask: if round == 1 { None } else { Some(&pred) },
        };
        match segmenter.segment(&request) {
            Ok(mask) if mask.dims() == (w, h) => pred = mask,
            Ok(mask) => {
                debug!(
                    "{}: segmenter returned {:?}, expected {:?}",
                    instance.id,
                    mask.dims(),
                    (w, h)
                );
                failed = true;
                break;
            }
            Err(e) => {
                debug!("{}: segmenter failed in round {round}: {e}", instance.id);
                failed = true;
                break;
            }
        }
        let score = iou(&pred, &instance.gt)?;
        ious.push(score);
        if score >= config.iou_threshold {
            break;
        }
    }

    let mut t = Trajectory::from_ious(ious, config.iou_threshold, config.max_clicks, failed);
    if failed {
        t.converged = false;
        t.noc = config.max_clicks;
    }
    Ok(t)
}
