use serde::{Deserialize, Serialize};

use super::config::{DeltaMode, EvalConfig, RunStrategy, StdMode};
use super::run::{Instance, Trajectory};
use super::segmenter::{SegmentRequest, Segmenter};
use crate::clicks::{Click, Polarity};
use crate::error::{Error, Result};
use crate::imaging::iou;

/// Clicks needed to reach `threshold`, capped at `cap`.
pub fn noc(trajectory: &Trajectory, threshold: f64, cap: u32) -> u32 {
    trajectory
        .ious
        .iter()
        .take(cap as usize)
        .position(|&v| v >= threshold)
        .map_or(cap, |k| k as u32 + 1)
}

/// Number of trajectories that never reached the threshold.
pub fn nof<'a>(trajectories: impl IntoIterator<Item = &'a Trajectory>) -> usize {
    trajectories.into_iter().filter(|t| !t.converged).count()
}

/// Area under the IoU-vs-clicks curve as 100 x the mean IoU over all rounds.
pub fn iou_auc(trajectory: &Trajectory) -> f64 {
    if trajectory.ious.is_empty() {
        return 0.0;
    }
    100.0 * trajectory.ious.iter().sum::<f64>() / trajectory.ious.len() as f64
}

/// Population mean and standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn relative_increase(value: f64, reference: f64) -> Option<f64> {
    (reference > 0.0).then(|| 100.0 * (value - reference) / reference)
}

/// Noise-to-signal ratio in percent; undefined for a zero mean.
fn nsr(values: &[f64]) -> Option<f64> {
    let (m, s) = mean_std(values);
    (m > 0.0).then(|| 100.0 * s / m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceResult {
    pub id: String,
    pub baseline: Option<Trajectory>,
    /// One trajectory per clicking group, G1 first.
    pub groups: Vec<Trajectory>,
    pub sample_mean_noc: Option<f64>,
    pub sample_std_noc: Option<f64>,
}

impl InstanceResult {
    pub fn new(
        id: impl Into<String>,
        baseline: Option<Trajectory>,
        groups: Vec<Trajectory>,
    ) -> Self {
        let (sample_mean_noc, sample_std_noc) = if groups.is_empty() {
            (None, None)
        } else {
            let nocs: Vec<f64> = groups.iter().map(|t| t.noc as f64).collect();
            let (m, s) = mean_std(&nocs);
            (Some(m), Some(s))
        };
        Self {
            id: id.into(),
            baseline,
            groups,
            sample_mean_noc,
            sample_std_noc,
        }
    }

    pub fn failed(&self) -> bool {
        self.baseline.iter().chain(&self.groups).any(|t| t.failed)
    }

    fn group_nocs(&self) -> Vec<f64> {
        self.groups.iter().map(|t| t.noc as f64).collect()
    }
}

/// Dataset-level statistics. Percentages are `None` when their denominator
/// vanishes or the strategy does not define them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub instances: usize,
    pub failed_instances: usize,
    pub sample_noc_mean: Option<f64>,
    pub sample_noc_std: Option<f64>,
    pub base_noc: Option<f64>,
    pub delta_sb: Option<f64>,
    pub delta_gr: Option<f64>,
    pub delta_hh: Option<f64>,
    /// Mean over groups of the number of failing instances.
    pub nof: Option<f64>,
    pub nof_std: Option<f64>,
    pub base_nof: Option<usize>,
    pub iou_auc: Option<f64>,
    pub iou_auc_std: Option<f64>,
    pub base_iou_auc: Option<f64>,
    pub nsr_at_1: Option<f64>,
    /// NSR of the IoU after click 20, or after the last click if `max_clicks` < 20.
    pub nsr_at_20: Option<f64>,
    /// Mean NoC of each group, G1 first.
    pub group_noc: Vec<f64>,
}

fn spread(per_instance: &[(f64, f64)], mode: StdMode) -> (f64, f64) {
    let means: Vec<f64> = per_instance.iter().map(|p| p.0).collect();
    let m = mean(&means);
    let s = match mode {
        StdMode::MeanOfGroupStd => mean(&per_instance.iter().map(|p| p.1).collect::<Vec<_>>()),
        StdMode::StdOfInstanceMeans => mean_std(&means).1,
    };
    (m, s)
}

pub fn aggregate(results: &[InstanceResult], config: &EvalConfig) -> Result<AggregateReport> {
    if results.is_empty() {
        return Err(Error::invalid("cannot aggregate zero instances"));
    }
    let n_groups = results[0].groups.len();
    if results.iter().any(|r| r.groups.len() != n_groups) {
        return Err(Error::invalid("instances disagree on the number of groups"));
    }

    let baselines: Vec<&Trajectory> = results.iter().filter_map(|r| r.baseline.as_ref()).collect();
    let has_base = baselines.len() == results.len();
    let base_noc =
        has_base.then(|| mean(&baselines.iter().map(|t| t.noc as f64).collect::<Vec<_>>()));
    let base_nof = has_base.then(|| nof(baselines.iter().copied()));
    let base_iou_auc =
        has_base.then(|| mean(&baselines.iter().map(|t| iou_auc(t)).collect::<Vec<_>>()));

    let mut report = AggregateReport {
        instances: results.len(),
        failed_instances: results.iter().filter(|r| r.failed()).count(),
        sample_noc_mean: None,
        sample_noc_std: None,
        base_noc,
        delta_sb: None,
        delta_gr: None,
        delta_hh: None,
        nof: None,
        nof_std: None,
        base_nof,
        iou_auc: None,
        iou_auc_std: None,
        base_iou_auc,
        nsr_at_1: None,
        nsr_at_20: None,
        group_noc: Vec::new(),
    };
    if n_groups == 0 {
        return Ok(report);
    }

    let per_instance: Vec<(f64, f64)> = results.iter().map(|r| mean_std(&r.group_nocs())).collect();
    let (sample_mean, sample_std) = spread(&per_instance, config.std_mode);
    report.sample_noc_mean = Some(sample_mean);
    report.sample_noc_std = Some(sample_std);

    report.group_noc = (0..n_groups)
        .map(|g| {
            mean(
                &results
                    .iter()
                    .map(|r| r.groups[g].noc as f64)
                    .collect::<Vec<_>>(),
            )
        })
        .collect();

    let half = n_groups / 2;
    let halves = |r: &InstanceResult| {
        let nocs = r.group_nocs();
        (mean(&nocs[..half]), mean(&nocs[half..]))
    };
    let ordered_groups = config.strategy != RunStrategy::Full;
    match config.delta_mode {
        DeltaMode::RatioOfMeans => {
            report.delta_sb = base_noc.and_then(|b| relative_increase(sample_mean, b));
            if ordered_groups && n_groups >= 2 {
                report.delta_gr =
                    relative_increase(report.group_noc[0], report.group_noc[n_groups - 1]);
                let hs: Vec<(f64, f64)> = results.iter().map(halves).collect();
                let low = mean(&hs.iter().map(|h| h.0).collect::<Vec<_>>());
                let high = mean(&hs.iter().map(|h| h.1).collect::<Vec<_>>());
                report.delta_hh = relative_increase(low, high);
            }
        }
        DeltaMode::MeanOfRatios => {
            let per = |f: &dyn Fn(&InstanceResult) -> Option<f64>| {
                results
                    .iter()
                    .map(f)
                    .collect::<Option<Vec<f64>>>()
                    .map(|v| mean(&v))
            };
            if has_base {
                report.delta_sb = per(&|r| {
                    relative_increase(r.sample_mean_noc?, r.baseline.as_ref()?.noc as f64)
                });
            }
            if ordered_groups && n_groups >= 2 {
                report.delta_gr = per(&|r| {
                    relative_increase(r.groups[0].noc as f64, r.groups[n_groups - 1].noc as f64)
                });
                report.delta_hh = per(&|r| {
                    let (lo, hi) = halves(r);
                    relative_increase(lo, hi)
                });
            }
        }
    }

    let fails: Vec<f64> = (0..n_groups)
        .map(|g| nof(results.iter().map(|r| &r.groups[g])) as f64)
        .collect();
    let (nof_mean, nof_std) = mean_std(&fails);
    report.nof = Some(nof_mean);
    report.nof_std = Some(nof_std);

    let aucs: Vec<(f64, f64)> = results
        .iter()
        .map(|r| mean_std(&r.groups.iter().map(iou_auc).collect::<Vec<_>>()))
        .collect();
    let (auc_mean, auc_std) = spread(&aucs, config.std_mode);
    report.iou_auc = Some(auc_mean);
    report.iou_auc_std = Some(auc_std);

    let nsr_at = |k: usize| {
        let vals: Vec<f64> = results
            .iter()
            .filter_map(|r| nsr(&r.groups.iter().map(|t| t.ious[k]).collect::<Vec<_>>()))
            .collect();
        (!vals.is_empty()).then(|| mean(&vals))
    };
    report.nsr_at_1 = nsr_at(0);
    report.nsr_at_20 = nsr_at(config.max_clicks.min(20) as usize - 1);

    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (saa > 0.0 && sbb > 0.0).then(|| (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties share their average rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Pairwise Pearson and Spearman correlations between the columns of a
/// `methods x metrics` table.
pub fn correlation_report(table: &[Vec<f64>]) -> Result<Vec<Vec<Correlation>>> {
    if table.len() < 3 {
        return Err(Error::invalid("correlations need at least 3 rows"));
    }
    let cols = table[0].len();
    if table.iter().any(|r| r.len() != cols) {
        return Err(Error::invalid("ragged metric table"));
    }
    let columns: Vec<Vec<f64>> = (0..cols)
        .map(|c| table.iter().map(|r| r[c]).collect())
        .collect();
    let ranked: Vec<Vec<f64>> = columns.iter().map(|c| average_ranks(c)).collect();
    Ok((0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| Correlation {
                    pearson: pearson(&columns[i], &columns[j]),
                    spearman: pearson(&ranked[i], &ranked[j]),
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstClickStats {
    pub id: String,
    pub ious: Vec<f64>,
    pub mean_iou: f64,
    pub std_iou: f64,
    pub nsr: Option<f64>,
    pub failed: bool,
}

/// Segments every instance once per real first-round click and reports the
/// spread of the resulting IoUs.
pub fn first_click_eval(
    segmenter: &mut dyn Segmenter,
    instances: &[Instance],
) -> Result<Vec<FirstClickStats>> {
    instances
        .iter()
        .map(|inst| {
            if inst.real_clicks.is_empty() {
                return Err(Error::invalid(format!("{} has no real clicks", inst.id)));
            }
            let mut ious = Vec::with_capacity(inst.real_clicks.len());
            let mut failed = false;
            for &(x, y) in &inst.real_clicks {
                let click = [Click::simulated(x, y, Polarity::Positive)];
                let req = SegmentRequest {
                    instance: inst,
                    clicks: &click,
                    prev_mask: None,
                };
                match segmenter.segment(&req) {
                    Ok(mask) if mask.dims() == inst.gt.dims() => ious.push(iou(&mask, &inst.gt)?),
                    _ => {
                        failed = true;
                        ious.push(0.0);
                    }
                }
            }
            let (m, s) = mean_std(&ious);
            Ok(FirstClickStats {
                id: inst.id.clone(),
                mean_iou: m,
                std_iou: s,
                nsr: nsr(&ious),
                ious,
                failed,
            })
        })
        .collect()
}
