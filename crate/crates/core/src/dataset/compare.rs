use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::records::{clicks_by_instance, ClickFilter, ClickRecord};
use super::validity::rescale_point;
use crate::error::Result;
use crate::imaging::BinaryMask;
use crate::metrics::{ks2d, pl1, wasserstein2d, ClickSet, Frame, KsResult};

/// Metrics between the two click sets of one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceComparison {
    pub id: String,
    pub n_a: usize,
    pub n_b: usize,
    pub pl1: f64,
    pub wd: f64,
    pub ks: KsResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub rows: Vec<InstanceComparison>,
    pub mean_pl1: Option<f64>,
    pub mean_wd: Option<f64>,
    /// Fraction of instances whose KS test passes.
    pub ks_pass_rate: Option<f64>,
    /// Instances present in only one table or with fewer than 3 clicks on a side.
    pub skipped: Vec<String>,
}

fn click_set(records: &[&ClickRecord], mask: Option<&BinaryMask>) -> Result<ClickSet> {
    match mask {
        Some(m) => {
            let pixels: Vec<(usize, usize)> = records
                .iter()
                .map(|r| rescale_point(r.x, r.y, (r.w, r.h), m.dims()))
                .collect();
            Ok(ClickSet::from_pixels(&pixels, Frame::of_mask(m)?))
        }
        None => {
            let r0 = records[0];
            let points = records.iter().map(|r| (r.x as f64, r.y as f64)).collect();
            Ok(ClickSet::new(
                points,
                Frame::new(0.0, 0.0, r0.w as f64, r0.h as f64)?,
            ))
        }
    }
}

/// Compares two click tables instance by instance (grouped by `full_stem`).
///
/// With a mask for an instance, clicks are mapped to mask resolution and
/// normalized by the object's bounding box; otherwise by the image size.
pub fn compare_click_tables(
    a: &[ClickRecord],
    b: &[ClickRecord],
    masks: &IndexMap<String, BinaryMask>,
) -> Result<ComparisonSummary> {
    let ga = clicks_by_instance(a, &ClickFilter::default());
    let gb = clicks_by_instance(b, &ClickFilter::default());
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (id, ra) in &ga {
        let Some(rb) = gb.get(id) else {
            skipped.push(id.to_string());
            continue;
        };
        if ra.len() < 3 || rb.len() < 3 {
            skipped.push(id.to_string());
            continue;
        }
        let mask = masks.get(*id);
        let (sa, sb) = (click_set(ra, mask)?, click_set(rb, mask)?);
        rows.push(InstanceComparison {
            id: id.to_string(),
            n_a: sa.len(),
            n_b: sb.len(),
            pl1: pl1(&sa, &sb)?,
            wd: wasserstein2d(&sa, &sb)?,
            ks: ks2d(&sa, &sb)?,
        });
    }
    skipped.extend(
        gb.keys()
            .filter(|k| !ga.contains_key(*k))
            .map(|k| k.to_string()),
    );

    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&InstanceComparison) -> f64| {
        (!rows.is_empty()).then(|| rows.iter().map(f).sum::<f64>() / n)
    };
    Ok(ComparisonSummary {
        mean_pl1: mean(&|r| r.pl1),
        mean_wd: mean(&|r| r.wd),
        ks_pass_rate: mean(&|r| if r.ks.pass { 1.0 } else { 0.0 }),
        rows,
        skipped,
    })
}
