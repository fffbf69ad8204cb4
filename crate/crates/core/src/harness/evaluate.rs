use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use super::config::{EvalConfig, RunStrategy};
use super::model::ClickModel;
use super::run::{run_instance, ClickStrategy, Instance};
use super::segmenter::{Segmenter, SegmenterFactory};
use super::stats::InstanceResult;
use crate::error::{Error, Result};

/// Runs the baseline trajectory plus, depending on the strategy, one
/// trajectory per clicking group or `n_groups` full-map repeats.
pub fn evaluate_instance(
    segmenter: &mut dyn Segmenter,
    instance: &Instance,
    model: &dyn ClickModel,
    config: &EvalConfig,
) -> Result<InstanceResult> {
    let baseline = run_instance(segmenter, instance, &ClickStrategy::Baseline, model, config)?;
    let sampled: Vec<ClickStrategy> = match config.strategy {
        RunStrategy::Baseline => Vec::new(),
        RunStrategy::Groups => (1..=config.n_groups).map(ClickStrategy::Group).collect(),
        RunStrategy::Full => (1..=config.n_groups).map(ClickStrategy::FullMap).collect(),
        RunStrategy::Real => {
            return Err(Error::invalid(
                "the real-click strategy is evaluated with first_click_eval",
            ))
        }
    };
    let groups = sampled
        .iter()
        .map(|s| run_instance(segmenter, instance, s, model, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(InstanceResult::new(
        instance.id.clone(),
        Some(baseline),
        groups,
    ))
}

/// Evaluates all instances on `workers` threads, each owning one segmenter
/// from `factory`. Results come back in input order and do not depend on the
/// worker count.
pub fn evaluate_dataset(
    factory: &dyn SegmenterFactory,
    instances: &[Instance],
    model: &dyn ClickModel,
    config: &EvalConfig,
    workers: usize,
) -> Result<Vec<InstanceResult>> {
    config.validate()?;
    let workers = workers.clamp(1, instances.len().max(1));
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let slots: Mutex<Vec<Option<InstanceResult>>> = Mutex::new(vec![None; instances.len()]);
    let first_error: Mutex<Option<(usize, Error)>> = Mutex::new(None);

    let fail = |index: usize, e: Error| {
        abort.store(true, Ordering::Relaxed);
        let mut slot = first_error.lock().unwrap();
        // keep the error of the lowest instance index for a stable message
        if slot.as_ref().is_none_or(|(i, _)| index < *i) {
            *slot = Some((index, e));
        }
    };

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut segmenter = match factory.connect() {
                    Ok(s) => s,
                    Err(e) => return fail(0, e),
                };
                while !abort.load(Ordering::Relaxed) {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(instance) = instances.get(i) else {
                        break;
                    };
                    match evaluate_instance(segmenter.as_mut(), instance, model, config) {
                        Ok(r) => slots.lock().unwrap()[i] = Some(r),
                        Err(e) => return fail(i, e),
                    }
                }
            });
        }
    });

    if let Some((_, e)) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    Ok(slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every instance evaluated"))
        .collect())
}
