//! Robustness of a toy segmenter: baseline clicks against clicks sampled from
//! each clicking group, aggregated over a small synthetic dataset.

use clickbench::harness::{
    aggregate, disk_segmenter, evaluate_dataset, DtClickModel, EvalConfig, Instance, RunStrategy,
    SegmentRequest, Segmenter,
};
use clickbench::imaging::BinaryMask;

/// Paints disks around positive clicks, clipped to the object. A click near
/// the boundary covers less of the object than one near its center.
struct ClippedDisks {
    radius: f64,
}

impl Segmenter for ClippedDisks {
    fn segment(&mut self, request: &SegmentRequest<'_>) -> clickbench::Result<BinaryMask> {
        let gt = &request.instance.gt;
        disk_segmenter(request.clicks, gt.dims(), self.radius).and(gt)
    }
}

fn ellipse(id: usize) -> Instance {
    let (w, h) = (64, 48);
    let (cx, cy) = (20.0 + (id * 7 % 24) as f64, 16.0 + (id * 5 % 16) as f64);
    let (rx, ry) = (8.0 + (id % 4) as f64 * 3.0, 6.0 + (id % 3) as f64 * 2.0);
    let gt = BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = ((x as f64 - cx) / rx, (y as f64 - cy) / ry);
        dx * dx + dy * dy <= 1.0
    });
    Instance::new(format!("ellipse{id:02}"), gt)
}

fn main() -> clickbench::Result<()> {
    let instances: Vec<Instance> = (0..12).map(ellipse).collect();
    let factory = || Ok(Box::new(ClippedDisks { radius: 6.0 }) as Box<dyn Segmenter>);

    for strategy in [RunStrategy::Groups, RunStrategy::Full] {
        let config = EvalConfig {
            strategy,
            iou_threshold: 0.85,
            master_seed: 1,
            ..Default::default()
        };
        let results = evaluate_dataset(&factory, &instances, &DtClickModel, &config, 4)?;
        let report = aggregate(&results, &config)?;
        let pct = |v: Option<f64>| v.map_or_else(|| "-".into(), |v| format!("{v:.1}%"));
        println!("{strategy:?}:");
        let num = |v: Option<f64>| v.map_or_else(|| "-".into(), |v| format!("{v:.2}"));
        println!(
            "  NoC baseline {}, sampled {} ± {}",
            num(report.base_noc),
            num(report.sample_noc_mean),
            num(report.sample_noc_std)
        );
        println!(
            "  ΔSB {}  ΔGR {}  ΔHH {}",
            pct(report.delta_sb),
            pct(report.delta_gr),
            pct(report.delta_hh)
        );
        let per_group: Vec<String> = report.group_noc.iter().map(|n| format!("{n:.2}")).collect();
        println!("  per group: {}", per_group.join(" "));
    }
    Ok(())
}
