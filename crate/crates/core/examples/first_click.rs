//! How sensitive a segmenter is to where people put their first click:
//! one prediction per recorded click, then the spread of IoUs.

use clickbench::harness::{first_click_eval, DiskSegmenter, Instance};
use clickbench::imaging::BinaryMask;

fn main() -> clickbench::Result<()> {
    let gt = BinaryMask::from_fn(40, 40, |x, y| {
        let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
        dx * dx + dy * dy <= 64.0
    });
    let mut careful = Instance::new("careful", gt.clone());
    careful.real_clicks = vec![(20, 20), (21, 20), (20, 19), (19, 21)];
    let mut sloppy = Instance::new("sloppy", gt);
    sloppy.real_clicks = vec![(20, 20), (14, 22), (25, 15), (20, 27)];

    let mut segmenter = DiskSegmenter { radius: 8.0 };
    for s in first_click_eval(&mut segmenter, &[careful, sloppy])? {
        println!(
            "{:>8}: IoU {:.3} ± {:.3}, NSR {}",
            s.id,
            s.mean_iou,
            s.std_iou,
            s.nsr.map_or_else(|| "-".into(), |v| format!("{v:.1}%"))
        );
    }
    Ok(())
}
