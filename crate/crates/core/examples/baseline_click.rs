//! Where the baseline strategy clicks: the interior-most pixel of the
//! largest error component.

use clickbench::clicks::{baseline_click, baseline_target};
use clickbench::imaging::{distance_transform, BinaryMask, Connectivity};

fn main() -> clickbench::Result<()> {
    // object: a 12x8 rectangle; prediction covers its left half plus a stray blob
    let gt = BinaryMask::from_fn(24, 16, |x, y| (4..16).contains(&x) && (4..12).contains(&y));
    let pred = BinaryMask::from_fn(24, 16, |x, y| {
        ((4..10).contains(&x) && (4..12).contains(&y))
            || ((19..22).contains(&x) && (1..4).contains(&y))
    });

    let target = baseline_target(&pred, &gt, Connectivity::Eight)?;
    println!(
        "largest error: {} pixels, {:?}",
        target.region.count(),
        target.polarity
    );

    let dt = distance_transform(&target.region);
    for y in 0..gt.height() {
        let row: String = (0..gt.width())
            .map(|x| match (gt.get(x, y), pred.get(x, y)) {
                (true, true) => '#',
                (true, false) => (b'0' + dt.get(x, y).min(9.0) as u8) as char,
                (false, true) => '+',
                (false, false) => '.',
            })
            .collect();
        println!("{row}");
    }

    let click = baseline_click(&pred, &gt, Connectivity::Eight)?;
    println!("click at ({}, {}) {:?}", click.x, click.y, click.polarity);

    // after fixing the missed half, the stray blob is next and gets a negative click
    let fixed = pred.or(&gt)?;
    let next = baseline_click(&fixed, &gt, Connectivity::Eight)?;
    println!("next click at ({}, {}) {:?}", next.x, next.y, next.polarity);
    Ok(())
}
