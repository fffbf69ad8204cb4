//! PL1, exact 2D Wasserstein and 2D Kolmogorov-Smirnov between two click
//! sets, normalized by the object's bounding box.

use clickbench::imaging::BinaryMask;
use clickbench::metrics::{ks2d, pl1, wasserstein2d, ClickSet, Frame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn cloud(rng: &mut ChaCha8Rng, n: usize, (cx, cy): (f64, f64), spread: f64) -> Vec<(f64, f64)> {
    let d = Normal::new(0.0, spread).unwrap();
    (0..n)
        .map(|_| (cx + d.sample(rng), cy + d.sample(rng)))
        .collect()
}

fn main() -> clickbench::Result<()> {
    let object = BinaryMask::from_fn(200, 150, |x, y| {
        (40..160).contains(&x) && (30..120).contains(&y)
    });
    let frame = Frame::of_mask(&object)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    let reference = ClickSet::new(cloud(&mut rng, 40, (100.0, 75.0), 12.0), frame);
    let cases = [
        (
            "same distribution",
            cloud(&mut rng, 40, (100.0, 75.0), 12.0),
        ),
        ("shifted 10 px", cloud(&mut rng, 40, (110.0, 75.0), 12.0)),
        ("shifted 40 px", cloud(&mut rng, 40, (140.0, 90.0), 12.0)),
        (
            "uniform over object",
            (0..40)
                .map(|_| (rng.random_range(40.0..160.0), rng.random_range(30.0..120.0)))
                .collect(),
        ),
    ];
    println!(
        "{:<22} {:>6} {:>6} {:>8} {:>5}",
        "", "PL1", "WD", "KS p", "pass"
    );
    for (name, points) in cases {
        let other = ClickSet::new(points, frame);
        let ks = ks2d(&reference, &other)?;
        println!(
            "{name:<22} {:>6.3} {:>6.3} {:>8.4} {:>5}",
            pl1(&reference, &other)?,
            wasserstein2d(&reference, &other)?,
            ks.p_value,
            ks.pass
        );
    }
    Ok(())
}
