//! Ground-truth clickability map from a handful of real clicks, saved in the
//! raw binary map format and read back.

use clickbench::clicks::{
    build_clickability_map, load_probability_map, save_probability_map, Click, Polarity,
};
use clickbench::imaging::BinaryMask;

fn main() -> clickbench::Result<()> {
    let (w, h) = (64, 48);
    let object = BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - 30.0, y as f64 - 22.0);
        dx * dx / 400.0 + dy * dy / 196.0 <= 1.0
    });
    let clicks: Vec<Click> = [(30, 22), (28, 20), (33, 23), (31, 25), (20, 22)]
        .iter()
        .map(|&(x, y)| Click::simulated(x, y, Polarity::Positive))
        .collect();

    for sigma in [1.0, 5.0, 10.0] {
        let map = build_clickability_map(&clicks, &object, sigma, 0.01)?;
        let (ax, ay) = map.argmax();
        let support = map.probs().iter().filter(|&&p| p > 1e-6).count();
        println!(
            "sigma {sigma:>4}: peak ({ax}, {ay}) p={:.4}, {support} pixels above 1e-6",
            map.get(ax, ay)
        );
    }

    let map = build_clickability_map(&clicks, &object, 5.0, 0.01)?;
    let path = std::env::temp_dir().join("clickbench_example_map.bin");
    save_probability_map(&map, &path)?;
    let back = load_probability_map(&path, None)?;
    assert_eq!(back.probs(), map.probs());

    // a consumer at half resolution gets a bilinear resample, renormalized
    let half = load_probability_map(&path, Some((32, 24)))?;
    println!("round trip ok; half-resolution peak {:?}", half.argmax());
    std::fs::remove_file(path).ok();
    Ok(())
}
