//! Splitting a clickability map into equal-mass groups and sampling from
//! them. Group 1 holds the least likely pixels, the last group the most likely.

use clickbench::clicks::{dt_model, partition_groups, sample_click, sample_full_map, Polarity};
use clickbench::imaging::BinaryMask;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clickbench::Result<()> {
    let error = BinaryMask::from_fn(40, 40, |x, y| (5..35).contains(&x) && (8..32).contains(&y));
    let map = dt_model(&error)?;
    let groups = partition_groups(&map, 10)?;

    println!("group  pixels  mass    mean p     sample");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 1..=groups.n_groups() {
        let c = sample_click(&groups, i, Polarity::Positive, &mut rng)?;
        println!(
            "G{i:<4}  {:>6}  {:.3}  {:.2e}  ({:>2}, {:>2})",
            groups.members(i).count(),
            groups.group_mass(i),
            groups.mean_probability(i),
            c.x,
            c.y
        );
    }

    // drawing a group uniformly, then a pixel within it, samples the map itself
    let n = 20_000;
    let center_hits = (0..n)
        .map(|_| sample_full_map(&groups, Polarity::Positive, &mut rng))
        .filter(|c| (15..25).contains(&c.x) && (15..25).contains(&c.y))
        .count();
    let expected: f64 = (15..25)
        .flat_map(|y| (15..25).map(move |x| (x, y)))
        .map(|(x, y)| map.get(x, y))
        .sum();
    println!(
        "central 10x10 block: {:.3} sampled vs {:.3} mass",
        center_hits as f64 / n as f64,
        expected
    );
    Ok(())
}
