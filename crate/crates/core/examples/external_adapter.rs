//! A segmenter living in another process. Run without arguments: the example
//! starts a copy of itself with `--serve`, which answers JSON-lines requests
//! on stdin/stdout, and benchmarks it.
//!
//! Instances without an image file are sent as a base64 PNG of the object
//! mask, so the toy adapter below segments bright pixels near the clicks.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use clickbench::clicks::{Click, Polarity};
use clickbench::harness::{
    disk_segmenter, evaluate_dataset, serve_adapter, EvalConfig, Instance, ProcessSegmenterFactory,
    RunStrategy, UniformClickModel,
};
use clickbench::imaging::BinaryMask;
use std::path::Path;

fn bright_pixels(image: &str) -> clickbench::Result<BinaryMask> {
    let decoded = if Path::new(image).is_file() {
        image::open(image)
    } else {
        let bytes = STANDARD
            .decode(image)
            .map_err(|e| clickbench::Error::Adapter(e.to_string()))?;
        image::load_from_memory(&bytes)
    };
    let gray = decoded
        .map_err(|e| clickbench::Error::Adapter(e.to_string()))?
        .into_luma8();
    Ok(BinaryMask::from_fn(
        gray.width() as usize,
        gray.height() as usize,
        |x, y| gray.get_pixel(x as u32, y as u32).0[0] > 127,
    ))
}

fn serve() -> std::io::Result<()> {
    let stdin = std::io::stdin();
    serve_adapter(stdin.lock(), std::io::stdout().lock(), |req| {
        let clicks: Vec<Click> = req
            .clicks
            .iter()
            .map(|c| {
                let polarity = if c.positive {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                Click::simulated(c.x as usize, c.y as usize, polarity)
            })
            .collect();
        let bright = bright_pixels(&req.image)?;
        disk_segmenter(&clicks, bright.dims(), 5.0).and(&bright)
    })
}

fn main() -> clickbench::Result<()> {
    if std::env::args().any(|a| a == "--serve") {
        serve().expect("adapter io");
        return Ok(());
    }
    let exe = std::env::current_exe().expect("own path");
    let factory = ProcessSegmenterFactory::new(format!("'{}' --serve", exe.display()))?;

    let instances: Vec<Instance> = (0..4)
        .map(|i| {
            let r = 5 + i as i64;
            let gt = BinaryMask::from_fn(32, 32, |x, y| {
                (x as i64 - 12).pow(2) + (y as i64 - 14).pow(2) <= r * r
            });
            Instance::new(format!("disk{i}"), gt)
        })
        .collect();
    let config = EvalConfig {
        strategy: RunStrategy::Groups,
        n_groups: 3,
        max_clicks: 10,
        ..Default::default()
    };
    let results = evaluate_dataset(&factory, &instances, &UniformClickModel, &config, 2)?;
    for r in &results {
        let base = r.baseline.as_ref().map(|t| t.noc);
        let groups: Vec<u32> = r.groups.iter().map(|t| t.noc).collect();
        println!("{}: baseline NoC {:?}, group NoC {:?}", r.id, base, groups);
    }
    Ok(())
}
