//! NSS and PDE of the uniform and distance-transform click models against
//! clicks that favour the object center.

use clickbench::clicks::{dt_model, uniform_model};
use clickbench::imaging::BinaryMask;
use clickbench::metrics::{nss, pde};

fn main() -> clickbench::Result<()> {
    let object = BinaryMask::from_fn(80, 60, |x, y| {
        let (dx, dy) = (x as f64 - 40.0, y as f64 - 30.0);
        dx * dx + dy * dy <= 20.0 * 20.0
    });
    let clicks = [
        (40, 30),
        (38, 31),
        (43, 28),
        (41, 34),
        (35, 27),
        (46, 33),
        (30, 30),
    ];

    for (name, map) in [
        ("uniform", uniform_model(&object)?),
        ("distance", dt_model(&object)?),
    ] {
        println!(
            "{name:>8}: NSS {:>6.3}  PDE {:.3e}",
            nss(&map, &clicks)?,
            pde(&map, &clicks)?
        );
    }
    Ok(())
}
