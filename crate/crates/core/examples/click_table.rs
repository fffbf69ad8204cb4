//! The released click table: writing, strict reading, filtering, per-dataset
//! counts and the batch validity rule.

use clickbench::clicks::Device;
use clickbench::dataset::{
    clicks_by_instance, counts_by_dataset, read_clicks, validate_batch, validate_click,
    write_clicks_csv, ClickFilter, ClickRecord, ClickType,
};
use clickbench::imaging::BinaryMask;

fn record(object: &str, click_type: ClickType, model: &str, (x, y): (u32, u32)) -> ClickRecord {
    ClickRecord {
        dataset: "toy".into(),
        image_stem: "street".into(),
        object_stem: object.into(),
        model_type: model.into(),
        click_type,
        full_stem: format!("street_{object}"),
        device: Device::Mobile,
        x,
        y,
        w: 400,
        h: 300,
    }
}

fn main() -> clickbench::Result<()> {
    let rows = vec![
        record("car", ClickType::First, "", (120, 200)),
        record("car", ClickType::First, "", (130, 190)),
        record("car", ClickType::Fn, "sam", (150, 210)),
        record("bike", ClickType::First, "", (300, 120)),
        record("bike", ClickType::Fp, "ritm", (310, 90)),
    ];
    let mut csv = Vec::new();
    write_clicks_csv(&mut csv, &rows)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let back = read_clicks(&csv[..], "in-memory")?;
    assert_eq!(back, rows);

    let first = ClickFilter {
        round: Some(1),
        ..Default::default()
    };
    for (id, clicks) in clicks_by_instance(&back, &first) {
        println!("{id}: {} first-round clicks", clicks.len());
    }
    for (dataset, c) in counts_by_dataset(&back) {
        println!("{dataset}: {} first, {} subsequent", c.first, c.subsequent);
    }

    // a click counts when it lands within 1% of the diagonal of the object
    let car = BinaryMask::from_fn(200, 150, |x, y| {
        (50..80).contains(&x) && (90..110).contains(&y)
    });
    println!("click valid: {}", validate_click(&rows[0], &car, 0.01));

    // a batch of ten is kept with at least seven valid clicks
    let batch = [
        true, true, false, true, true, true, false, true, true, false,
    ];
    println!("batch kept: {}", validate_batch(&batch)?);

    let broken = "dataset,image_stem\ntoy,street\n";
    println!(
        "strict reader: {}",
        read_clicks(broken.as_bytes(), "broken.csv").unwrap_err()
    );
    Ok(())
}
