//! One participant's session driven directly against the store, with a
//! manual clock standing in for the browser's timeline.

use std::sync::Arc;

use clickbench::clicks::Device;
use clickbench::dataset::{DatasetManifest, ManifestEntry};
use clickbench::imaging::{save_mask_png, BinaryMask};
use clickbench_collect::{
    placeholder_image, render_target, unlock_ms, ClickSubmission, DisplayMode, ManualClock,
    NewSession, NextTask, Store, StoreConfig, Target,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("clickbench_collect_example");
    std::fs::create_dir_all(&dir)?;
    let mut instances = Vec::new();
    for i in 0..12 {
        let mask = BinaryMask::from_fn(120, 90, |x, y| {
            (20 + i..60 + i).contains(&x) && (25..65).contains(&y)
        });
        let name = format!("object{i}.png");
        save_mask_png(&mask, dir.join(&name))?;
        instances.push(ManifestEntry {
            id: format!("scene{i}_object"),
            image: None,
            gt: name.into(),
            prior: None,
            prev_masks: Default::default(),
            description: Some(format!("the square in scene {i}")),
        });
    }
    let manifest = DatasetManifest {
        name: "squares".into(),
        instances,
        root: dir.clone(),
    };

    let journal = dir.join("journal.csv");
    std::fs::remove_file(&journal).ok();
    let clock = Arc::new(ManualClock::new(0));
    let store = Store::open(&manifest, StoreConfig::new(&journal), clock.clone())?;

    let session = store.create_session(NewSession {
        device: Device::Pc,
        participant: Some("p-001".into()),
        mode: Some(DisplayMode::Cutout),
    })?;
    println!("session {} for {}", session.session_id, session.participant);

    let mut position = 0;
    while let NextTask::Task(task) = store.next_task(&session.session_id)? {
        if position == 0 {
            println!("phases: {:?}, target {}", task.phases, task.target_url);
            // a click before the image is unlocked never reaches the journal
            clock.advance(3000);
            let early = ClickSubmission {
                x: 80,
                y: 90,
                w: 240,
                h: 180,
                client_elapsed_ms: 3000,
            };
            println!(
                "early click: {:?}",
                store.submit_click(&task.task_id, early)?.reason
            );
            clock.advance(unlock_ms(DisplayMode::Cutout) - 3000 + 400);
        } else {
            clock.advance(unlock_ms(DisplayMode::Cutout) + 400);
        }
        // the UI showed the image at double size; every third click misses
        let (x, y) = if position % 3 == 2 {
            (5, 5)
        } else {
            (80 + 2 * position as u32, 90)
        };
        let click = ClickSubmission {
            x,
            y,
            w: 240,
            h: 180,
            client_elapsed_ms: unlock_ms(DisplayMode::Cutout) + 400,
        };
        let receipt = store.submit_click(&task.task_id, click)?;
        println!(
            "{:>2} {:<16} valid={:?} batch={:?}",
            position, task.instance, receipt.valid, receipt.batch_valid
        );
        position += 1;
    }

    let mut csv = Vec::new();
    store.export_csv(&mut csv)?;
    println!(
        "{} exported rows",
        String::from_utf8(csv)?.lines().count() - 1
    );

    let mask = BinaryMask::from_fn(8, 6, |x, y| (2..5).contains(&x) && (1..4).contains(&y));
    if let Target::Image(img) = render_target(
        &placeholder_image(&mask),
        &mask,
        DisplayMode::ShiftedCutout,
        None,
    )? {
        println!("shifted cutout top-left pixel: {:?}", img.get_pixel(0, 0).0);
    }
    Ok(())
}
