use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clickbench::clicks::Device;
use clickbench::dataset::{
    write_clicks_csv, ClickRecord, ClickType, DatasetManifest, ManifestEntry,
};
use clickbench::imaging::{save_mask_png, BinaryMask};
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_clickbench");
const RADIUS: i64 = 6;

fn clickbench(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn disk(cx: i64, cy: i64) -> BinaryMask {
    BinaryMask::from_fn(40, 32, |x, y| {
        let (dx, dy) = (x as i64 - cx, y as i64 - cy);
        dx * dx + dy * dy <= RADIUS * RADIUS
    })
}

const CENTERS: [(i64, i64); 5] = [(10, 10), (20, 16), (30, 20), (12, 24), (25, 9)];

/// Five disk objects; the disk segmenter of the same radius reproduces each
/// from one click at its center.
fn disk_dataset(dir: &Path) -> PathBuf {
    let mut instances = Vec::new();
    for (i, &(cx, cy)) in CENTERS.iter().enumerate() {
        let name = format!("disk{i}.png");
        save_mask_png(&disk(cx, cy), dir.join(&name)).unwrap();
        instances.push(ManifestEntry {
            id: format!("disk{i}"),
            image: None,
            gt: name.into(),
            prior: None,
            prev_masks: Default::default(),
            description: None,
        });
    }
    let path = dir.join("manifest.json");
    DatasetManifest {
        name: "disks".into(),
        instances,
        root: dir.into(),
    }
    .save(&path)
    .unwrap();
    path
}

fn record(id: &str, x: u32, y: u32) -> ClickRecord {
    ClickRecord {
        dataset: "disks".into(),
        image_stem: id.into(),
        object_stem: id.into(),
        model_type: String::new(),
        click_type: ClickType::First,
        full_stem: id.into(),
        device: Device::Pc,
        x,
        y,
        w: 40,
        h: 32,
    }
}

/// A few clicks near each disk center.
fn disk_clicks(dir: &Path) -> PathBuf {
    let mut rows = Vec::new();
    for (i, &(cx, cy)) in CENTERS.iter().enumerate() {
        for (dx, dy) in [(0, 0), (1, 0), (0, -1), (-2, 1), (1, 2)] {
            rows.push(record(
                &format!("disk{i}"),
                (cx + dx) as u32,
                (cy + dy) as u32,
            ));
        }
    }
    let path = dir.join("clicks.csv");
    write_clicks_csv(fs::File::create(&path).unwrap(), &rows).unwrap();
    path
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn disk_segmenter_needs_one_baseline_click_per_disk() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let out = dir.path().join("run");
    let r = clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&manifest),
        "--segmenter",
        &format!("disk:{RADIUS}"),
        "--strategy",
        "baseline",
        "--out",
        s(&out),
    ]);
    ok(&r);
    let csv = fs::read_to_string(out.join("instances.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "base_noc").unwrap();
    let nocs: Vec<_> = lines
        .map(|l| l.split(',').nth(col).unwrap().to_string())
        .collect();
    assert_eq!(nocs, vec!["1"; 5]);
}

#[test]
fn external_adapter_matches_builtin_disk_segmenter() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let adapter = format!("'{BIN}' adapter disk --radius {RADIUS}");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let common = [
        "bench",
        "run",
        "--manifest",
        s(&manifest),
        "--seed",
        "3",
        "--groups",
        "4",
        "--workers",
        "2",
    ];
    ok(&clickbench(
        &[&common[..], &["--adapter", &adapter, "--out", s(&a)]].concat(),
    ));
    ok(&clickbench(
        &[
            &common[..],
            &["--segmenter", &format!("disk:{RADIUS}"), "--out", s(&b)],
        ]
        .concat(),
    ));
    for f in ["instances.csv", "aggregate.json", "results.json"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn group_strategy_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        ok(&clickbench(&[
            "bench",
            "run",
            "--manifest",
            s(&manifest),
            "--segmenter",
            "disk:4",
            "--strategy",
            "groups",
            "--seed",
            "11",
            "--workers",
            workers,
            "--out",
            s(&out),
        ]));
        out
    };
    let (a, b, c) = (run("a", "1"), run("b", "1"), run("c", "3"));
    for f in [
        "config.json",
        "instances.csv",
        "aggregate.json",
        "results.json",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    // the worker count only shows up in the resolved spec
    for f in ["instances.csv", "aggregate.json", "results.json"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(c.join(f)).unwrap(),
            "{f}"
        );
    }
    let agg: Value = serde_json::from_slice(&fs::read(a.join("aggregate.json")).unwrap()).unwrap();
    assert_eq!(agg["config"]["master_seed"], 11);
    assert!(agg["toolkit_version"].is_string());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"master_seed": 5, "n_groups": 3, "max_clicks": 7, "segmenter": "oracle", "workers": 2}"#)
        .unwrap();
    let out = dir.path().join("out");
    ok(&clickbench(&[
        "bench",
        "run",
        "--config",
        s(&config),
        "--manifest",
        s(&manifest),
        "--seed",
        "9",
        "--out",
        s(&out),
    ]));
    let spec: Value = serde_json::from_slice(&fs::read(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(spec["eval"]["master_seed"], 9);
    assert_eq!(spec["eval"]["n_groups"], 3);
    assert_eq!(spec["eval"]["max_clicks"], 7);
    assert_eq!(spec["segmenter"], "oracle");
    assert_eq!(spec["workers"], 2);
    // the resolved spec names every EvalConfig field
    assert_eq!(spec["eval"].as_object().unwrap().len(), 10);

    fs::write(&config, r#"{"bogus": 1}"#).unwrap();
    let r = clickbench(&[
        "bench",
        "run",
        "--config",
        s(&config),
        "--manifest",
        s(&manifest),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn missing_manifest_fails_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let r = clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&dir.path().join("nope.json")),
        "--segmenter",
        "oracle",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn unresolvable_adapter_fails_before_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let out = dir.path().join("out");
    let r = clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&manifest),
        "--adapter",
        "no-such-adapter-binary --x",
        "--out",
        s(&out),
    ]);
    assert_eq!(r.status.code(), Some(4));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(clickbench(&["bench", "run"]).status.code(), Some(2));
    assert_eq!(
        clickbench(&["bench", "run", "--out", "x", "--strategy", "sideways"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let r = clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&manifest),
        "--segmenter",
        "magic",
        "--out",
        "x",
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn oracle_plot_is_flat_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let run = dir.path().join("run");
    ok(&clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&manifest),
        "--segmenter",
        "oracle",
        "--out",
        s(&run),
    ]));
    ok(&clickbench(&["report", "plot", s(&run)]));
    let csv = fs::read_to_string(run.join("curves.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "strategy,clicks,mean_iou");
    let mut n = 0;
    for line in lines {
        let iou: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(iou, 1.0, "{line}");
        n += 1;
    }
    // baseline + 10 groups + sample, 20 clicks each
    assert_eq!(n, 12 * 20);
    assert!(fs::read_to_string(run.join("curves.svg"))
        .unwrap()
        .starts_with("<svg"));
}

#[test]
fn comparing_a_click_set_with_itself() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let clicks = disk_clicks(dir.path());
    let out = dir.path().join("cmp");
    ok(&clickbench(&[
        "metrics",
        "compare",
        s(&clicks),
        s(&clicks),
        "--manifest",
        s(&manifest),
        "--out",
        s(&out),
    ]));
    let summary: Value =
        serde_json::from_slice(&fs::read(out.join("compare.json")).unwrap()).unwrap();
    assert_eq!(summary["instances"], 5);
    assert_eq!(summary["ks_pass_rate"], 1.0);
    assert_eq!(summary["mean_wd"], 0.0);
    let mut rdr = csv::Reader::from_path(out.join("compare.csv")).unwrap();
    for row in rdr.records() {
        let row = row.unwrap();
        assert_eq!(&row[7], "0", "wd of {}", &row[0]);
        assert_eq!(&row[6], "true");
    }
}

#[test]
fn maps_build_writes_loadable_priors() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let clicks = disk_clicks(dir.path());
    let out = dir.path().join("maps");
    ok(&clickbench(&[
        "maps",
        "build",
        "--clicks",
        s(&clicks),
        "--manifest",
        s(&manifest),
        "--sigma",
        "2",
        "--out",
        s(&out),
    ]));
    let built = DatasetManifest::load(out.join("manifest.json")).unwrap();
    let instances = built.load_instances().unwrap();
    assert_eq!(instances.len(), 5);
    for (inst, &(cx, cy)) in instances.iter().zip(&CENTERS) {
        let prior = inst.prior.as_ref().unwrap();
        assert!((prior.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // clicks cluster at the center, so the map peaks within a pixel of it
        let (x, y) = prior.argmax();
        assert!(
            (x as i64 - cx).abs() <= 1 && (y as i64 - cy).abs() <= 1,
            "{} peak {x},{y}",
            inst.id
        );
    }
    // the new manifest drives a prior-model run
    let run = dir.path().join("run");
    ok(&clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&out.join("manifest.json")),
        "--segmenter",
        "disk:6",
        "--out",
        s(&run),
    ]));
}

#[test]
fn dataset_validate_counts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let clicks = disk_clicks(dir.path());
    let r = clickbench(&[
        "dataset",
        "validate",
        "--clicks",
        s(&clicks),
        "--manifest",
        s(&manifest),
    ]);
    ok(&r);
    let report: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(report["records"], 25);
    assert_eq!(report["by_dataset"]["disks"]["first"], 25);
    assert_eq!(report["first_round_validity"]["valid"], 25);

    let bad = dir.path().join("bad.csv");
    let text = fs::read_to_string(&clicks)
        .unwrap()
        .replacen(",pc,", ",simulated,", 1);
    fs::write(&bad, text).unwrap();
    let r = clickbench(&["dataset", "validate", "--clicks", s(&bad)]);
    assert_eq!(r.status.code(), Some(3));
    assert!(
        String::from_utf8_lossy(&r.stderr).contains("line 2"),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
}

#[test]
fn real_strategy_scores_first_clicks() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = disk_dataset(dir.path());
    let clicks = disk_clicks(dir.path());
    let out = dir.path().join("real");
    ok(&clickbench(&[
        "bench",
        "run",
        "--manifest",
        s(&manifest),
        "--segmenter",
        "disk:6",
        "--strategy",
        "real",
        "--clicks",
        s(&clicks),
        "--out",
        s(&out),
    ]));
    let summary: Value =
        serde_json::from_slice(&fs::read(out.join("first_click.json")).unwrap()).unwrap();
    assert_eq!(summary["instances"], 5);
    let rows = summary["rows"].as_array().unwrap();
    // the exact-center click reproduces the disk
    for row in rows {
        assert_eq!(row["ious"][0], 1.0);
        assert_eq!(row["ious"].as_array().unwrap().len(), 5);
    }
}
