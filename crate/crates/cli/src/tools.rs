use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clickbench::clicks::{build_clickability_map, save_probability_map, Click, Polarity};
use clickbench::dataset::{
    compare_click_tables, counts_by_dataset, parse_clicks_csv, rescale_point, ClickValidator,
    DatasetManifest, RoundCounts,
};
use clickbench::harness::{
    curves_from_results, disk_segmenter, render_curves_svg, serve_adapter, write_curves_csv,
    TOOLKIT_VERSION,
};
use clickbench::imaging::BinaryMask;
use indexmap::IndexMap;
use log::warn;
use serde::Serialize;

use crate::bench::ResultsFile;
use crate::failure::{output, Failure};
use crate::{CompareArgs, MapsBuildArgs, PlotArgs, ValidateArgs};

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| output(path, e))?;
    fs::write(path, text + "\n").map_err(|e| output(path, e))
}

/// Instance ids may contain path separators; map files are flat.
fn file_name(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn absolute(p: PathBuf) -> PathBuf {
    std::path::absolute(&p).unwrap_or(p)
}

/// One map per instance from its first-round clicks, plus a manifest that
/// points at the new maps as priors.
pub fn maps_build(args: MapsBuildArgs) -> Result<(), Failure> {
    let manifest = DatasetManifest::load(&args.manifest)?;
    let records = parse_clicks_csv(&args.clicks)?;
    let mut instances = manifest.load_instances()?;
    clickbench::dataset::attach_real_clicks(&mut instances, &records);

    let mut built = Vec::new();
    for inst in &instances {
        if inst.real_clicks.is_empty() {
            continue;
        }
        let clicks: Vec<Click> = inst
            .real_clicks
            .iter()
            .map(|&(x, y)| Click::simulated(x, y, Polarity::Positive))
            .collect();
        let map = build_clickability_map(&clicks, &inst.gt, args.sigma, args.diag_fraction)?;
        built.push((inst.id.clone(), map));
    }
    if built.is_empty() {
        return Err(Failure::Format(format!(
            "{}: no first-round click matches an instance of {}",
            args.clicks.display(),
            args.manifest.display()
        )));
    }

    fs::create_dir_all(&args.out).map_err(|e| output(&args.out, e))?;
    let mut out_manifest = manifest.clone();
    out_manifest
        .instances
        .retain(|e| built.iter().any(|(id, _)| id == &e.id));
    for entry in &mut out_manifest.instances {
        let (_, map) = built
            .iter()
            .find(|(id, _)| id == &entry.id)
            .expect("retained");
        let name = format!("{}.bin", file_name(&entry.id));
        save_probability_map(map, args.out.join(&name))?;
        entry.gt = absolute(manifest.resolve(&entry.gt));
        entry.image = entry.image.take().map(|p| absolute(manifest.resolve(&p)));
        for p in entry.prev_masks.values_mut() {
            *p = absolute(manifest.resolve(p));
        }
        entry.prior = Some(name.into());
    }
    out_manifest.save(args.out.join("manifest.json"))?;
    println!("{} maps written to {}", built.len(), args.out.display());
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

pub fn compare(args: CompareArgs) -> Result<(), Failure> {
    let a = parse_clicks_csv(&args.a)?;
    let b = parse_clicks_csv(&args.b)?;
    let masks: IndexMap<String, BinaryMask> = match &args.manifest {
        None => IndexMap::new(),
        Some(path) => {
            let m = DatasetManifest::load(path)?;
            m.load_instances()?
                .into_iter()
                .map(|i| (i.id, i.gt))
                .collect()
        }
    };
    let summary = compare_click_tables(&a, &b, &masks)?;
    if !summary.skipped.is_empty() {
        warn!(
            "{} instances skipped (unmatched or fewer than 3 clicks)",
            summary.skipped.len()
        );
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let table = |out: &mut dyn Write| -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "id",
            "n_a",
            "n_b",
            "pl1",
            "ks_statistic",
            "ks_p_value",
            "ks_pass",
            "wd",
        ])?;
        for r in &summary.rows {
            w.write_record([
                r.id.clone(),
                r.n_a.to_string(),
                r.n_b.to_string(),
                r.pl1.to_string(),
                r.ks.statistic.to_string(),
                r.ks.p_value.to_string(),
                r.ks.pass.to_string(),
                r.wd.to_string(),
            ])?;
        }
        w.flush()
    };
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| output(dir, e))?;
            let path = dir.join("compare.csv");
            let file = fs::File::create(&path).map_err(|e| output(&path, e))?;
            table(&mut BufWriter::new(file)).map_err(|e| output(&path, e))?;
            #[derive(Serialize)]
            struct Summary<'a> {
                toolkit_version: &'a str,
                a: &'a Path,
                b: &'a Path,
                instances: usize,
                mean_pl1: Option<f64>,
                ks_pass_rate: Option<f64>,
                mean_wd: Option<f64>,
                skipped: &'a [String],
            }
            write_json(
                &dir.join("compare.json"),
                &Summary {
                    toolkit_version: TOOLKIT_VERSION,
                    a: &args.a,
                    b: &args.b,
                    instances: summary.rows.len(),
                    mean_pl1: summary.mean_pl1,
                    ks_pass_rate: summary.ks_pass_rate,
                    mean_wd: summary.mean_wd,
                    skipped: &summary.skipped,
                },
            )?;
        }
        None => table(&mut out).map_err(|e| Failure::Other(e.to_string()))?,
    }
    let line = format!(
        "mean over {} instances: PL1 {}  KS {}  WD {}",
        summary.rows.len(),
        fmt_opt(summary.mean_pl1),
        fmt_opt(summary.ks_pass_rate),
        fmt_opt(summary.mean_wd)
    );
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

pub fn plot(args: PlotArgs) -> Result<(), Failure> {
    let path = args.report.join("results.json");
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::Format(format!("{}: {e}", path.display())))?;
    let file: ResultsFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Format(format!("{}: {e}", path.display())))?;
    let points = curves_from_results(&file.results, file.config.strategy);
    let out = args.out.unwrap_or(args.report);
    fs::create_dir_all(&out).map_err(|e| output(&out, e))?;
    let csv_path = out.join("curves.csv");
    let f = fs::File::create(&csv_path).map_err(|e| output(&csv_path, e))?;
    write_curves_csv(BufWriter::new(f), &points)?;
    let svg_path = out.join("curves.svg");
    fs::write(&svg_path, render_curves_svg(&points)).map_err(|e| output(&svg_path, e))?;
    println!("{} curve points written to {}", points.len(), out.display());
    Ok(())
}

#[derive(Default, Serialize)]
struct ValidityCounts {
    checked: usize,
    valid: usize,
    invalid: usize,
    /// First-round rows whose `full_stem` is not a manifest instance.
    unmatched: usize,
}

#[derive(Serialize)]
struct ValidateReport {
    toolkit_version: &'static str,
    records: usize,
    by_dataset: IndexMap<String, RoundCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_round_validity: Option<ValidityCounts>,
}

/// Strict parse of a click table; optionally re-checks first-round clicks
/// against the object masks.
pub fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let records = parse_clicks_csv(&args.clicks)?;
    let validity = match &args.manifest {
        None => None,
        Some(path) => {
            let m = DatasetManifest::load(path)?;
            let masks: IndexMap<String, BinaryMask> = m
                .load_instances()?
                .into_iter()
                .map(|i| (i.id, i.gt))
                .collect();
            let validators: IndexMap<&str, ClickValidator> = masks
                .iter()
                .map(|(id, mask)| {
                    (
                        id.as_str(),
                        ClickValidator::new(mask, clickbench::clicks::DEFAULT_DIAG_FRACTION),
                    )
                })
                .collect();
            let mut c = ValidityCounts::default();
            for r in records.iter().filter(|r| r.round() == 1) {
                match validators.get(r.full_stem.as_str()) {
                    None => c.unmatched += 1,
                    Some(v) => {
                        c.checked += 1;
                        let (x, y) =
                            rescale_point(r.x, r.y, (r.w, r.h), masks[&r.full_stem].dims());
                        if v.is_valid_at(x, y) {
                            c.valid += 1;
                        } else {
                            c.invalid += 1;
                        }
                    }
                }
            }
            Some(c)
        }
    };
    let report = ValidateReport {
        toolkit_version: TOOLKIT_VERSION,
        records: records.len(),
        by_dataset: counts_by_dataset(&records),
        first_round_validity: validity,
    };
    match &args.out {
        Some(path) => write_json(path, &report)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    }
    Ok(())
}

/// Reference adapter: answers each request with disks around its clicks.
pub fn disk_adapter(radius: f64) -> Result<(), Failure> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Failure::Usage("--radius must be positive".into()));
    }
    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_adapter(stdin.lock(), stdout.lock(), |req| {
        let dims = req.image_dims()?;
        let clicks = req
            .clicks
            .iter()
            .map(|c| {
                let polarity = if c.positive {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                Click::simulated(c.x.max(0) as usize, c.y.max(0) as usize, polarity)
            })
            .collect::<Vec<_>>();
        Ok(disk_segmenter(&clicks, dims, radius))
    })
    .map_err(|e| Failure::Other(e.to_string()))
}
