use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clickbench::dataset::{attach_real_clicks, parse_clicks_csv, DatasetManifest};
use clickbench::harness::{
    aggregate, evaluate_dataset, first_click_eval, write_aggregate_json, write_instances_csv,
    ClickModel, DiskSegmenter, DtClickModel, EmptySegmenter, EvalConfig, FirstClickStats,
    InstanceResult, OracleSegmenter, PriorMapModel, ProcessSegmenterFactory, RunStrategy,
    Segmenter, SegmenterFactory, UniformClickModel, TOOLKIT_VERSION,
};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::failure::{output, Failure};
use crate::BenchRunArgs;

/// Everything a run depends on, written next to its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolvedSpec {
    pub toolkit_version: String,
    pub manifest: PathBuf,
    /// `adapter:<command>` or a built-in segmenter name.
    pub segmenter: String,
    pub model: String,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clicks: Option<PathBuf>,
    pub eval: EvalConfig,
}

/// Per-instance trajectories as read back by `report plot`.
#[derive(Serialize, Deserialize)]
pub struct ResultsFile {
    pub toolkit_version: String,
    pub config: EvalConfig,
    pub results: Vec<InstanceResult>,
}

/// Keys of the config file that are not EvalConfig fields.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunKeys {
    manifest: Option<PathBuf>,
    workers: Option<usize>,
    adapter: Option<String>,
    segmenter: Option<String>,
    model: Option<String>,
    clicks: Option<PathBuf>,
}

const RUN_KEYS: [&str; 6] = [
    "manifest",
    "workers",
    "adapter",
    "segmenter",
    "model",
    "clicks",
];

/// Precedence: flags, then the config file, then built-in defaults.
pub fn resolve(args: &BenchRunArgs) -> Result<ResolvedSpec, Failure> {
    let (mut eval, keys) = match &args.config {
        None => (EvalConfig::default(), RunKeys::default()),
        Some(path) => {
            let bad = |m: String| Failure::Format(format!("{}: {m}", path.display()));
            let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
            let mut all: Map<String, Value> =
                serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            let run: Map<String, Value> = RUN_KEYS
                .iter()
                .filter_map(|k| all.remove_entry(*k))
                .collect();
            let keys: RunKeys =
                serde_json::from_value(Value::Object(run)).map_err(|e| bad(e.to_string()))?;
            let eval: EvalConfig =
                serde_json::from_value(Value::Object(all)).map_err(|e| bad(e.to_string()))?;
            (eval, keys)
        }
    };
    if let Some(s) = args.seed {
        eval.master_seed = s;
    }
    if let Some(s) = args.strategy {
        eval.strategy = s;
    }
    if let Some(g) = args.groups {
        eval.n_groups = g;
    }
    if let Some(s) = args.sigma {
        eval.sigma = s;
    }
    eval.validate()?;

    let manifest = args
        .manifest
        .clone()
        .or(keys.manifest)
        .ok_or_else(|| Failure::Usage("--manifest is required".into()))?;
    let segmenter = match (&args.adapter, &args.segmenter) {
        (Some(cmd), _) => format!("adapter:{cmd}"),
        (None, Some(name)) => name.clone(),
        (None, None) => match (keys.adapter, keys.segmenter) {
            (Some(cmd), _) => format!("adapter:{cmd}"),
            (None, Some(name)) => name,
            (None, None) => {
                return Err(Failure::Usage(
                    "one of --adapter or --segmenter is required".into(),
                ))
            }
        },
    };
    let workers = args
        .workers
        .or(keys.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    let model = args
        .model
        .clone()
        .or(keys.model)
        .unwrap_or_else(|| "prior".into());
    let clicks = args.clicks.clone().or(keys.clicks);
    if eval.strategy == RunStrategy::Real && clicks.is_none() {
        return Err(Failure::Usage("the real strategy needs --clicks".into()));
    }
    Ok(ResolvedSpec {
        toolkit_version: TOOLKIT_VERSION.into(),
        manifest,
        segmenter,
        model,
        workers,
        clicks,
        eval,
    })
}

fn click_model(name: &str) -> Result<Box<dyn ClickModel>, Failure> {
    match name {
        "prior" => Ok(Box::new(PriorMapModel)),
        "dt" => Ok(Box::new(DtClickModel)),
        "uniform" => Ok(Box::new(UniformClickModel)),
        other => Err(Failure::Usage(format!(
            "unknown click model {other:?} (prior, dt, uniform)"
        ))),
    }
}

fn builtin(name: &str) -> Result<Box<dyn SegmenterFactory>, Failure> {
    fn boxed<S: Segmenter + Clone + Sync + 'static>(s: S) -> Box<dyn SegmenterFactory> {
        Box::new(move || Ok(Box::new(s.clone()) as Box<dyn Segmenter>))
    }
    match name.split_once(':') {
        None if name == "oracle" => Ok(boxed(OracleSegmenter)),
        None if name == "empty" => Ok(boxed(EmptySegmenter)),
        Some(("disk", r)) => {
            let radius: f64 = r
                .parse()
                .map_err(|_| Failure::Usage(format!("bad disk radius {r:?}")))?;
            Ok(boxed(DiskSegmenter { radius }))
        }
        _ => Err(Failure::Usage(format!(
            "unknown segmenter {name:?} (oracle, empty, disk:<radius>)"
        ))),
    }
}

fn factory(spec: &str) -> Result<Box<dyn SegmenterFactory>, Failure> {
    match spec.strip_prefix("adapter:") {
        Some(cmd) => Ok(Box::new(ProcessSegmenterFactory::new(cmd)?)),
        None => builtin(spec),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| output(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| output(path, e))?;
    fs::write(path, text + "\n").map_err(|e| output(path, e))
}

pub fn run(args: BenchRunArgs) -> Result<(), Failure> {
    let spec = resolve(&args)?;
    // everything that can fail on input happens before the output directory exists
    let manifest = DatasetManifest::load(&spec.manifest)?;
    let factory = factory(&spec.segmenter)?;
    let model = click_model(&spec.model)?;
    let mut instances = manifest.load_instances()?;
    info!(
        "{} instances from {}",
        instances.len(),
        spec.manifest.display()
    );

    if spec.eval.strategy == RunStrategy::Real {
        let records = parse_clicks_csv(spec.clicks.as_ref().expect("checked in resolve"))?;
        let attached = attach_real_clicks(&mut instances, &records);
        let before = instances.len();
        instances.retain(|i| !i.real_clicks.is_empty());
        if instances.len() < before {
            warn!(
                "{} instances have no valid first-round clicks",
                before - instances.len()
            );
        }
        info!("{attached} real clicks attached");
        let mut segmenter = factory.connect()?;
        let stats = first_click_eval(segmenter.as_mut(), &instances)?;
        return write_first_click(&args.out, &spec, &stats);
    }

    let results = evaluate_dataset(
        factory.as_ref(),
        &instances,
        model.as_ref(),
        &spec.eval,
        spec.workers,
    )?;
    let report = aggregate(&results, &spec.eval)?;

    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| output(out, e))?;
    write_json(&out.join("config.json"), &spec)?;
    write_instances_csv(create(&out.join("instances.csv"))?, &results)?;
    write_aggregate_json(create(&out.join("aggregate.json"))?, &report, &spec.eval)?;
    let file = ResultsFile {
        toolkit_version: TOOLKIT_VERSION.into(),
        config: spec.eval.clone(),
        results,
    };
    write_json(&out.join("results.json"), &file)?;
    println!(
        "{} instances, NoC baseline {} sample {}",
        report.instances,
        fmt_opt(report.base_noc),
        fmt_opt(report.sample_noc_mean)
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

#[derive(Serialize)]
struct FirstClickSummary<'a> {
    toolkit_version: &'a str,
    config: &'a EvalConfig,
    instances: usize,
    mean_iou: Option<f64>,
    mean_nsr: Option<f64>,
    rows: &'a [FirstClickStats],
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| s / n as f64)
}

fn write_first_click(
    out: &Path,
    spec: &ResolvedSpec,
    stats: &[FirstClickStats],
) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(|e| output(out, e))?;
    write_json(&out.join("config.json"), spec)?;
    let path = out.join("first_click.csv");
    let mut w = csv::Writer::from_writer(create(&path)?);
    w.write_record(["id", "clicks", "mean_iou", "std_iou", "nsr", "failed"])
        .map_err(|e| output(&path, e))?;
    for s in stats {
        let nsr = s.nsr.map_or_else(String::new, |v| v.to_string());
        w.write_record([
            s.id.clone(),
            s.ious.len().to_string(),
            s.mean_iou.to_string(),
            s.std_iou.to_string(),
            nsr,
            s.failed.to_string(),
        ])
        .map_err(|e| output(&path, e))?;
    }
    w.flush().map_err(|e| output(&path, e))?;
    let summary = FirstClickSummary {
        toolkit_version: TOOLKIT_VERSION,
        config: &spec.eval,
        instances: stats.len(),
        mean_iou: mean(stats.iter().map(|s| s.mean_iou)),
        mean_nsr: mean(stats.iter().filter_map(|s| s.nsr)),
        rows: stats,
    };
    write_json(&out.join("first_click.json"), &summary)?;
    println!(
        "{} instances, mean first-click IoU {}",
        stats.len(),
        fmt_opt(summary.mean_iou)
    );
    Ok(())
}
