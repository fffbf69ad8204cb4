use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::{EvalConfig, RunStrategy};
use super::stats::{iou_auc, AggregateReport, InstanceResult};
use crate::error::{Error, Result};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

fn csv_err(e: csv::Error) -> Error {
    Error::format("csv output", e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per instance: baseline and per-group NoC plus IoU-AuC.
pub fn write_instances_csv<W: Write>(out: W, results: &[InstanceResult]) -> Result<()> {
    let n_groups = results.first().map_or(0, |r| r.groups.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "id",
        "failed",
        "base_noc",
        "base_iou_auc",
        "sample_mean_noc",
        "sample_std_noc",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((1..=n_groups).map(|g| format!("g{g}_noc")));
    w.write_record(&header).map_err(csv_err)?;
    for r in results {
        let mut row = vec![
            r.id.clone(),
            r.failed().to_string(),
            r.baseline
                .as_ref()
                .map(|t| t.noc.to_string())
                .unwrap_or_default(),
            opt(r.baseline.as_ref().map(iou_auc)),
            opt(r.sample_mean_noc),
            opt(r.sample_std_noc),
        ];
        row.extend(r.groups.iter().map(|t| t.noc.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::format("csv output", e.to_string()))
}

#[derive(Serialize)]
struct AggregateDocument<'a> {
    toolkit_version: &'a str,
    config: &'a EvalConfig,
    report: &'a AggregateReport,
}

/// Pretty JSON holding the toolkit version, the fully resolved config and
/// the report. Contains nothing run-dependent, so equal inputs give equal bytes.
pub fn write_aggregate_json<W: Write>(
    mut out: W,
    report: &AggregateReport,
    config: &EvalConfig,
) -> Result<()> {
    let doc = AggregateDocument {
        toolkit_version: TOOLKIT_VERSION,
        config,
        report,
    };
    serde_json::to_writer_pretty(&mut out, &doc)
        .map_err(|e| Error::format("json output", e.to_string()))?;
    out.write_all(b"\n")
        .map_err(|e| Error::format("json output", e.to_string()))
}

/// Mean IoU after `clicks` clicks for one strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub strategy: String,
    pub clicks: u32,
    pub mean_iou: f64,
}

/// Mean-IoU curves for the baseline, every group (`G1`..) or full-map repeat
/// (`F1`..), and their average (`sample`).
pub fn curves_from_results(results: &[InstanceResult], strategy: RunStrategy) -> Vec<CurvePoint> {
    let mut points = Vec::new();
    let mut push_curve = |name: String, curves: Vec<&[f64]>| {
        let Some(len) = curves.first().map(|c| c.len()) else {
            return;
        };
        for k in 0..len {
            let mean = curves.iter().map(|c| c[k]).sum::<f64>() / curves.len() as f64;
            points.push(CurvePoint {
                strategy: name.clone(),
                clicks: k as u32 + 1,
                mean_iou: mean,
            });
        }
    };
    let baselines: Option<Vec<&[f64]>> = results
        .iter()
        .map(|r| r.baseline.as_ref().map(|t| &t.ious[..]))
        .collect();
    if let Some(b) = baselines.filter(|b| !b.is_empty()) {
        push_curve("baseline".into(), b);
    }
    let n_groups = results.first().map_or(0, |r| r.groups.len());
    let prefix = if strategy == RunStrategy::Full {
        "F"
    } else {
        "G"
    };
    for g in 0..n_groups {
        push_curve(
            format!("{prefix}{}", g + 1),
            results.iter().map(|r| &r.groups[g].ious[..]).collect(),
        );
    }
    if n_groups > 0 {
        push_curve(
            "sample".into(),
            results
                .iter()
                .flat_map(|r| r.groups.iter().map(|t| &t.ious[..]))
                .collect(),
        );
    }
    points
}

pub fn write_curves_csv<W: Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(["strategy", "clicks", "mean_iou"])
        .map_err(csv_err)?;
    for p in points {
        w.serialize(p).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::format("csv output", e.to_string()))
}

const PALETTE: [&str; 12] = [
    "#000000", "#d62728", "#ff7f0e", "#bcbd22", "#2ca02c", "#17becf", "#1f77b4", "#9467bd",
    "#e377c2", "#8c564b", "#7f7f7f", "#393b79",
];

/// A standalone SVG line chart of mean IoU against the number of clicks.
pub fn render_curves_svg(points: &[CurvePoint]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let mut names: Vec<&str> = Vec::new();
    for p in points {
        if !names.contains(&p.strategy.as_str()) {
            names.push(&p.strategy);
        }
    }
    let max_clicks = points.iter().map(|p| p.clicks).max().unwrap_or(1).max(2);
    let sx = |c: u32| M + (c - 1) as f64 / (max_clicks - 1) as f64 * (W - 2.0 * M);
    let sy = |v: f64| H - M - v.clamp(0.0, 1.0) * (H - 2.0 * M);

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<path d="M{M} {M} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - M,
        r = W - M
    )
    .unwrap();
    for tick in 0..=5 {
        let v = tick as f64 / 5.0;
        writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            M - 6.0,
            sy(v) + 4.0
        )
        .unwrap();
    }
    for c in [1, max_clicks / 2, max_clicks] {
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" font-size="11" text-anchor="middle">{c}</text>"#,
            sx(c),
            H - M + 16.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">clicks</text>"#,
        W / 2.0,
        H - 10.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">mean IoU</text>"#,
        H / 2.0,
        H / 2.0
    )
    .unwrap();
    for (i, name) in names.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .filter(|p| p.strategy == *name)
            .map(|p| format!("{:.2},{:.2}", sx(p.clicks), sy(p.mean_iou)))
            .collect();
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            coords.join(" ")
        )
        .unwrap();
        let ly = M + 14.0 * i as f64;
        writeln!(
            svg,
            r#"<text x="{}" y="{ly:.1}" font-size="11" fill="{color}">{}</text>"#,
            W - M + 4.0,
            xml_escape(name)
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
