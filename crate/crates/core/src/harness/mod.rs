//! Multi-round interactive segmentation evaluation.
//!
//! A [`Segmenter`] is queried with the full click history every round; the
//! next click comes from a [`ClickStrategy`]: the baseline "center of the
//! largest error", or a sample from one clicking group of an error-conditioned
//! clickability map. Per-instance [`Trajectory`]s are folded into an
//! [`AggregateReport`].

mod config;
mod evaluate;
mod model;
mod protocol;
mod report;
mod run;
mod seed;
mod segmenter;
mod stats;

pub use config::{DeltaMode, EvalConfig, RunStrategy, StdMode};
pub use evaluate::{evaluate_dataset, evaluate_instance};
pub use model::{ClickModel, DtClickModel, PriorMapModel, UniformClickModel};
pub use protocol::{
    encode_png_base64, serve_adapter, ProcessSegmenter, ProcessSegmenterFactory, WireClick,
    WireRequest, WireResponse,
};
pub use report::{
    curves_from_results, render_curves_svg, write_aggregate_json, write_curves_csv,
    write_instances_csv, CurvePoint, TOOLKIT_VERSION,
};
pub use run::{run_instance, ClickStrategy, Instance, Trajectory};
pub use seed::{instance_key, stream_seed};
pub use segmenter::{
    disk_segmenter, DiskSegmenter, EmptySegmenter, OracleSegmenter, SegmentRequest, Segmenter,
    SegmenterFactory,
};
pub use stats::{
    aggregate, correlation_report, first_click_eval, iou_auc, noc, nof, AggregateReport,
    Correlation, FirstClickStats, InstanceResult,
};
