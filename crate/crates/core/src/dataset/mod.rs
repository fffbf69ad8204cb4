//! Click tables, click validity rules, dataset manifests and per-instance
//! click-set comparisons.

mod compare;
mod manifest;
mod records;
mod validity;

pub use compare::{compare_click_tables, ComparisonSummary, InstanceComparison};
pub use manifest::{attach_real_clicks, DatasetManifest, ManifestEntry};
pub use records::{
    clicks_by_instance, counts_by_dataset, parse_clicks_csv, read_clicks, read_clicks_lossy,
    write_clicks_csv, ClickFilter, ClickRecord, ClickType, RoundCounts, CLICK_COLUMNS,
};
pub use validity::{
    rescale_point, validate_batch, validate_click, ClickValidator, BATCH_SIZE, MIN_VALID_PER_BATCH,
};
