use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::clicks::Device;
use crate::error::{Error, Result};

/// Column names of the click table, in canonical output order.
pub const CLICK_COLUMNS: [&str; 11] = [
    "dataset",
    "image_stem",
    "object_stem",
    "model_type",
    "click_type",
    "full_stem",
    "device",
    "x",
    "y",
    "w",
    "h",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClickType {
    /// First-round click on an empty prediction.
    First,
    /// Correction of a false-positive region.
    Fp,
    /// Correction of a false-negative region.
    Fn,
}

impl ClickType {
    /// 1 for first-round clicks, 2 for corrections.
    pub fn round(self) -> u32 {
        match self {
            ClickType::First => 1,
            ClickType::Fp | ClickType::Fn => 2,
        }
    }
}

/// One row of the click table. `x`, `y` are in the `w` x `h` frame the image
/// was displayed at.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClickRecord {
    pub dataset: String,
    pub image_stem: String,
    pub object_stem: String,
    /// Method that produced the previous-round mask; empty in round 1.
    pub model_type: String,
    pub click_type: ClickType,
    pub full_stem: String,
    pub device: Device,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl ClickRecord {
    pub fn round(&self) -> u32 {
        self.click_type.round()
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.device == Device::Simulated {
            return Err("device must be pc or mobile".into());
        }
        if self.click_type == ClickType::First && !self.model_type.is_empty() {
            return Err(format!(
                "first-round click has model_type {:?}",
                self.model_type
            ));
        }
        if self.w == 0 || self.h == 0 {
            return Err(format!("empty image size {}x{}", self.w, self.h));
        }
        if self.x >= self.w || self.y >= self.h {
            return Err(format!(
                "click ({}, {}) outside {}x{}",
                self.x, self.y, self.w, self.h
            ));
        }
        Ok(())
    }
}

fn reader<R: Read>(input: R, location: &str) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::format(location, e.to_string()))?
        .clone();
    for col in CLICK_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::format(
                format!("{location}: header"),
                format!("missing column {col:?}"),
            ));
        }
    }
    if let Some(extra) = headers.iter().find(|h| !CLICK_COLUMNS.contains(h)) {
        return Err(Error::format(
            format!("{location}: header"),
            format!("unexpected column {extra:?}"),
        ));
    }
    Ok(rdr)
}

/// Parses every row, pairing each rejected one with its located error.
fn parse_rows<R: Read>(input: R, location: &str) -> Result<Vec<Result<ClickRecord>>> {
    let mut rdr = reader(input, location)?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::format(location, e.to_string()))?
        .clone();
    Ok(rdr
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                Error::format(format!("{location}: line {line}"), e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let at = || format!("{location}: line {line}");
            let parsed: ClickRecord = rec
                .deserialize(Some(&headers))
                .map_err(|e| Error::format(at(), e.to_string()))?;
            parsed.check().map_err(|m| Error::format(at(), m))?;
            Ok(parsed)
        })
        .collect())
}

/// Strict parse: the header must hold exactly the schema columns (any order)
/// and the first bad row fails the whole input, naming its line.
pub fn read_clicks<R: Read>(input: R, location: &str) -> Result<Vec<ClickRecord>> {
    parse_rows(input, location)?.into_iter().collect()
}

/// Like [`read_clicks`] but keeps going past bad rows and returns their
/// errors alongside the good records. Header problems still fail.
pub fn read_clicks_lossy<R: Read>(
    input: R,
    location: &str,
) -> Result<(Vec<ClickRecord>, Vec<Error>)> {
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for row in parse_rows(input, location)? {
        match row {
            Ok(r) => good.push(r),
            Err(e) => bad.push(e),
        }
    }
    Ok((good, bad))
}

pub fn parse_clicks_csv(path: impl AsRef<Path>) -> Result<Vec<ClickRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_clicks(file, &path.display().to_string())
}

/// Writes the header and rows in [`CLICK_COLUMNS`] order.
pub fn write_clicks_csv<W: Write>(out: W, records: &[ClickRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    let err = |e: csv::Error| Error::format("click csv output", e.to_string());
    // explicit header so an empty table still gets one
    w.write_record(CLICK_COLUMNS).map_err(err)?;
    for r in records {
        w.serialize(r).map_err(err)?;
    }
    w.flush()
        .map_err(|e| Error::format("click csv output", e.to_string()))
}

/// Row selection for [`clicks_by_instance`]; `None` fields match everything.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClickFilter {
    pub dataset: Option<String>,
    pub device: Option<Device>,
    pub round: Option<u32>,
    pub click_type: Option<ClickType>,
    pub model_type: Option<String>,
}

impl ClickFilter {
    pub fn matches(&self, r: &ClickRecord) -> bool {
        self.dataset.as_ref().is_none_or(|d| *d == r.dataset)
            && self.device.is_none_or(|d| d == r.device)
            && self.round.is_none_or(|k| k == r.round())
            && self.click_type.is_none_or(|t| t == r.click_type)
            && self.model_type.as_ref().is_none_or(|m| *m == r.model_type)
    }
}

/// Matching records grouped by `full_stem`, groups and members in input order.
pub fn clicks_by_instance<'a>(
    records: &'a [ClickRecord],
    filter: &ClickFilter,
) -> IndexMap<&'a str, Vec<&'a ClickRecord>> {
    let mut groups: IndexMap<&str, Vec<&ClickRecord>> = IndexMap::new();
    for r in records.iter().filter(|r| filter.matches(r)) {
        groups.entry(r.full_stem.as_str()).or_default().push(r);
    }
    groups
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCounts {
    pub first: usize,
    pub subsequent: usize,
}

impl RoundCounts {
    pub fn total(&self) -> usize {
        self.first + self.subsequent
    }
}

/// First-round and correction click counts per dataset, in order of appearance.
pub fn counts_by_dataset(records: &[ClickRecord]) -> IndexMap<String, RoundCounts> {
    let mut counts: IndexMap<String, RoundCounts> = IndexMap::new();
    for r in records {
        let c = counts.entry(r.dataset.clone()).or_default();
        if r.round() == 1 {
            c.first += 1;
        } else {
            c.subsequent += 1;
        }
    }
    counts
}
