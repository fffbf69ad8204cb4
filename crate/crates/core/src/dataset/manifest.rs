use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use log::warn;
use serde::{Deserialize, Serialize};

use super::records::ClickRecord;
use super::validity::{rescale_point, ClickValidator};
use crate::clicks::{load_probability_map, DEFAULT_DIAG_FRACTION};
use crate::error::{Error, Result};
use crate::harness::Instance;
use crate::imaging::load_mask_png;

/// One object of a segmentation dataset. Paths are relative to the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    /// Matches the `full_stem` of the object's first-round click rows.
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<PathBuf>,
    pub gt: PathBuf,
    /// Precomputed clickability map (PNG or raw binary).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PathBuf>,
    /// Previous-round prediction masks keyed by the method that produced them.
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub prev_masks: IndexMap<String, PathBuf>,
    /// Text shown by the text display mode of the collection service.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub name: String,
    pub instances: Vec<ManifestEntry>,
    /// Directory the entry paths are relative to; set on load.
    #[serde(skip)]
    pub root: PathBuf,
}

impl DatasetManifest {
    /// Reads a manifest and checks that every referenced file exists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest = serde_json::from_str(&text)
            .map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
        manifest.root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        manifest.check_files()?;
        Ok(manifest)
    }

    pub fn resolve(&self, relative: &Path) -> PathBuf {
        self.root.join(relative)
    }

    fn check_files(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.instances {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::format(
                    &self.name,
                    format!("duplicate instance id {:?}", e.id),
                ));
            }
            let files = e
                .image
                .iter()
                .chain([&e.gt])
                .chain(&e.prior)
                .chain(e.prev_masks.values());
            for f in files {
                let p = self.resolve(f);
                if !p.is_file() {
                    return Err(Error::format(
                        format!("{}: {}", self.name, e.id),
                        format!("missing file {}", p.display()),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn entry(&self, id: &str) -> Option<&ManifestEntry> {
        self.instances.iter().find(|e| e.id == id)
    }

    /// Loads masks and prior maps into harness instances, in manifest order.
    pub fn load_instances(&self) -> Result<Vec<Instance>> {
        self.instances
            .iter()
            .map(|e| {
                let gt = load_mask_png(self.resolve(&e.gt))?;
                let prior = e
                    .prior
                    .as_ref()
                    .map(|p| load_probability_map(self.resolve(p), Some(gt.dims())))
                    .transpose()?;
                Ok(Instance {
                    id: e.id.clone(),
                    image: e.image.as_ref().map(|p| self.resolve(p)),
                    gt,
                    prior,
                    real_clicks: Vec::new(),
                })
            })
            .collect()
    }

    /// Writes the manifest next to its files.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Attaches first-round clicks to instances whose id equals the record's
/// `full_stem`, rescaled to mask resolution. Invalid clicks are dropped.
/// Returns the number of clicks attached.
pub fn attach_real_clicks(instances: &mut [Instance], records: &[ClickRecord]) -> usize {
    let mut attached = 0;
    for inst in instances.iter_mut() {
        let validator = ClickValidator::new(&inst.gt, DEFAULT_DIAG_FRACTION);
        for r in records
            .iter()
            .filter(|r| r.round() == 1 && r.full_stem == inst.id)
        {
            let (x, y) = rescale_point(r.x, r.y, (r.w, r.h), inst.gt.dims());
            if validator.is_valid_at(x, y) {
                inst.real_clicks.push((x, y));
                attached += 1;
            } else {
                warn!("{}: dropping invalid click ({}, {})", inst.id, r.x, r.y);
            }
        }
    }
    attached
}
