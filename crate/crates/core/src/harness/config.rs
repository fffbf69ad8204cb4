use serde::{Deserialize, Serialize};

use crate::clicks::{DEFAULT_CM_SIGMA, DEFAULT_DIAG_FRACTION};
use crate::error::{Error, Result};
use crate::imaging::Connectivity;

/// Which click sources a dataset run evaluates per instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStrategy {
    /// Baseline clicks only.
    Baseline,
    /// Baseline plus one trajectory per clicking group.
    #[default]
    Groups,
    /// Baseline plus `n_groups` trajectories sampled from the whole map.
    Full,
    /// First-round real clicks.
    Real,
}

impl std::str::FromStr for RunStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Self::Baseline),
            "groups" => Ok(Self::Groups),
            "full" => Ok(Self::Full),
            "real" => Ok(Self::Real),
            other => Err(Error::invalid(format!("unknown strategy {other:?}"))),
        }
    }
}

/// How relative increases (ΔSB, ΔGR, ΔHH) are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Ratio of dataset means.
    #[default]
    RatioOfMeans,
    /// Mean over instances of per-instance ratios.
    MeanOfRatios,
}

/// How the dataset-level "Sample" std is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdMode {
    /// Mean over instances of the per-instance std across groups.
    #[default]
    MeanOfGroupStd,
    /// Std across instances of the per-instance group means.
    StdOfInstanceMeans,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub max_clicks: u32,
    pub iou_threshold: f64,
    pub n_groups: usize,
    pub master_seed: u64,
    /// Gaussian sigma for ground-truth clickability maps, in pixels.
    pub sigma: f64,
    /// Click radius as a fraction of the image diagonal (soft error mask).
    pub diag_fraction: f64,
    /// 4 or 8.
    pub connectivity: u8,
    pub strategy: RunStrategy,
    pub delta_mode: DeltaMode,
    pub std_mode: StdMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            max_clicks: 20,
            iou_threshold: 0.90,
            n_groups: 10,
            master_seed: 0,
            sigma: DEFAULT_CM_SIGMA,
            diag_fraction: DEFAULT_DIAG_FRACTION,
            connectivity: 8,
            strategy: RunStrategy::Groups,
            delta_mode: DeltaMode::RatioOfMeans,
            std_mode: StdMode::MeanOfGroupStd,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_clicks < 1 {
            return Err(Error::invalid("max_clicks must be at least 1"));
        }
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(Error::invalid("iou_threshold must lie in (0, 1]"));
        }
        if self.n_groups < 1 {
            return Err(Error::invalid("n_groups must be at least 1"));
        }
        if self.sigma.is_nan()
            || self.sigma <= 0.0
            || self.diag_fraction.is_nan()
            || self.diag_fraction <= 0.0
        {
            return Err(Error::invalid("sigma and diag_fraction must be positive"));
        }
        self.connectivity()?;
        Ok(())
    }

    pub fn connectivity(&self) -> Result<Connectivity> {
        Connectivity::from_count(self.connectivity).ok_or_else(|| {
            Error::invalid(format!(
                "connectivity must be 4 or 8, got {}",
                self.connectivity
            ))
        })
    }
}
