//! Click generation: the baseline strategy, clickability models, ground-truth
//! clickability maps, decile clicking groups and weighted sampling.

mod baseline;
mod clickability;
mod groups;
mod probmap;

use serde::{Deserialize, Serialize};

pub use baseline::{baseline_click, baseline_target, BaselineTarget};
pub use clickability::{
    build_clickability_map, click_radius, dt_model, soft_error_mask, uniform_model, SoftErrorMask,
    DEFAULT_CM_SIGMA, DEFAULT_DIAG_FRACTION,
};
pub use groups::{partition_groups, sample_click, sample_full_map, ClickingGroups};
pub use probmap::{load_probability_map, save_probability_map, ProbabilityMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn is_positive(self) -> bool {
        self == Polarity::Positive
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Pc,
    Mobile,
    Simulated,
}

/// A single user interaction at pixel `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Click {
    pub x: usize,
    pub y: usize,
    pub polarity: Polarity,
    /// 1-based interaction round.
    pub round: u32,
    pub device: Device,
}

impl Click {
    pub fn simulated(x: usize, y: usize, polarity: Polarity) -> Self {
        Self {
            x,
            y,
            polarity,
            round: 1,
            device: Device::Simulated,
        }
    }

    pub fn with_round(mut self, round: u32) -> Self {
        self.round = round;
        self
    }
}
