use log::warn;

use super::run::Instance;
use crate::clicks::{dt_model, soft_error_mask, uniform_model, ProbabilityMap};
use crate::error::{Error, Result};
use crate::imaging::BinaryMask;

/// Produces a clickability map conditioned on the error region the next
/// click should correct.
pub trait ClickModel: Sync {
    fn name(&self) -> &str;

    fn map(
        &self,
        instance: &Instance,
        error: &BinaryMask,
        diag_fraction: f64,
    ) -> Result<ProbabilityMap>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UniformClickModel;

impl ClickModel for UniformClickModel {
    fn name(&self) -> &str {
        "uniform"
    }

    fn map(&self, _: &Instance, error: &BinaryMask, _: f64) -> Result<ProbabilityMap> {
        uniform_model(error)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DtClickModel;

impl ClickModel for DtClickModel {
    fn name(&self) -> &str {
        "dt"
    }

    fn map(&self, _: &Instance, error: &BinaryMask, _: f64) -> Result<ProbabilityMap> {
        dt_model(error)
    }
}

/// Uses the instance's precomputed map (for example the output of a learned
/// clickability model) multiplied by the soft mask of the current error.
/// Falls back to the uniform model when the product carries no mass, and to
/// the distance-transform model when the instance has no map.
#[derive(Clone, Copy, Debug, Default)]
pub struct PriorMapModel;

impl ClickModel for PriorMapModel {
    fn name(&self) -> &str {
        "prior"
    }

    fn map(
        &self,
        instance: &Instance,
        error: &BinaryMask,
        diag_fraction: f64,
    ) -> Result<ProbabilityMap> {
        let Some(prior) = &instance.prior else {
            return dt_model(error);
        };
        let prior = prior.resample(error.width(), error.height())?;
        let soft = soft_error_mask(error, diag_fraction)?;
        let product: Vec<f64> = prior
            .probs()
            .iter()
            .zip(soft.field.values())
            .map(|(p, m)| p * m)
            .collect();
        if product.iter().sum::<f64>() < 1e-12 {
            warn!(
                "{}: prior map has no mass on the error region, using uniform model",
                instance.id
            );
            return uniform_model(error);
        }
        match ProbabilityMap::from_weights(error.width(), error.height(), product) {
            Err(Error::DegenerateMap(_)) => uniform_model(error),
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_without_mass_on_error_falls_back() {
        let gt = BinaryMask::from_fn(40, 40, |x, _| x < 4);
        let mut w = vec![0.0; 1600];
        w[39] = 1.0; // far right column only
        let inst = Instance {
            id: "a".into(),
            image: None,
            gt: gt.clone(),
            prior: Some(ProbabilityMap::from_weights(40, 40, w).unwrap()),
            real_clicks: Vec::new(),
        };
        let m = PriorMapModel.map(&inst, &gt, 0.01).unwrap();
        assert_eq!(m, uniform_model(&gt).unwrap());
    }

    #[test]
    fn prior_is_conditioned_on_error() {
        let gt = BinaryMask::from_fn(40, 40, |x, _| x < 20);
        let inst = Instance {
            id: "b".into(),
            image: None,
            gt: gt.clone(),
            prior: Some(ProbabilityMap::from_weights(40, 40, vec![1.0; 1600]).unwrap()),
            real_clicks: Vec::new(),
        };
        let m = PriorMapModel.map(&inst, &gt, 0.01).unwrap();
        assert_eq!(m.get(35, 10), 0.0);
        assert!(m.get(5, 10) > 0.0);
    }
}
