//! Persistence baseline: repeat the last value, widen with sqrt(h).

use super::{Dynamics, FittedModel, ModelFamily, VARIANCE_FLOOR};
use crate::error::{Error, Result};

pub fn fit_flat(history: &[f64]) -> Result<FittedModel> {
    if history.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: history.len(),
        });
    }
    let last = *history.last().unwrap();
    if !last.is_finite() {
        return Err(Error::FitFailed("last observation is not finite".into()));
    }
    let diffs: Vec<f64> = history.windows(2).map(|w| w[1] - w[0]).collect();
    let var = if diffs.len() < 2 {
        0.0
    } else {
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64
    };
    Ok(FittedModel {
        family: ModelFamily::Flat,
        params: vec![],
        residual_variance: var.max(VARIANCE_FLOOR),
        transform: Default::default(),
        dynamics: Dynamics::Flat { last },
    })
}
