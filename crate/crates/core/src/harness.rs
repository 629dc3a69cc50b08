//! Real-time expanding-window backtesting.
//!
//! For an outbreak of padded length `T`, a forecast issued after observing
//! weeks `0..=u` targets weeks `u + 1 ..= u + h`. Issuance points start once
//! `min_history_weeks` weeks are available and stop when the furthest
//! horizon would leave the outbreak.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{forecast_quantiles, ForecastLabel, ModelKind, QuantileForecast, QuantileLevels, Transform};
use crate::types::Outbreak;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub min_history_weeks: usize,
    pub max_horizon: usize,
    pub train_fraction: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub split_seed: u64,
    pub minibatch_size: usize,
    pub minibatch_repeats: usize,
    pub transform: Transform,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            min_history_weeks: 8,
            max_horizon: 4,
            train_fraction: 0.6,
            val_fraction: 0.2,
            test_fraction: 0.2,
            split_seed: 20_250_531,
            minibatch_size: 100,
            minibatch_repeats: 10,
            transform: Transform::None,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<()> {
        let fractions = [self.train_fraction, self.val_fraction, self.test_fraction];
        if fractions.iter().any(|f| !(0.0..=1.0).contains(f))
            || (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidConfig(format!(
                "split fractions {fractions:?} must be in [0, 1] and sum to 1"
            )));
        }
        if self.min_history_weeks < 2 {
            return Err(Error::InvalidConfig("min_history_weeks must be at least 2".into()));
        }
        if self.max_horizon < 1 {
            return Err(Error::InvalidConfig("max_horizon must be at least 1".into()));
        }
        if self.minibatch_size == 0 {
            return Err(Error::InvalidConfig("minibatch_size must be positive".into()));
        }
        Ok(())
    }
}

/// One issuance point and the horizons forecast from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IssuanceWindow {
    /// Index of the last observed week.
    pub issuance: usize,
    pub max_horizon: usize,
}

impl IssuanceWindow {
    pub fn horizons(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.max_horizon
    }
}

/// Every issuance point of an outbreak of `duration` weeks.
pub fn issuance_windows_for(duration: usize, cfg: &HarnessConfig) -> Vec<IssuanceWindow> {
    let first = cfg.min_history_weeks.saturating_sub(1);
    let Some(last) = duration.checked_sub(1 + cfg.max_horizon) else {
        return Vec::new();
    };
    (first..=last)
        .map(|issuance| IssuanceWindow {
            issuance,
            max_horizon: cfg.max_horizon,
        })
        .collect()
}

pub fn issuance_windows(o: &Outbreak, cfg: &HarnessConfig) -> Vec<IssuanceWindow> {
    issuance_windows_for(o.duration(), cfg)
}

/// Number of (issuance, horizon) targets in an outbreak.
pub fn target_count(o: &Outbreak, cfg: &HarnessConfig) -> usize {
    issuance_windows(o, cfg).len() * cfg.max_horizon
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Shuffles ids under the split seed and partitions them.
///
/// Validation and test sets get `floor(fraction * n)` ids each; the
/// remainder goes to training. Ids are sorted before shuffling so the
/// result does not depend on input order.
pub fn split_outbreaks(ids: &[String], cfg: &HarnessConfig) -> Result<Split> {
    cfg.validate()?;
    if ids.is_empty() {
        return Err(Error::EmptySeries("no outbreak ids to split".into()));
    }
    let mut shuffled = ids.to_vec();
    shuffled.sort();
    shuffled.dedup();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.split_seed));
    let n = shuffled.len();
    let n_val = (cfg.val_fraction * n as f64 + 1e-9).floor() as usize;
    let n_test = (cfg.test_fraction * n as f64 + 1e-9).floor() as usize;
    let n_train = n - n_val - n_test;
    let test = shuffled.split_off(n_train + n_val);
    let val = shuffled.split_off(n_train);
    Ok(Split {
        train: shuffled,
        val,
        test,
    })
}

/// Seeded minibatches of outbreak ids, each drawn without replacement.
///
/// Batches larger than the pool are clamped to the whole pool. Ids inside a
/// batch are sorted.
pub fn sample_minibatches(ids: &[String], cfg: &HarnessConfig) -> Vec<Vec<String>> {
    if ids.is_empty() {
        return Vec::new();
    }
    let mut pool = ids.to_vec();
    pool.sort();
    let size = cfg.minibatch_size.min(pool.len());
    // Offset the seed so batches and splits draw different streams.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.split_seed ^ 0x6d69_6e69_6261_7463);
    (0..cfg.minibatch_repeats.max(1))
        .map(|_| {
            let mut batch: Vec<String> = index::sample(&mut rng, pool.len(), size)
                .into_iter()
                .map(|i| pool[i].clone())
                .collect();
            batch.sort();
            batch
        })
        .collect()
}

/// A fit that failed and was left out of the forecast stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedFit {
    pub unique_id: String,
    pub issuance_week_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BacktestOutput {
    /// Sorted by (unique_id, issuance, horizon).
    pub forecasts: Vec<QuantileForecast>,
    pub skipped: Vec<SkippedFit>,
}

impl BacktestOutput {
    pub fn skipped_targets(&self, max_horizon: usize) -> usize {
        self.skipped.len() * max_horizon
    }
}

/// Fits `model` on every expanding window of every outbreak.
///
/// Work runs in parallel; the final sort makes the output independent of
/// scheduling. Fit failures are logged and skipped.
pub fn run_backtest(
    outbreaks: &[Outbreak],
    model: ModelKind,
    cfg: &HarnessConfig,
    levels: &QuantileLevels,
) -> Result<BacktestOutput> {
    cfg.validate()?;
    let units: Vec<(&Outbreak, IssuanceWindow)> = outbreaks
        .iter()
        .flat_map(|o| issuance_windows(o, cfg).into_iter().map(move |w| (o, w)))
        .collect();
    let model_name = model.name();
    let results: Vec<std::result::Result<Vec<QuantileForecast>, SkippedFit>> = units
        .par_iter()
        .map(|(o, w)| {
            let history = &o.values[..=w.issuance];
            match model.fit(history, cfg.transform) {
                Ok(fitted) => Ok(forecast_quantiles(
                    &fitted,
                    w.max_horizon,
                    levels,
                    &ForecastLabel {
                        unique_id: &o.unique_id,
                        model: model_name,
                        issuance_week_index: w.issuance,
                    },
                )),
                Err(e) => Err(SkippedFit {
                    unique_id: o.unique_id.clone(),
                    issuance_week_index: w.issuance,
                    reason: e.to_string(),
                }),
            }
        })
        .collect();

    let mut out = BacktestOutput::default();
    for r in results {
        match r {
            Ok(fs) => out.forecasts.extend(fs),
            Err(skip) => {
                log::warn!(
                    "{model_name}: fit failed for {} at week {}: {}",
                    skip.unique_id,
                    skip.issuance_week_index,
                    skip.reason
                );
                out.skipped.push(skip);
            }
        }
    }
    out.forecasts.sort_by(|a, b| {
        (&a.unique_id, a.issuance_week_index, a.horizon).cmp(&(&b.unique_id, b.issuance_week_index, b.horizon))
    });
    out.skipped
        .sort_by(|a, b| (&a.unique_id, a.issuance_week_index).cmp(&(&b.unique_id, b.issuance_week_index)));
    Ok(out)
}
