//! Statistical baseline forecasters with Gaussian predictive distributions.
//!
//! Every model produces a point forecast and a forecast variance per
//! horizon; [`forecast_quantiles`] turns those into the 23-level quantile
//! format used throughout the engine.

mod arima;
mod ets;
mod flat;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub use arima::{fit_ar, fit_ar_order, ArFit};
pub use ets::{fit_ets, EtsKind};
pub use flat::fit_flat;

/// Lower bound on every variance estimate.
pub const VARIANCE_FLOOR: f64 = 1e-6;

/// Minimum history accepted by the ETS and AR fitters.
pub const MIN_FIT_HISTORY: usize = 8;

/// The 23 hub quantile levels.
pub const QUANTILE_LEVELS: [f64; 23] = [
    0.01, 0.025, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7,
    0.75, 0.8, 0.85, 0.9, 0.95, 0.975, 0.99,
];

/// Canonical text of each level, as written to forecast files.
pub const QUANTILE_LEVEL_TEXT: [&str; 23] = [
    "0.01", "0.025", "0.05", "0.1", "0.15", "0.2", "0.25", "0.3", "0.35", "0.4", "0.45", "0.5",
    "0.55", "0.6", "0.65", "0.7", "0.75", "0.8", "0.85", "0.9", "0.95", "0.975", "0.99",
];

/// Position of the median in [`QUANTILE_LEVELS`].
pub const MEDIAN_INDEX: usize = 11;

/// Ordered quantile levels, symmetric about 0.5 and containing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuantileLevels(Vec<f64>);

impl QuantileLevels {
    pub fn standard() -> Self {
        Self(QUANTILE_LEVELS.to_vec())
    }

    pub fn new(levels: Vec<f64>) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("quantile levels: {msg}")));
        if levels.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return bad("every level must lie in (0, 1)");
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return bad("levels must be strictly increasing");
        }
        let n = levels.len();
        if n.is_multiple_of(2) || levels[n / 2] != 0.5 {
            return bad("levels must contain 0.5 at the centre");
        }
        if (0..n / 2).any(|i| (levels[i] + levels[n - 1 - i] - 1.0).abs() > 1e-12) {
            return bad("levels must be symmetric about 0.5");
        }
        Ok(Self(levels))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn median_index(&self) -> usize {
        self.0.len() / 2
    }

    /// Standard normal quantiles for each level, exactly antisymmetric.
    pub fn z_scores(&self) -> Vec<f64> {
        let n = self.0.len();
        let lower: Vec<f64> = self.0[..n / 2].iter().map(|&q| normal_quantile(q)).collect();
        lower
            .iter()
            .copied()
            .chain(std::iter::once(0.0))
            .chain(lower.iter().rev().map(|z| -z))
            .collect()
    }
}

impl Default for QuantileLevels {
    fn default() -> Self {
        Self::standard()
    }
}

impl TryFrom<Vec<f64>> for QuantileLevels {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<QuantileLevels> for Vec<f64> {
    fn from(l: QuantileLevels) -> Vec<f64> {
        l.0
    }
}

/// Inverse CDF of the standard normal.
pub fn normal_quantile(q: f64) -> f64 {
    static STD: OnceLock<Normal> = OnceLock::new();
    if q == 0.5 {
        return 0.0;
    }
    STD.get_or_init(Normal::standard).inverse_cdf(q)
}

/// One model's predictive quantiles for one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileForecast {
    pub unique_id: String,
    pub model: String,
    /// Index of the last observed week in the outbreak.
    pub issuance_week_index: usize,
    pub horizon: usize,
    /// Values aligned with [`QUANTILE_LEVELS`].
    pub quantiles: Vec<f64>,
}

impl QuantileForecast {
    pub fn median(&self) -> f64 {
        self.quantiles[self.quantiles.len() / 2]
    }

    /// Index of the target week within the outbreak.
    pub fn target_week_index(&self) -> usize {
        self.issuance_week_index + self.horizon
    }

    /// Checks level count, finiteness and monotonicity.
    pub fn validate(&self) -> Result<()> {
        if self.quantiles.len() != QUANTILE_LEVELS.len() {
            return Err(Error::MalformedForecast(format!(
                "{} u={} h={}: {} quantiles, expected {}",
                self.unique_id,
                self.issuance_week_index,
                self.horizon,
                self.quantiles.len(),
                QUANTILE_LEVELS.len()
            )));
        }
        if let Some(i) = self.quantiles.iter().position(|v| !v.is_finite()) {
            return Err(Error::MalformedForecast(format!(
                "{} u={} h={}: non-finite value at level {}",
                self.unique_id, self.issuance_week_index, self.horizon, QUANTILE_LEVEL_TEXT[i]
            )));
        }
        if let Some(i) = self.quantiles.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::MalformedForecast(format!(
                "{} u={} h={}: quantiles decrease between levels {} and {}",
                self.unique_id,
                self.issuance_week_index,
                self.horizon,
                QUANTILE_LEVEL_TEXT[i],
                QUANTILE_LEVEL_TEXT[i + 1]
            )));
        }
        Ok(())
    }
}

/// Scale on which a model is fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    None,
    /// Fit on `ln(1 + x)`; quantiles are mapped back with `exp(q) - 1`.
    Log1p,
}

impl Transform {
    fn forward(&self, x: f64) -> f64 {
        match self {
            Transform::None => x,
            Transform::Log1p => x.ln_1p(),
        }
    }

    fn inverse(&self, x: f64) -> f64 {
        match self {
            Transform::None => x,
            Transform::Log1p => x.exp_m1(),
        }
    }
}

/// Baseline model families selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Flat,
    Ets,
    Ar,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Flat, ModelKind::Ets, ModelKind::Ar];

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Flat => "flat",
            ModelKind::Ets => "ets",
            ModelKind::Ar => "ar",
        }
    }

    pub fn available() -> String {
        Self::ALL.map(|m| m.name()).join(", ")
    }

    /// Shortest history the family can be fit on.
    pub fn min_history(&self) -> usize {
        match self {
            ModelKind::Flat => 2,
            ModelKind::Ets | ModelKind::Ar => MIN_FIT_HISTORY,
        }
    }

    pub fn fit(&self, history: &[f64], transform: Transform) -> Result<FittedModel> {
        let scaled: Vec<f64> = history.iter().map(|&x| transform.forward(x)).collect();
        let mut model = match self {
            ModelKind::Flat => fit_flat(&scaled)?,
            ModelKind::Ets => fit_ets(&scaled)?,
            ModelKind::Ar => fit_ar(&scaled)?,
        };
        model.transform = transform;
        Ok(model)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .or(match lower.as_str() {
                "arima" | "autoarima" => Some(ModelKind::Ar),
                "naive" | "persistence" => Some(ModelKind::Flat),
                _ => None,
            })
            .ok_or_else(|| Error::UnknownModel {
                name: s.to_string(),
                available: Self::available(),
            })
    }
}

/// The specific model a fitter selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelFamily {
    Flat,
    Ets(EtsKind),
    Ar { d: usize, p: usize },
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelFamily::Flat => f.write_str("flat"),
            ModelFamily::Ets(k) => write!(f, "ets-{k}"),
            ModelFamily::Ar { d, p } => write!(f, "arima({p},{d},0)"),
        }
    }
}

/// State carried forward from the end of the history.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Dynamics {
    Flat {
        last: f64,
    },
    Ets {
        level: f64,
        trend: f64,
        alpha: f64,
        beta: f64,
        phi: f64,
    },
    Ar {
        d: usize,
        intercept: f64,
        coefs: Vec<f64>,
        /// Most recent values of the (undifferenced) history, oldest first.
        tail: Vec<f64>,
    },
}

/// A fitted baseline, ready to produce forecasts at any horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub family: ModelFamily,
    pub params: Vec<f64>,
    /// One-step residual variance, at least [`VARIANCE_FLOOR`].
    pub residual_variance: f64,
    pub transform: Transform,
    pub(crate) dynamics: Dynamics,
}

impl FittedModel {
    /// Point forecasts for horizons `1..=h` on the fitting scale.
    pub fn point_forecasts(&self, h: usize) -> Vec<f64> {
        match &self.dynamics {
            Dynamics::Flat { last } => vec![*last; h],
            Dynamics::Ets {
                level, trend, phi, ..
            } => {
                let mut damp = 0.0;
                let mut phi_k = 1.0;
                (0..h)
                    .map(|_| {
                        phi_k *= phi;
                        damp += phi_k;
                        level + damp * trend
                    })
                    .collect()
            }
            Dynamics::Ar {
                d,
                intercept,
                coefs,
                tail,
            } => arima::forecast_path(*d, *intercept, coefs, tail, h),
        }
    }

    /// Forecast variance at horizon `k` divided by the residual variance,
    /// for `k = 1..=h`.
    pub fn variance_multipliers(&self, h: usize) -> Vec<f64> {
        match &self.dynamics {
            Dynamics::Flat { .. } => (1..=h).map(|k| k as f64).collect(),
            Dynamics::Ets {
                alpha, beta, phi, ..
            } => {
                let mut out = Vec::with_capacity(h);
                let mut acc = 1.0;
                let mut damp = 0.0;
                let mut phi_j = 1.0;
                for k in 1..=h {
                    out.push(acc);
                    if k < h {
                        phi_j *= phi;
                        damp += phi_j;
                        let c = alpha + beta * damp;
                        acc += c * c;
                    }
                }
                out
            }
            Dynamics::Ar { d, coefs, .. } => {
                let psi = arima::psi_weights(*d, coefs, h);
                let mut acc = 0.0;
                psi.iter()
                    .map(|p| {
                        acc += p * p;
                        acc
                    })
                    .collect()
            }
        }
    }

    /// Predictive standard deviations for horizons `1..=h` on the fitting scale.
    pub fn sigmas(&self, h: usize) -> Vec<f64> {
        self.variance_multipliers(h)
            .into_iter()
            .map(|m| (self.residual_variance * m).max(VARIANCE_FLOOR).sqrt())
            .collect()
    }
}

/// Labels attached to forecasts emitted from one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastLabel<'a> {
    pub unique_id: &'a str,
    pub model: &'a str,
    pub issuance_week_index: usize,
}

/// Gaussian quantiles for horizons `1..=h`, clipped at zero.
pub fn forecast_quantiles(
    m: &FittedModel,
    h: usize,
    levels: &QuantileLevels,
    label: &ForecastLabel<'_>,
) -> Vec<QuantileForecast> {
    let z = levels.z_scores();
    let points = m.point_forecasts(h);
    let sigmas = m.sigmas(h);
    points
        .iter()
        .zip(&sigmas)
        .enumerate()
        .map(|(k, (&point, &sigma))| {
            let mut quantiles: Vec<f64> = z
                .iter()
                .map(|zq| m.transform.inverse(point + zq * sigma).max(0.0))
                .collect();
            // Clipping preserves order; guard against rounding in the inverse transform.
            for i in 1..quantiles.len() {
                if quantiles[i] < quantiles[i - 1] {
                    quantiles[i] = quantiles[i - 1];
                }
            }
            QuantileForecast {
                unique_id: label.unique_id.to_string(),
                model: label.model.to_string(),
                issuance_week_index: label.issuance_week_index,
                horizon: k + 1,
                quantiles,
            }
        })
        .collect()
}

pub(crate) fn aicc(sse: f64, n: usize, k: usize) -> Option<f64> {
    let n_f = n as f64;
    let denom = n as f64 - k as f64 - 1.0;
    if denom <= 0.0 {
        return None;
    }
    let var = (sse / n_f).max(VARIANCE_FLOOR);
    let k_f = k as f64;
    Some(n_f * var.ln() + 2.0 * k_f + 2.0 * k_f * (k_f + 1.0) / denom)
}
