//! Interval and point scoring of quantile forecasts, plus grouped summaries.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{QuantileForecast, QUANTILE_LEVELS};
use crate::types::Outbreak;

/// Number of central intervals in the 23-level format.
pub const N_INTERVALS: usize = 11;

/// Interval score of a central `(1 - alpha)` interval `[lower, upper]`.
pub fn interval_score(lower: f64, upper: f64, alpha: f64, y: f64) -> Result<f64> {
    if lower > upper {
        return Err(Error::MalformedInterval { lower, upper });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside (0, 1)")));
    }
    let mut score = upper - lower;
    if y < lower {
        score += 2.0 / alpha * (lower - y);
    }
    if y > upper {
        score += 2.0 / alpha * (y - upper);
    }
    Ok(score)
}

/// WIS split into its spread and miss penalties; the three parts sum to WIS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WisBreakdown {
    pub dispersion: f64,
    pub underprediction: f64,
    pub overprediction: f64,
}

impl WisBreakdown {
    pub fn total(&self) -> f64 {
        self.dispersion + self.underprediction + self.overprediction
    }
}

/// Weighted interval score with the median term weighted 1/2.
///
/// The 23 quantiles form the median and 11 central intervals with
/// `alpha = 2 * lower_level`:
///
/// ```text
/// WIS = 1 / (K + 1/2) * ( |y - m| / 2 + Σ_k alpha_k / 2 * IS_{alpha_k} )
/// ```
pub fn wis_breakdown(f: &QuantileForecast, y: f64) -> Result<WisBreakdown> {
    f.validate()?;
    if !y.is_finite() {
        return Err(Error::InvalidObservation(format!("observed value {y}")));
    }
    let q = &f.quantiles;
    let n = q.len();
    let median = q[n / 2];
    let mut parts = WisBreakdown {
        dispersion: 0.0,
        underprediction: 0.0,
        overprediction: 0.0,
    };
    // Median term as a degenerate interval with weight 1/2.
    if y < median {
        parts.overprediction += 0.5 * (median - y);
    } else {
        parts.underprediction += 0.5 * (y - median);
    }
    for i in 0..n / 2 {
        let (lower, upper) = (q[i], q[n - 1 - i]);
        let alpha = 2.0 * QUANTILE_LEVELS[i];
        let w = alpha / 2.0;
        parts.dispersion += w * (upper - lower);
        if y < lower {
            parts.overprediction += w * 2.0 / alpha * (lower - y);
        }
        if y > upper {
            parts.underprediction += w * 2.0 / alpha * (y - upper);
        }
    }
    let norm = 1.0 / (N_INTERVALS as f64 + 0.5);
    Ok(WisBreakdown {
        dispersion: parts.dispersion * norm,
        underprediction: parts.underprediction * norm,
        overprediction: parts.overprediction * norm,
    })
}

pub fn wis(f: &QuantileForecast, y: f64) -> Result<f64> {
    Ok(wis_breakdown(f, y)?.total())
}

/// WIS divided by the observation; undefined when `y <= 0`.
pub fn nwis(wis_value: f64, y: f64) -> Option<f64> {
    (y > 0.0).then(|| wis_value / y)
}

/// Absolute percentage error (undefined when `y <= 0`) and squared error of
/// the median.
pub fn point_metrics(f: &QuantileForecast, y: f64) -> (Option<f64>, f64) {
    let point = f.median();
    let err = y - point;
    let ape = (y > 0.0).then(|| 100.0 * err.abs() / y);
    (ape, err * err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    PrePeak,
    PostPeak,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::PrePeak => "pre_peak",
            Phase::PostPeak => "post_peak",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pre_peak" => Ok(Phase::PrePeak),
            "post_peak" => Ok(Phase::PostPeak),
            other => Err(Error::Format(format!("unknown phase `{other}`"))),
        }
    }
}

/// Index (into the padded values) of the first maximum of the core segment.
pub fn peak_index(o: &Outbreak) -> usize {
    let core = o.core_values();
    let mut best = 0;
    for (t, v) in core.iter().enumerate() {
        if *v > core[best] {
            best = t;
        }
    }
    o.core_start_offset + best
}

/// Pre-peak while the issuance week precedes the observed core peak.
pub fn peak_phase(o: &Outbreak, issuance_week_index: usize) -> Phase {
    if issuance_week_index < peak_index(o) {
        Phase::PrePeak
    } else {
        Phase::PostPeak
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub unique_id: String,
    pub model: String,
    pub disease: String,
    pub location: String,
    pub outcome: String,
    pub issuance_week_index: usize,
    pub horizon: usize,
    pub observed: f64,
    pub point: f64,
    pub wis: f64,
    pub nwis: Option<f64>,
    pub ape: Option<f64>,
    pub squared_error: f64,
    pub phase: Phase,
}

/// A forecast that could not be scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unmatched {
    pub unique_id: String,
    pub model: String,
    pub issuance_week_index: usize,
    pub horizon: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredForecasts {
    pub records: Vec<ScoreRecord>,
    pub unmatched: Vec<Unmatched>,
}

pub fn score_one(o: &Outbreak, f: &QuantileForecast) -> Result<ScoreRecord> {
    let target = f.target_week_index();
    let y = *o.values.get(target).ok_or_else(|| {
        Error::InvalidObservation(format!(
            "target week {target} lies beyond the outbreak's {} weeks",
            o.duration()
        ))
    })?;
    let w = wis(f, y)?;
    let (ape, squared_error) = point_metrics(f, y);
    Ok(ScoreRecord {
        unique_id: f.unique_id.clone(),
        model: f.model.clone(),
        disease: o.key.disease().to_string(),
        location: o.key.location().to_string(),
        outcome: o.key.outcome().to_string(),
        issuance_week_index: f.issuance_week_index,
        horizon: f.horizon,
        observed: y,
        point: f.median(),
        wis: w,
        nwis: nwis(w, y),
        ape,
        squared_error,
        phase: peak_phase(o, f.issuance_week_index),
    })
}

/// Scores every forecast against its outbreak's observed values.
///
/// Forecasts without truth are reported in `unmatched`; the rest are scored.
/// Records come back sorted by (model, unique_id, issuance, horizon).
pub fn score_forecasts(forecasts: &[QuantileForecast], outbreaks: &[Outbreak]) -> ScoredForecasts {
    let by_id: HashMap<&str, &Outbreak> = outbreaks.iter().map(|o| (o.unique_id.as_str(), o)).collect();
    let mut out = ScoredForecasts::default();
    for f in forecasts {
        let result = match by_id.get(f.unique_id.as_str()) {
            Some(o) => score_one(o, f),
            None => Err(Error::InvalidObservation("no outbreak with this unique_id".into())),
        };
        match result {
            Ok(r) => out.records.push(r),
            Err(e) => out.unmatched.push(Unmatched {
                unique_id: f.unique_id.clone(),
                model: f.model.clone(),
                issuance_week_index: f.issuance_week_index,
                horizon: f.horizon,
                reason: e.to_string(),
            }),
        }
    }
    out.records.sort_by(|a, b| {
        (&a.model, &a.unique_id, a.issuance_week_index, a.horizon)
            .cmp(&(&b.model, &b.unique_id, b.issuance_week_index, b.horizon))
    });
    out
}

/// Columns a summary table can be grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    Model,
    Horizon,
    Phase,
    Disease,
    Location,
    Outcome,
    UniqueId,
}

impl GroupKey {
    pub const ALL: [GroupKey; 7] = [
        GroupKey::Model,
        GroupKey::Horizon,
        GroupKey::Phase,
        GroupKey::Disease,
        GroupKey::Location,
        GroupKey::Outcome,
        GroupKey::UniqueId,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GroupKey::Model => "model",
            GroupKey::Horizon => "horizon",
            GroupKey::Phase => "phase",
            GroupKey::Disease => "disease",
            GroupKey::Location => "location",
            GroupKey::Outcome => "event",
            GroupKey::UniqueId => "unique_id",
        }
    }

    fn value(&self, r: &ScoreRecord) -> String {
        match self {
            GroupKey::Model => r.model.clone(),
            GroupKey::Horizon => r.horizon.to_string(),
            GroupKey::Phase => r.phase.to_string(),
            GroupKey::Disease => r.disease.clone(),
            GroupKey::Location => r.location.clone(),
            GroupKey::Outcome => r.outcome.clone(),
            GroupKey::UniqueId => r.unique_id.clone(),
        }
    }
}

impl FromStr for GroupKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .or((s == "outcome").then_some(GroupKey::Outcome))
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown group key `{s}`; expected one of {}",
                    Self::ALL.map(|k| k.name()).join(", ")
                ))
            })
    }
}

/// Summary metrics for one group of score records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub n_targets: usize,
    /// Targets with `y <= 0`, left out of NWIS and MAPE.
    pub n_excluded: usize,
    pub wis: f64,
    pub nwis: Option<f64>,
    pub mape: Option<f64>,
    pub nmse: Option<f64>,
}

impl GroupMetrics {
    /// NWIS and MAPE average defined per-target values; NMSE is the mean
    /// squared error over the product of mean observation and mean point
    /// forecast.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ScoreRecord>) -> Option<Self> {
        let mut n = 0usize;
        let (mut wis, mut se, mut obs, mut point) = (0.0, 0.0, 0.0, 0.0);
        let (mut nwis_sum, mut nwis_n) = (0.0, 0usize);
        let (mut ape_sum, mut ape_n) = (0.0, 0usize);
        for r in records {
            n += 1;
            wis += r.wis;
            se += r.squared_error;
            obs += r.observed;
            point += r.point;
            if let Some(v) = r.nwis {
                nwis_sum += v;
                nwis_n += 1;
            }
            if let Some(v) = r.ape {
                ape_sum += v;
                ape_n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        let nf = n as f64;
        let denom = (obs / nf) * (point / nf);
        Some(GroupMetrics {
            n_targets: n,
            n_excluded: n - nwis_n,
            wis: wis / nf,
            nwis: (nwis_n > 0).then(|| nwis_sum / nwis_n as f64),
            mape: (ape_n > 0).then(|| ape_sum / ape_n as f64),
            nmse: (denom > 0.0).then(|| (se / nf) / denom),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: Vec<String>,
    pub metrics: GroupMetrics,
}

/// Groups records by `keys` and summarises each group. Rows are ordered by
/// group value.
pub fn aggregate(records: &[ScoreRecord], keys: &[GroupKey]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<Vec<String>, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        let group: Vec<String> = keys.iter().map(|k| k.value(r)).collect();
        groups.entry(group).or_default().push(r);
    }
    groups
        .into_iter()
        .filter_map(|(group, rs)| {
            GroupMetrics::from_records(rs).map(|metrics| AggregateRow { group, metrics })
        })
        .collect()
}

/// Label for targets pooled over every horizon.
pub const ALL_HORIZONS: &str = "all";
/// Label for the unweighted mean of per-horizon metrics.
pub const MEAN_OVER_HORIZONS: &str = "mean_h";

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Model × horizon table with two combined rows per model: all targets
/// pooled (`all`) and the mean of the per-horizon rows (`mean_h`).
pub fn model_horizon_table(records: &[ScoreRecord]) -> Vec<AggregateRow> {
    let per_horizon = aggregate(records, &[GroupKey::Model, GroupKey::Horizon]);
    let mut rows = Vec::new();
    let mut models: Vec<&str> = records.iter().map(|r| r.model.as_str()).collect();
    models.sort();
    models.dedup();
    for model in models {
        let mut mine: Vec<&AggregateRow> = per_horizon.iter().filter(|r| r.group[0] == model).collect();
        mine.sort_by_key(|r| r.group[1].parse::<usize>().unwrap_or(usize::MAX));
        rows.extend(mine.iter().map(|r| (*r).clone()));
        if let Some(pooled) = GroupMetrics::from_records(records.iter().filter(|r| r.model == model)) {
            rows.push(AggregateRow {
                group: vec![model.to_string(), ALL_HORIZONS.to_string()],
                metrics: pooled,
            });
        }
        let k = mine.len() as f64;
        if k > 0.0 {
            let metrics = GroupMetrics {
                n_targets: mine.iter().map(|r| r.metrics.n_targets).sum(),
                n_excluded: mine.iter().map(|r| r.metrics.n_excluded).sum(),
                wis: mine.iter().map(|r| r.metrics.wis).sum::<f64>() / k,
                nwis: mean_defined(mine.iter().map(|r| r.metrics.nwis)),
                mape: mean_defined(mine.iter().map(|r| r.metrics.mape)),
                nmse: mean_defined(mine.iter().map(|r| r.metrics.nmse)),
            };
            rows.push(AggregateRow {
                group: vec![model.to_string(), MEAN_OVER_HORIZONS.to_string()],
                metrics,
            });
        }
    }
    rows
}

/// Per-group metrics averaged over minibatches of outbreaks, each batch
/// weighted equally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinibatchRow {
    pub group: Vec<String>,
    pub n_batches: usize,
    pub wis: f64,
    pub nwis: Option<f64>,
    pub mape: Option<f64>,
    pub nmse: Option<f64>,
}

pub fn minibatch_summary(records: &[ScoreRecord], batches: &[Vec<String>], keys: &[GroupKey]) -> Vec<MinibatchRow> {
    let mut per_group: BTreeMap<Vec<String>, Vec<GroupMetrics>> = BTreeMap::new();
    for batch in batches {
        let members: HashSet<&str> = batch.iter().map(String::as_str).collect();
        let in_batch: Vec<ScoreRecord> = records
            .iter()
            .filter(|r| members.contains(r.unique_id.as_str()))
            .cloned()
            .collect();
        for row in aggregate(&in_batch, keys) {
            per_group.entry(row.group).or_default().push(row.metrics);
        }
    }
    per_group
        .into_iter()
        .map(|(group, ms)| MinibatchRow {
            group,
            n_batches: ms.len(),
            wis: ms.iter().map(|m| m.wis).sum::<f64>() / ms.len() as f64,
            nwis: mean_defined(ms.iter().map(|m| m.nwis)),
            mape: mean_defined(ms.iter().map(|m| m.mape)),
            nmse: mean_defined(ms.iter().map(|m| m.nmse)),
        })
        .collect()
}
