//! Raw surveillance exports to clean weekly series.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::calendar::{mmwr_week_of, week_ending};
use crate::error::{Error, Result};
use crate::types::{SeriesKey, WeeklySeries};

/// Default upper bound on the fraction of missing weeks a series may carry.
pub const DEFAULT_MAX_MISSING_FRACTION: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Resolution {
    Daily,
    Weekly,
}

/// Observations for one key as they arrive from a source file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    pub key: SeriesKey,
    pub resolution: Resolution,
    pub observations: Vec<(NaiveDate, Option<f64>)>,
}

impl RawSeries {
    /// Sorts observations and checks dates are unique and values admissible.
    pub fn new(
        key: SeriesKey,
        resolution: Resolution,
        mut observations: Vec<(NaiveDate, Option<f64>)>,
    ) -> Result<Self> {
        observations.sort_by_key(|(d, _)| *d);
        for w in observations.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidObservation(format!(
                    "{key}: duplicate observation for {}",
                    w[0].0
                )));
            }
        }
        if let Some((d, v)) = observations
            .iter()
            .find(|(_, v)| v.is_some_and(|v| !v.is_finite() || v < 0.0))
        {
            return Err(Error::InvalidObservation(format!(
                "{key}: {d} has value {v:?}; values must be finite and non-negative"
            )));
        }
        Ok(Self {
            key,
            resolution,
            observations,
        })
    }
}

/// Sums Sunday..Saturday windows of a daily series.
///
/// A week with any absent or missing day is missing. Partial weeks at the
/// start and end of the record are dropped.
pub fn aggregate_daily_to_weekly(raw: &RawSeries) -> Result<WeeklySeries> {
    if raw.resolution != Resolution::Daily {
        return Err(Error::InvalidObservation(format!(
            "{}: expected a daily series",
            raw.key
        )));
    }
    if !raw.key.outcome().is_additive() {
        return Err(Error::NonAdditiveOutcome(raw.key.outcome().to_string()));
    }
    let (Some(first), Some(last)) = (raw.observations.first(), raw.observations.last()) else {
        return Err(Error::EmptySeries(raw.key.to_string()));
    };
    let first_sunday = {
        let back = first.0.weekday().num_days_from_sunday();
        if back == 0 {
            first.0
        } else {
            first.0 + Duration::days(i64::from(7 - back))
        }
    };
    let last_saturday = if last.0.weekday() == Weekday::Sat {
        last.0
    } else {
        week_ending(last.0) - Duration::days(7)
    };
    if last_saturday < first_sunday {
        return Err(Error::EmptySeries(format!(
            "{}: no complete Sunday-Saturday week between {} and {}",
            raw.key, first.0, last.0
        )));
    }

    let n_weeks = ((last_saturday - first_sunday).num_days() + 1) / 7;
    let mut sums = vec![Some(0.0); n_weeks as usize];
    let mut seen = vec![0u8; n_weeks as usize];
    for (date, value) in &raw.observations {
        if *date < first_sunday || *date > last_saturday {
            continue;
        }
        let w = ((*date - first_sunday).num_days() / 7) as usize;
        seen[w] += 1;
        sums[w] = match (sums[w], value) {
            (Some(acc), Some(v)) => Some(acc + v),
            _ => None,
        };
    }
    let values = sums
        .into_iter()
        .zip(seen)
        .map(|(s, n)| if n == 7 { s } else { None })
        .collect();
    let start_week = mmwr_week_of(first_sunday)?;
    WeeklySeries::new(raw.key.clone(), start_week, values)
}

/// Places weekly observations on a contiguous MMWR grid; gaps become missing.
pub fn weekly_from_raw(raw: &RawSeries) -> Result<WeeklySeries> {
    if raw.resolution != Resolution::Weekly {
        return Err(Error::InvalidObservation(format!(
            "{}: expected a weekly series",
            raw.key
        )));
    }
    let (Some(first), Some(last)) = (raw.observations.first(), raw.observations.last()) else {
        return Err(Error::EmptySeries(raw.key.to_string()));
    };
    let start_week = mmwr_week_of(first.0)?;
    let end_week = mmwr_week_of(last.0)?;
    let mut values = vec![None; start_week.weeks_until(&end_week) as usize + 1];
    let mut filled = vec![false; values.len()];
    for (date, value) in &raw.observations {
        let t = start_week.weeks_until(&mmwr_week_of(*date)?) as usize;
        if filled[t] {
            return Err(Error::InvalidObservation(format!(
                "{}: two observations fall in the week ending {}",
                raw.key,
                week_ending(*date)
            )));
        }
        filled[t] = true;
        values[t] = *value;
    }
    WeeklySeries::new(raw.key.clone(), start_week, values)
}

/// Converts a raw series of either resolution to weekly.
pub fn to_weekly(raw: &RawSeries) -> Result<WeeklySeries> {
    match raw.resolution {
        Resolution::Daily => aggregate_daily_to_weekly(raw),
        Resolution::Weekly => weekly_from_raw(raw),
    }
}

/// Fills interior gaps by linear interpolation and trims missing ends.
pub fn impute_linear(s: &WeeklySeries) -> Result<WeeklySeries> {
    let present: Vec<usize> = s
        .values
        .iter()
        .enumerate()
        .filter_map(|(t, v)| v.map(|_| t))
        .collect();
    if present.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: present.len(),
        });
    }
    let first = present[0];
    let last = present[present.len() - 1];
    let mut out = Vec::with_capacity(last - first + 1);
    for pair in present.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (va, vb) = (s.values[a].unwrap(), s.values[b].unwrap());
        out.push(va);
        let span = (b - a) as f64;
        for t in a + 1..b {
            let w = (t - a) as f64 / span;
            out.push(va + (vb - va) * w);
        }
    }
    out.push(s.values[last].unwrap());
    let start_week = s.week_at(first)?;
    WeeklySeries::from_complete(s.key.clone(), start_week, out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SparseDecision {
    Keep,
    Drop { reason: String },
}

impl SparseDecision {
    pub fn is_keep(&self) -> bool {
        matches!(self, SparseDecision::Keep)
    }
}

/// Drops a series whose missing fraction exceeds `max_missing_fraction`.
pub fn filter_sparse(s: &WeeklySeries, max_missing_fraction: f64) -> Result<SparseDecision> {
    if !(0.0..=1.0).contains(&max_missing_fraction) {
        return Err(Error::InvalidConfig(format!(
            "max_missing_fraction {max_missing_fraction} outside [0, 1]"
        )));
    }
    if s.is_empty() {
        return Ok(SparseDecision::Drop {
            reason: "empty series".into(),
        });
    }
    let missing = s.missing_count();
    // Integer comparison keeps the boundary exact: missing/len <= threshold.
    let allowed = (max_missing_fraction * s.len() as f64 + 1e-9).floor() as usize;
    if missing > allowed {
        Ok(SparseDecision::Drop {
            reason: format!(
                "{missing} of {} weeks missing exceeds threshold {max_missing_fraction}",
                s.len()
            ),
        })
    } else {
        Ok(SparseDecision::Keep)
    }
}

/// Outcome of running one raw series through the ingest pipeline.
#[derive(Debug, Clone)]
pub enum Ingested {
    Series(WeeklySeries),
    Dropped { key: SeriesKey, reason: String },
}

/// Weekly alignment, sparse filtering on raw missingness, then imputation.
pub fn ingest_series(raw: &RawSeries, max_missing_fraction: f64) -> Result<Ingested> {
    let weekly = to_weekly(raw)?;
    if let SparseDecision::Drop { reason } = filter_sparse(&weekly, max_missing_fraction)? {
        return Ok(Ingested::Dropped {
            key: raw.key.clone(),
            reason,
        });
    }
    match impute_linear(&weekly) {
        Ok(s) => Ok(Ingested::Series(s)),
        Err(Error::InsufficientData { got, .. }) => Ok(Ingested::Dropped {
            key: raw.key.clone(),
            reason: format!("only {got} observed weeks"),
        }),
        Err(e) => Err(e),
    }
}
