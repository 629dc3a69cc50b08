//! Shared domain types: series keys, weekly series and outbreaks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::calendar::MmwrWeek;
use crate::error::{Error, Result};

/// Burden indicator reported by a surveillance series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Cases,
    Deaths,
    Hospitalizations,
    PercentUnweighted,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::Cases,
        Outcome::Deaths,
        Outcome::Hospitalizations,
        Outcome::PercentUnweighted,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Cases => "CASES",
            Outcome::Deaths => "DEATHS",
            Outcome::Hospitalizations => "HOSPITALIZATIONS",
            Outcome::PercentUnweighted => "PERCENT UNWEIGHTED",
        }
    }

    /// Counts can be summed over days; percentages cannot.
    pub fn is_additive(&self) -> bool {
        !matches!(self, Outcome::PercentUnweighted)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    /// Accepts the canonical names plus a small static alias table.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace(['_', '-'], " ");
        let outcome = match norm.as_str() {
            "CASES" | "CASE" | "CONFIRMED" | "CONFIRMED CASES" => Outcome::Cases,
            "DEATHS" | "DEATH" => Outcome::Deaths,
            "HOSPITALIZATIONS" | "HOSPITALIZATION" | "HOSP" | "ADMISSIONS"
            | "HOSPITAL ADMISSIONS" => Outcome::Hospitalizations,
            "PERCENT UNWEIGHTED" | "% UNWEIGHTED ILI" | "UNWEIGHTED ILI" | "ILI PERCENT" => {
                Outcome::PercentUnweighted
            }
            _ => return Err(Error::UnknownOutcome(s.to_string())),
        };
        Ok(outcome)
    }
}

/// Identity of a surveillance series: disease, location and outcome.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SeriesKey {
    disease: String,
    location: String,
    outcome: Outcome,
}

impl SeriesKey {
    pub fn new(disease: impl Into<String>, location: impl Into<String>, outcome: Outcome) -> Result<Self> {
        let disease = disease.into().trim().to_string();
        let location = location.into().trim().to_string();
        if disease.is_empty() {
            return Err(Error::InvalidKey("empty disease".into()));
        }
        if location.is_empty() {
            return Err(Error::InvalidKey("empty location".into()));
        }
        Ok(Self {
            disease,
            location,
            outcome,
        })
    }

    pub fn disease(&self) -> &str {
        &self.disease
    }

    pub fn location(&self) -> &str {
        &self.location
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    /// Filesystem- and id-friendly rendering, e.g. `MEASLES_OHIO_CASES`.
    pub fn slug(&self) -> String {
        let clean = |s: &str| -> String {
            s.chars()
                .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '-' })
                .collect()
        };
        format!(
            "{}_{}_{}",
            clean(&self.disease),
            clean(&self.location),
            clean(self.outcome.as_str())
        )
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.disease, self.location, self.outcome)
    }
}

/// A contiguous weekly series. `None` marks a missing week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklySeries {
    pub key: SeriesKey,
    pub start_week: MmwrWeek,
    pub values: Vec<Option<f64>>,
}

impl WeeklySeries {
    pub fn new(key: SeriesKey, start_week: MmwrWeek, values: Vec<Option<f64>>) -> Result<Self> {
        if let Some((t, v)) = values
            .iter()
            .enumerate()
            .find_map(|(t, v)| v.filter(|v| !v.is_finite() || *v < 0.0).map(|v| (t, v)))
        {
            return Err(Error::InvalidObservation(format!(
                "{key}: week {t} has value {v}; values must be finite and non-negative"
            )));
        }
        Ok(Self {
            key,
            start_week,
            values,
        })
    }

    pub fn from_complete(key: SeriesKey, start_week: MmwrWeek, values: Vec<f64>) -> Result<Self> {
        Self::new(key, start_week, values.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// The MMWR week at index `t`.
    pub fn week_at(&self, t: usize) -> Result<MmwrWeek> {
        self.start_week.plus_weeks(t as i64)
    }

    /// Values when no week is missing.
    pub fn complete_values(&self) -> Option<Vec<f64>> {
        self.values.iter().copied().collect()
    }
}

/// Longest allowed core segment.
pub const MAX_CORE_WEEKS: usize = 52;
/// Shortest allowed core segment.
pub const MIN_CORE_WEEKS: usize = 8;
/// Context padding on each side of a core segment.
pub const PAD_WEEKS: usize = 4;
/// Week columns in the outbreak table.
pub const MAX_OUTBREAK_WEEKS: usize = MAX_CORE_WEEKS + 2 * PAD_WEEKS;

/// One segmented outbreak wave with its context padding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outbreak {
    pub unique_id: String,
    pub key: SeriesKey,
    /// First week of the padded segment.
    pub start_week: MmwrWeek,
    /// Last week of the padded segment.
    pub end_week: MmwrWeek,
    pub values: Vec<f64>,
    /// Index into `values` where the unpadded segment begins.
    pub core_start_offset: usize,
    /// Index into `values` of the last week of the unpadded segment.
    pub core_end_offset: usize,
}

impl Outbreak {
    /// Padded length in weeks.
    pub fn duration(&self) -> usize {
        self.values.len()
    }

    pub fn core_len(&self) -> usize {
        (self.core_end_offset + 1).saturating_sub(self.core_start_offset)
    }

    /// Values of the unpadded segment.
    pub fn core_values(&self) -> &[f64] {
        let end = (self.core_end_offset + 1).min(self.values.len());
        let start = self.core_start_offset.min(end);
        &self.values[start..end]
    }
}

/// One failed outbreak check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    EmptyId,
    DurationMismatch,
    DurationBound,
    CoreBounds,
    CoreDurationBound,
    PaddingBound,
    NonFinite,
    NonNegativity,
    WeekSpan,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::EmptyId => "unique_id is empty",
            Violation::DurationMismatch => "end_week does not match start_week + duration - 1",
            Violation::DurationBound => "duration exceeds 60 weeks",
            Violation::CoreBounds => "core offsets lie outside the values",
            Violation::CoreDurationBound => "core length outside [8, 52] weeks",
            Violation::PaddingBound => "padding exceeds four weeks on a side",
            Violation::NonFinite => "non-finite value",
            Violation::NonNegativity => "negative value",
            Violation::WeekSpan => "week arithmetic out of calendar range",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks every stored-field invariant of an outbreak.
pub fn validate_outbreak(o: &Outbreak) -> ValidationReport {
    let mut violations = Vec::new();
    let n = o.values.len();
    if o.unique_id.trim().is_empty() {
        violations.push(Violation::EmptyId);
    }
    if n == 0 || n > MAX_OUTBREAK_WEEKS {
        violations.push(Violation::DurationBound);
    }
    if n > 0 && o.start_week.weeks_until(&o.end_week) != n as i64 - 1 {
        violations.push(Violation::DurationMismatch);
    }
    if o.core_start_offset > o.core_end_offset || o.core_end_offset >= n {
        violations.push(Violation::CoreBounds);
    } else {
        let core = o.core_len();
        if !(MIN_CORE_WEEKS..=MAX_CORE_WEEKS).contains(&core) {
            violations.push(Violation::CoreDurationBound);
        }
        if o.core_start_offset > PAD_WEEKS || n - 1 - o.core_end_offset > PAD_WEEKS {
            violations.push(Violation::PaddingBound);
        }
    }
    if o.values.iter().any(|v| !v.is_finite()) {
        violations.push(Violation::NonFinite);
    }
    if o.values.iter().any(|v| *v < 0.0) {
        violations.push(Violation::NonNegativity);
    }
    ValidationReport { violations }
}
