//! Derivative-based outbreak segmentation.
//!
//! A series is smoothed with a Gaussian kernel. Cut points are weeks where
//! the smoothed first derivative crosses from strictly negative to
//! non-negative (troughs), optionally filtered by a bound on the second
//! derivative. Segments between consecutive cuts (and the series ends)
//! whose length lies in `[min_core_weeks, max_core_weeks]` become outbreaks,
//! padded with real neighbouring data on each side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Outbreak, SeriesKey, WeeklySeries, MAX_CORE_WEEKS, MIN_CORE_WEEKS, PAD_WEEKS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentationConfig {
    /// Standard deviation of the smoothing kernel, in weeks.
    pub kernel_bandwidth_weeks: f64,
    /// Accept a cut only when the smoothed second derivative there is below
    /// this bound. `None` accepts every trough.
    pub second_derivative_threshold: Option<f64>,
    pub min_core_weeks: usize,
    pub max_core_weeks: usize,
    pub pad_weeks: usize,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            kernel_bandwidth_weeks: 2.0,
            second_derivative_threshold: None,
            min_core_weeks: MIN_CORE_WEEKS,
            max_core_weeks: MAX_CORE_WEEKS,
            pad_weeks: PAD_WEEKS,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kernel_bandwidth_weeks > 0.0 && self.kernel_bandwidth_weeks.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "kernel_bandwidth_weeks must be positive, got {}",
                self.kernel_bandwidth_weeks
            )));
        }
        if self.min_core_weeks == 0 || self.min_core_weeks > self.max_core_weeks {
            return Err(Error::InvalidConfig(format!(
                "need 0 < min_core_weeks <= max_core_weeks, got {} and {}",
                self.min_core_weeks, self.max_core_weeks
            )));
        }
        if self.second_derivative_threshold.is_some_and(f64::is_nan) {
            return Err(Error::InvalidConfig("second_derivative_threshold is NaN".into()));
        }
        Ok(())
    }

    fn threshold(&self) -> f64 {
        self.second_derivative_threshold.unwrap_or(f64::INFINITY)
    }
}

/// Diagnostics from cut-point detection on one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutPointReport {
    pub key: Option<SeriesKey>,
    pub smoothed: Vec<f64>,
    pub first_derivative: Vec<f64>,
    pub second_derivative: Vec<f64>,
    /// Every negative-to-non-negative crossing of the first derivative.
    pub candidates: Vec<usize>,
    /// Candidates that pass the second-derivative filter.
    pub accepted: Vec<usize>,
}

/// Maps an out-of-range index back into `0..n` by half-sample reflection
/// (`d c b a | a b c d | d c b a`).
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Gaussian smoothing truncated at ±4σ with reflected boundaries.
///
/// Weights are renormalised at every position, so constant inputs come back
/// unchanged.
pub fn gaussian_smooth(x: &[f64], sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let radius = ((4.0 * sigma).floor() as isize).max(1);
    let weights: Vec<f64> = (-radius..=radius)
        .map(|j| (-((j * j) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    (0..n as isize)
        .map(|t| {
            let mut acc = 0.0;
            let mut norm = 0.0;
            for (w, j) in weights.iter().zip(-radius..=radius) {
                acc += w * x[reflect(t + j, n)];
                norm += w;
            }
            acc / norm
        })
        .collect()
}

fn gradient(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|t| match t {
            0 => x[1] - x[0],
            t if t == n - 1 => x[n - 1] - x[n - 2],
            t => (x[t + 1] - x[t - 1]) / 2.0,
        })
        .collect()
}

/// First and second derivatives: central differences inside, one-sided at
/// the ends. The second derivative differentiates the first.
pub fn derivatives(x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: x.len(),
        });
    }
    let first = gradient(x);
    let second = gradient(&first);
    Ok((first, second))
}

/// Locates troughs of the smoothed series.
pub fn detect_cutpoints(x: &[f64], cfg: &SegmentationConfig) -> Result<CutPointReport> {
    cfg.validate()?;
    let needed = cfg.min_core_weeks.max(3);
    if x.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: x.len(),
        });
    }
    let smoothed = gaussian_smooth(x, cfg.kernel_bandwidth_weeks);
    let (first, second) = derivatives(&smoothed)?;
    let candidates: Vec<usize> = (1..first.len())
        .filter(|&t| first[t - 1] < 0.0 && first[t] >= 0.0)
        .collect();
    let threshold = cfg.threshold();
    let accepted = candidates
        .iter()
        .copied()
        .filter(|&t| second[t] < threshold)
        .collect();
    Ok(CutPointReport {
        key: None,
        smoothed,
        first_derivative: first,
        second_derivative: second,
        candidates,
        accepted,
    })
}

/// Half-open `[start, end)` core ranges delimited by cuts and series ends.
pub fn core_ranges(len: usize, cuts: &[usize]) -> Vec<(usize, usize)> {
    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0);
    bounds.extend(cuts.iter().copied().filter(|&c| c > 0 && c < len));
    bounds.push(len);
    bounds.dedup();
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Id assigned to the `n`-th outbreak of a series.
pub fn outbreak_id(key: &SeriesKey, n: usize) -> String {
    format!("{}_{n}", key.slug())
}

/// Splits a complete weekly series into padded outbreaks.
///
/// Segments whose core is constant are not outbreaks.
///
/// Returns the outbreaks and the cut-point diagnostics. Series shorter than
/// the detector needs produce no cuts; their only candidate is the whole
/// series.
pub fn segment(s: &WeeklySeries, cfg: &SegmentationConfig) -> Result<(Vec<Outbreak>, CutPointReport)> {
    cfg.validate()?;
    let values = s.complete_values().ok_or_else(|| {
        Error::InvalidObservation(format!("{}: segmentation needs a series without missing weeks", s.key))
    })?;
    let mut report = if values.len() >= cfg.min_core_weeks.max(3) {
        detect_cutpoints(&values, cfg)?
    } else {
        CutPointReport {
            key: None,
            smoothed: Vec::new(),
            first_derivative: Vec::new(),
            second_derivative: Vec::new(),
            candidates: Vec::new(),
            accepted: Vec::new(),
        }
    };
    report.key = Some(s.key.clone());

    let n = values.len();
    let mut outbreaks = Vec::new();
    for (core_start, core_end) in core_ranges(n, &report.accepted) {
        let core_len = core_end - core_start;
        if core_len < cfg.min_core_weeks || core_len > cfg.max_core_weeks {
            continue;
        }
        // A constant stretch has no wave in it.
        if values[core_start..core_end].iter().all(|v| *v == values[core_start]) {
            continue;
        }
        let padded_start = core_start.saturating_sub(cfg.pad_weeks);
        let padded_end = (core_end - 1 + cfg.pad_weeks).min(n - 1);
        let outbreak = Outbreak {
            unique_id: outbreak_id(&s.key, outbreaks.len()),
            key: s.key.clone(),
            start_week: s.week_at(padded_start)?,
            end_week: s.week_at(padded_end)?,
            values: values[padded_start..=padded_end].to_vec(),
            core_start_offset: core_start - padded_start,
            core_end_offset: core_end - 1 - padded_start,
        };
        outbreaks.push(outbreak);
    }
    Ok((outbreaks, report))
}
