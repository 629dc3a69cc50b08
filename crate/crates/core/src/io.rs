//! Readers and writers for every interchange file.
//!
//! All files are UTF-8, comma-delimited, LF-terminated, with a header row.
//! Values use the shortest text that parses back to the same `f64`; quantile
//! levels use their fixed canonical text.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analytics::OutbreakMeasures;
use crate::calendar::MmwrWeek;
use crate::error::{Error, Result};
use crate::forecast::{QuantileForecast, QUANTILE_LEVELS, QUANTILE_LEVEL_TEXT};
use crate::ingest::{weekly_from_raw, RawSeries, Resolution};
use crate::scoring::{AggregateRow, MinibatchRow, ScoreRecord};
use crate::types::{validate_outbreak, Outbreak, Outcome, SeriesKey, WeeklySeries, MAX_CORE_WEEKS, MAX_OUTBREAK_WEEKS};

/// Shortest round-trip text for a value; negative zero prints as `0`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).from_reader(r)
}

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d").map_err(|_| Error::Format(format!("`{s}` is not an ISO-8601 date")))
}

fn parse_saturday(s: &str) -> Result<MmwrWeek> {
    MmwrWeek::from_saturday(parse_date(s)?)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("{what} `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Format(format!("{what} `{s}` is not finite")));
    }
    Ok(v)
}

fn check_header(found: &csv::StringRecord, expected: &[String]) -> Result<()> {
    if found.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Format(format!(
            "header mismatch: expected `{}`, found `{}`",
            expected.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// A row a reader refused, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

// ---------------------------------------------------------------- outbreaks

pub const OUTBREAK_KEY_COLUMNS: [&str; 7] = [
    "unique_id",
    "disease",
    "location",
    "event",
    "start_date",
    "end_date",
    "duration",
];

/// `unique_id, …, duration, 0, 1, …, 59`.
pub fn outbreak_header() -> Vec<String> {
    OUTBREAK_KEY_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain((0..MAX_OUTBREAK_WEEKS).map(|i| i.to_string()))
        .collect()
}

/// Writes the outbreak table sorted by `unique_id`.
pub fn write_outbreaks<W: Write>(w: W, outbreaks: &[Outbreak]) -> Result<()> {
    let mut sorted: Vec<&Outbreak> = outbreaks.iter().collect();
    sorted.sort_by(|a, b| a.unique_id.cmp(&b.unique_id));
    let mut out = csv_writer(w);
    out.write_record(outbreak_header())?;
    for o in sorted {
        if o.duration() > MAX_OUTBREAK_WEEKS {
            return Err(Error::LayoutOverflow {
                id: o.unique_id.clone(),
                duration: o.duration(),
                max: MAX_OUTBREAK_WEEKS,
            });
        }
        let report = validate_outbreak(o);
        if !report.passed() {
            return Err(Error::Format(format!("{}: {}", o.unique_id, report.describe())));
        }
        let mut row = vec![
            o.unique_id.clone(),
            o.key.disease().to_string(),
            o.key.location().to_string(),
            o.key.outcome().to_string(),
            o.start_week.end_date().to_string(),
            o.end_week.end_date().to_string(),
            o.duration().to_string(),
        ];
        row.extend(o.values.iter().map(|v| format_value(*v)));
        row.resize(OUTBREAK_KEY_COLUMNS.len() + MAX_OUTBREAK_WEEKS, String::new());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Accepted outbreaks plus rows that failed to parse or validate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutbreakTable {
    pub outbreaks: Vec<Outbreak>,
    pub rejected: Vec<RowError>,
}

/// Core offsets when no sidecar is available: the whole row if it fits the
/// core cap, otherwise the excess split as padding, earlier side first.
pub fn default_core_offsets(duration: usize) -> (usize, usize) {
    let excess = duration.saturating_sub(MAX_CORE_WEEKS);
    let before = excess.div_ceil(2);
    (before, duration.saturating_sub(1 + excess / 2))
}

fn parse_outbreak_row(rec: &csv::StringRecord) -> Result<Outbreak> {
    let width = OUTBREAK_KEY_COLUMNS.len() + MAX_OUTBREAK_WEEKS;
    if rec.len() != width {
        return Err(Error::Format(format!("{} fields, expected {width}", rec.len())));
    }
    let unique_id = rec[0].to_string();
    let outcome: Outcome = rec[3].parse()?;
    let key = SeriesKey::new(&rec[1], &rec[2], outcome)?;
    let start_week = parse_saturday(&rec[4])?;
    let end_week = parse_saturday(&rec[5])?;
    let duration: usize = rec[6]
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("duration `{}` is not an integer", &rec[6])))?;
    let cells: Vec<&str> = rec.iter().skip(OUTBREAK_KEY_COLUMNS.len()).collect();
    let populated = cells.iter().take_while(|c| !c.trim().is_empty()).count();
    if cells[populated..].iter().any(|c| !c.trim().is_empty()) {
        return Err(Error::Format("week cells are not a contiguous prefix".into()));
    }
    if populated != duration {
        return Err(Error::Format(format!(
            "duration {duration} but {populated} populated week cells"
        )));
    }
    let mut values = Vec::with_capacity(duration);
    for (i, c) in cells[..populated].iter().enumerate() {
        let v = parse_f64(c, &format!("week {i}"))?;
        if v < 0.0 {
            return Err(Error::InvalidObservation(format!("week {i} has negative value {v}")));
        }
        values.push(v);
    }
    let (core_start_offset, core_end_offset) = default_core_offsets(duration);
    let o = Outbreak {
        unique_id,
        key,
        start_week,
        end_week,
        values,
        core_start_offset,
        core_end_offset,
    };
    let report = validate_outbreak(&o);
    if !report.passed() {
        return Err(Error::Format(report.describe()));
    }
    Ok(o)
}

/// Reads an outbreak table. A bad header fails the whole file; bad rows are
/// collected in `rejected` and the rest are loaded.
pub fn read_outbreaks<R: Read>(r: R) -> Result<OutbreakTable> {
    let mut rdr = csv_reader(r);
    check_header(rdr.headers()?, &outbreak_header())?;
    let mut table = OutbreakTable::default();
    for rec in rdr.records() {
        let rec = rec?;
        match parse_outbreak_row(&rec) {
            Ok(o) => table.outbreaks.push(o),
            Err(e) => table.rejected.push(RowError {
                line: line_of(&rec),
                message: e.to_string(),
            }),
        }
    }
    Ok(table)
}

pub const CORE_OFFSET_HEADER: [&str; 3] = ["unique_id", "core_start_offset", "core_end_offset"];

/// Sidecar path holding the core offsets of an outbreak table.
pub fn core_offsets_path(outbreak_file: &Path) -> PathBuf {
    let mut name = outbreak_file.file_name().unwrap_or_default().to_os_string();
    name.push(".core.csv");
    outbreak_file.with_file_name(name)
}

pub fn write_core_offsets<W: Write>(w: W, outbreaks: &[Outbreak]) -> Result<()> {
    let mut sorted: Vec<&Outbreak> = outbreaks.iter().collect();
    sorted.sort_by(|a, b| a.unique_id.cmp(&b.unique_id));
    let mut out = csv_writer(w);
    out.write_record(CORE_OFFSET_HEADER)?;
    for o in sorted {
        out.write_record([
            o.unique_id.clone(),
            o.core_start_offset.to_string(),
            o.core_end_offset.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_core_offsets<R: Read>(r: R) -> Result<HashMap<String, (usize, usize)>> {
    let mut rdr = csv_reader(r);
    let header: Vec<String> = CORE_OFFSET_HEADER.iter().map(|s| s.to_string()).collect();
    check_header(rdr.headers()?, &header)?;
    let mut map = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<usize> {
            rec.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Format(format!("line {}: bad core offset", line_of(&rec))))
        };
        map.insert(rec[0].to_string(), (parse(1)?, parse(2)?));
    }
    Ok(map)
}

/// Applies sidecar offsets; an outbreak whose offsets fail validation is
/// moved to `rejected`.
pub fn apply_core_offsets(table: &mut OutbreakTable, offsets: &HashMap<String, (usize, usize)>) {
    let mut kept = Vec::with_capacity(table.outbreaks.len());
    for mut o in std::mem::take(&mut table.outbreaks) {
        if let Some(&(s, e)) = offsets.get(&o.unique_id) {
            o.core_start_offset = s;
            o.core_end_offset = e;
        }
        let report = validate_outbreak(&o);
        if report.passed() {
            kept.push(o);
        } else {
            table.rejected.push(RowError {
                line: 0,
                message: format!("{}: {}", o.unique_id, report.describe()),
            });
        }
    }
    table.outbreaks = kept;
}

/// Writes the outbreak table and its core-offset sidecar.
pub fn save_outbreaks(path: &Path, outbreaks: &[Outbreak]) -> Result<()> {
    write_outbreaks(File::create(path)?, outbreaks)?;
    write_core_offsets(File::create(core_offsets_path(path))?, outbreaks)
}

/// Reads an outbreak table, applying its sidecar when present.
pub fn load_outbreaks(path: &Path) -> Result<OutbreakTable> {
    let mut table = read_outbreaks(File::open(path)?)?;
    let sidecar = core_offsets_path(path);
    if sidecar.exists() {
        let offsets = read_core_offsets(File::open(sidecar)?)?;
        apply_core_offsets(&mut table, &offsets);
    }
    Ok(table)
}

// ---------------------------------------------------------------- forecasts

pub const HUBVERSE_HEADER: [&str; 10] = [
    "model_id",
    "unique_id",
    "reference_date",
    "target",
    "horizon",
    "location",
    "target_end_date",
    "output_type",
    "output_type_id",
    "value",
];

/// `"<h> wk inc <outcome>"` with the outcome in lower case.
pub fn hub_target(horizon: usize, outcome: Outcome) -> String {
    format!("{horizon} wk inc {}", outcome.as_str().to_ascii_lowercase())
}

/// What forecast files need to know about each outbreak.
#[derive(Debug, Clone, Default)]
pub struct OutbreakIndex {
    entries: HashMap<String, (MmwrWeek, SeriesKey, usize)>,
}

impl OutbreakIndex {
    pub fn new(outbreaks: &[Outbreak]) -> Self {
        Self {
            entries: outbreaks
                .iter()
                .map(|o| (o.unique_id.clone(), (o.start_week, o.key.clone(), o.duration())))
                .collect(),
        }
    }

    fn get(&self, id: &str) -> Option<&(MmwrWeek, SeriesKey, usize)> {
        self.entries.get(id)
    }
}

/// Writes forecasts as one row per quantile, sorted by model, outbreak,
/// reference date, horizon and level.
pub fn write_hubverse<W: Write>(w: W, forecasts: &[QuantileForecast], index: &OutbreakIndex) -> Result<()> {
    let mut sorted: Vec<&QuantileForecast> = forecasts.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.model, &a.unique_id, a.issuance_week_index, a.horizon)
            .cmp(&(&b.model, &b.unique_id, b.issuance_week_index, b.horizon))
    });
    let mut out = csv_writer(w);
    out.write_record(HUBVERSE_HEADER)?;
    for f in sorted {
        f.validate()?;
        let (start, key, _) = index
            .get(&f.unique_id)
            .ok_or_else(|| Error::Format(format!("forecast for unknown outbreak `{}`", f.unique_id)))?;
        let reference = start.plus_weeks(f.issuance_week_index as i64)?;
        let target_end = reference.plus_weeks(f.horizon as i64)?;
        let target = hub_target(f.horizon, key.outcome());
        for (level, value) in QUANTILE_LEVEL_TEXT.iter().zip(&f.quantiles) {
            out.write_record([
                f.model.as_str(),
                f.unique_id.as_str(),
                &reference.end_date().to_string(),
                &target,
                &f.horizon.to_string(),
                key.location(),
                &target_end.end_date().to_string(),
                "quantile",
                level,
                &format_value(*value),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// A forecast as stored, keyed by calendar date rather than week index.
#[derive(Debug, Clone, PartialEq)]
pub struct HubForecast {
    pub model: String,
    pub unique_id: String,
    pub reference_date: NaiveDate,
    pub target: String,
    pub horizon: usize,
    pub location: String,
    pub target_end_date: NaiveDate,
    pub quantiles: Vec<f64>,
}

type HubGroupKey = (String, String, NaiveDate, usize);

struct HubGroup {
    target: String,
    location: String,
    target_end_date: NaiveDate,
    values: [Option<f64>; 23],
}

/// Reads a quantile forecast file. Every target must carry all 23 levels
/// exactly once with non-decreasing values; any violation fails the file.
/// Row order does not matter.
pub fn read_hubverse<R: Read>(r: R) -> Result<Vec<HubForecast>> {
    let mut rdr = csv_reader(r);
    let header: Vec<String> = HUBVERSE_HEADER.iter().map(|s| s.to_string()).collect();
    check_header(rdr.headers()?, &header)?;
    let mut groups: BTreeMap<HubGroupKey, HubGroup> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let fail = |msg: String| Error::Format(format!("line {line}: {msg}"));
        if rec.len() != HUBVERSE_HEADER.len() {
            return Err(fail(format!("{} fields, expected {}", rec.len(), HUBVERSE_HEADER.len())));
        }
        let reference = parse_saturday(&rec[2]).map_err(|e| fail(e.to_string()))?;
        let horizon: usize = rec[4]
            .trim()
            .parse()
            .ok()
            .filter(|h| *h >= 1)
            .ok_or_else(|| fail(format!("horizon `{}` is not a positive integer", &rec[4])))?;
        let target_end = parse_saturday(&rec[6]).map_err(|e| fail(e.to_string()))?;
        if reference.weeks_until(&target_end) != horizon as i64 {
            return Err(fail(format!(
                "target_end_date {} is not {horizon} weeks after {}",
                target_end.end_date(),
                reference.end_date()
            )));
        }
        if !rec[3].starts_with(&format!("{horizon} wk ")) {
            return Err(fail(format!("target `{}` does not match horizon {horizon}", &rec[3])));
        }
        if &rec[7] != "quantile" {
            return Err(fail(format!("output_type `{}` is not `quantile`", &rec[7])));
        }
        let level = parse_f64(&rec[8], "output_type_id").map_err(|e| fail(e.to_string()))?;
        let slot = QUANTILE_LEVELS
            .iter()
            .position(|l| *l == level)
            .ok_or_else(|| fail(format!("`{}` is not one of the 23 quantile levels", &rec[8])))?;
        let value = parse_f64(&rec[9], "value").map_err(|e| fail(e.to_string()))?;
        if value < 0.0 {
            return Err(fail(format!("negative quantile value {value}")));
        }
        let key = (rec[0].to_string(), rec[1].to_string(), reference.end_date(), horizon);
        let group = groups.entry(key).or_insert_with(|| HubGroup {
            target: rec[3].to_string(),
            location: rec[5].to_string(),
            target_end_date: target_end.end_date(),
            values: [None; 23],
        });
        if group.target != rec[3] || group.location != rec[5] {
            return Err(fail("target or location differs within one forecast".into()));
        }
        if group.values[slot].replace(value).is_some() {
            return Err(fail(format!("level {} given twice", QUANTILE_LEVEL_TEXT[slot])));
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((model, unique_id, reference_date, horizon), g) in groups {
        if let Some(missing) = g.values.iter().position(Option::is_none) {
            return Err(Error::Format(format!(
                "{model} {unique_id} {reference_date} h={horizon}: missing quantile level {}",
                QUANTILE_LEVEL_TEXT[missing]
            )));
        }
        let quantiles: Vec<f64> = g.values.iter().map(|v| v.unwrap()).collect();
        QuantileForecast {
            unique_id: unique_id.clone(),
            model: model.clone(),
            issuance_week_index: 0,
            horizon,
            quantiles: quantiles.clone(),
        }
        .validate()
        .map_err(|e| Error::Format(format!("{reference_date}: {e}")))?;
        out.push(HubForecast {
            model,
            unique_id,
            reference_date,
            target: g.target,
            horizon,
            location: g.location,
            target_end_date: g.target_end_date,
            quantiles,
        });
    }
    Ok(out)
}

/// A stored forecast that could not be tied to an outbreak week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedForecast {
    pub model: String,
    pub unique_id: String,
    pub reference_date: NaiveDate,
    pub horizon: usize,
    pub reason: String,
}

/// Maps stored forecasts onto outbreak week indices.
pub fn resolve_hubverse(
    rows: Vec<HubForecast>,
    index: &OutbreakIndex,
) -> (Vec<QuantileForecast>, Vec<UnresolvedForecast>) {
    let mut resolved = Vec::new();
    let mut unresolved = Vec::new();
    for f in rows {
        let reason = match index.get(&f.unique_id) {
            None => Some("no outbreak with this unique_id".to_string()),
            Some((start, key, duration)) => {
                let u = (f.reference_date - start.end_date()).num_days() / 7;
                if key.location() != f.location {
                    Some(format!("location `{}` differs from the outbreak's `{}`", f.location, key.location()))
                } else if u < 0 || u as usize >= *duration {
                    Some(format!("reference date {} lies outside the outbreak", f.reference_date))
                } else {
                    resolved.push(QuantileForecast {
                        unique_id: f.unique_id.clone(),
                        model: f.model.clone(),
                        issuance_week_index: u as usize,
                        horizon: f.horizon,
                        quantiles: f.quantiles.clone(),
                    });
                    None
                }
            }
        };
        if let Some(reason) = reason {
            unresolved.push(UnresolvedForecast {
                model: f.model,
                unique_id: f.unique_id,
                reference_date: f.reference_date,
                horizon: f.horizon,
                reason,
            });
        }
    }
    (resolved, unresolved)
}

// ---------------------------------------------------------------- series

pub const SERIES_HEADER: [&str; 5] = ["disease", "location", "event", "date", "value"];

/// One row per week, dated by the week's Saturday; missing weeks are empty.
pub fn write_series<W: Write>(w: W, series: &[WeeklySeries]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SERIES_HEADER)?;
    for s in series {
        for (t, v) in s.values.iter().enumerate() {
            out.write_record([
                s.key.disease(),
                s.key.location(),
                s.key.outcome().as_str(),
                &s.week_at(t)?.end_date().to_string(),
                &format_opt(*v),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Dated observations of one series; `None` is a missing value.
pub type Observations = Vec<(NaiveDate, Option<f64>)>;

/// Observation rows grouped by key, in key order.
pub fn read_observations<R: Read>(r: R) -> Result<Vec<(SeriesKey, Observations)>> {
    let mut rdr = csv_reader(r);
    let header: Vec<String> = SERIES_HEADER.iter().map(|s| s.to_string()).collect();
    check_header(rdr.headers()?, &header)?;
    let mut groups: BTreeMap<SeriesKey, Observations> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let row = || -> Result<(SeriesKey, NaiveDate, Option<f64>)> {
            if rec.len() != SERIES_HEADER.len() {
                return Err(Error::Format(format!("{} fields, expected 5", rec.len())));
            }
            let key = SeriesKey::new(&rec[0], &rec[1], rec[2].parse()?)?;
            let date = parse_date(&rec[3])?;
            let value = if rec[4].trim().is_empty() {
                None
            } else {
                Some(parse_f64(&rec[4], "value")?)
            };
            Ok((key, date, value))
        };
        let (key, date, value) = row().map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        groups.entry(key).or_default().push((date, value));
    }
    Ok(groups.into_iter().collect())
}

/// Reads weekly series written by [`write_series`].
pub fn read_series<R: Read>(r: R) -> Result<Vec<WeeklySeries>> {
    read_observations(r)?
        .into_iter()
        .map(|(key, obs)| weekly_from_raw(&RawSeries::new(key, Resolution::Weekly, obs)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub resolution: Resolution,
}

/// Reads a `path,resolution` manifest. Relative paths are taken from the
/// manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut rdr = csv_reader(File::open(path)?);
    check_header(rdr.headers()?, &["path".to_string(), "resolution".to_string()])?;
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != 2 {
            return Err(Error::Format(format!("manifest line {line}: expected 2 fields")));
        }
        let resolution = match rec[1].trim().to_ascii_lowercase().as_str() {
            "daily" => Resolution::Daily,
            "weekly" => Resolution::Weekly,
            other => {
                return Err(Error::Format(format!(
                    "manifest line {line}: resolution `{other}` is not daily or weekly"
                )))
            }
        };
        entries.push(ManifestEntry {
            path: base.join(rec[0].trim()),
            resolution,
        });
    }
    if entries.is_empty() {
        return Err(Error::Format(format!("manifest {} lists no files", path.display())));
    }
    Ok(entries)
}

// ---------------------------------------------------------------- results

pub const MEASURES_HEADER: [&str; 10] = [
    "unique_id",
    "disease",
    "location",
    "event",
    "core_weeks",
    "shannon_entropy_bits",
    "permutation_entropy_bits",
    "permutation_entropy_normalized",
    "skewness",
    "excess_kurtosis",
];

pub fn write_measures<'a, W: Write>(
    w: W,
    rows: impl IntoIterator<Item = (&'a SeriesKey, &'a OutbreakMeasures)>,
) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(MEASURES_HEADER)?;
    for (key, m) in rows {
        out.write_record([
            m.unique_id.clone(),
            key.disease().to_string(),
            key.location().to_string(),
            key.outcome().to_string(),
            m.core_weeks.to_string(),
            format_value(m.shannon_entropy_bits),
            format_opt(m.permutation_entropy_bits),
            format_opt(m.permutation_entropy_normalized),
            format_opt(m.skewness),
            format_opt(m.excess_kurtosis),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub const SCORE_HEADER: [&str; 14] = [
    "unique_id",
    "model",
    "disease",
    "location",
    "event",
    "issuance_week",
    "horizon",
    "observed",
    "point",
    "wis",
    "nwis",
    "ape",
    "squared_error",
    "phase",
];

pub fn write_score_records<W: Write>(w: W, records: &[ScoreRecord]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SCORE_HEADER)?;
    for r in records {
        out.write_record([
            r.unique_id.clone(),
            r.model.clone(),
            r.disease.clone(),
            r.location.clone(),
            r.outcome.clone(),
            r.issuance_week_index.to_string(),
            r.horizon.to_string(),
            format_value(r.observed),
            format_value(r.point),
            format_value(r.wis),
            format_opt(r.nwis),
            format_opt(r.ape),
            format_value(r.squared_error),
            r.phase.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_aggregate<W: Write>(w: W, key_names: &[&str], rows: &[AggregateRow]) -> Result<()> {
    let mut out = csv_writer(w);
    let mut header: Vec<&str> = key_names.to_vec();
    header.extend(["n_targets", "n_excluded", "wis", "nwis", "mape", "nmse"]);
    out.write_record(&header)?;
    for r in rows {
        let mut row = r.group.clone();
        let m = &r.metrics;
        row.extend([
            m.n_targets.to_string(),
            m.n_excluded.to_string(),
            format_value(m.wis),
            format_opt(m.nwis),
            format_opt(m.mape),
            format_opt(m.nmse),
        ]);
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_minibatch_summary<W: Write>(w: W, key_names: &[&str], rows: &[MinibatchRow]) -> Result<()> {
    let mut out = csv_writer(w);
    let mut header: Vec<&str> = key_names.to_vec();
    header.extend(["n_batches", "wis", "nwis", "mape", "nmse"]);
    out.write_record(&header)?;
    for r in rows {
        let mut row = r.group.clone();
        row.extend([
            r.n_batches.to_string(),
            format_value(r.wis),
            format_opt(r.nwis),
            format_opt(r.mape),
            format_opt(r.nmse),
        ]);
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
