use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use outbreak_bench::analytics::{measure_outbreak, OutbreakMeasures};
use outbreak_bench::harness::{run_backtest, sample_minibatches, split_outbreaks};
use outbreak_bench::ingest::{ingest_series, Ingested, RawSeries};
use outbreak_bench::io::{self, OutbreakIndex};
use outbreak_bench::scoring::{aggregate, minibatch_summary, model_horizon_table, score_forecasts, GroupKey};
use outbreak_bench::segmentation::segment;
use outbreak_bench::synth::synthetic_corpus;
use outbreak_bench::{Outbreak, SeriesKey, WeeklySeries};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{RunConfig, SplitChoice};

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn csv_out(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(path)?))
}

/// `.csv` files directly under `path`, sorted; or `path` itself if a file.
fn csv_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .with_context(|| format!("reading {}", path.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && !p.to_string_lossy().ends_with(".core.csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .csv files in {}", path.display());
    }
    Ok(files)
}

pub fn synth(out: &Path, seed: u64) -> Result<Value> {
    fs::create_dir_all(out)?;
    let series = synthetic_corpus(seed)?;
    io::write_series(create(&out.join("series.csv"))?, &series)?;
    Ok(json!({ "seed": seed, "series": series.len() }))
}

pub fn ingest(manifest: &Path, out: &Path, cfg: &RunConfig) -> Result<Value> {
    let entries = io::read_manifest(manifest)?;
    let mut raws: BTreeMap<SeriesKey, RawSeries> = BTreeMap::new();
    for entry in &entries {
        let file = File::open(&entry.path).with_context(|| format!("opening {}", entry.path.display()))?;
        for (key, obs) in io::read_observations(file).with_context(|| format!("reading {}", entry.path.display()))? {
            if raws.contains_key(&key) {
                bail!("{key} appears in more than one input file");
            }
            let raw = RawSeries::new(key.clone(), entry.resolution, obs)?;
            raws.insert(key, raw);
        }
    }
    let dir = out.join("series");
    fs::create_dir_all(&dir)?;
    let mut kept = 0;
    let mut dropped = Vec::new();
    for raw in raws.values() {
        match ingest_series(raw, cfg.max_missing_fraction)? {
            Ingested::Series(s) => {
                io::write_series(create(&dir.join(format!("{}.csv", s.key.slug())))?, &[s])?;
                kept += 1;
            }
            Ingested::Dropped { key, reason } => {
                warn!("dropping {key}: {reason}");
                dropped.push(json!({ "key": key.to_string(), "reason": reason }));
            }
        }
    }
    info!("ingested {kept} series, dropped {}", dropped.len());
    Ok(json!({ "files": entries.len(), "series_written": kept, "series_dropped": dropped }))
}

fn load_series(path: &Path) -> Result<Vec<WeeklySeries>> {
    let mut all = Vec::new();
    for f in csv_files(path)? {
        all.extend(io::read_series(File::open(&f)?).with_context(|| format!("reading {}", f.display()))?);
    }
    let mut seen = HashSet::new();
    for s in &all {
        if !seen.insert(s.key.clone()) {
            bail!("{} appears more than once under {}", s.key, path.display());
        }
    }
    all.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(all)
}

pub fn segment_cmd(series: &Path, out: &Path, cfg: &RunConfig) -> Result<Value> {
    let series = load_series(series)?;
    let results: Vec<_> = series.par_iter().map(|s| (s, segment(s, &cfg.segmentation))).collect();
    let cut_dir = out.join("cutpoints");
    fs::create_dir_all(&cut_dir)?;
    let mut outbreaks = Vec::new();
    let mut failed = Vec::new();
    for (s, r) in results {
        match r {
            Ok((obs, report)) => {
                let f = create(&cut_dir.join(format!("{}.json", s.key.slug())))?;
                serde_json::to_writer_pretty(f, &report)?;
                outbreaks.extend(obs);
            }
            Err(e) => {
                warn!("{}: {e}", s.key);
                failed.push(json!({ "key": s.key.to_string(), "reason": e.to_string() }));
            }
        }
    }
    io::save_outbreaks(&out.join("outbreaks.csv"), &outbreaks)?;
    info!("{} outbreaks from {} series", outbreaks.len(), series.len());
    Ok(json!({ "series": series.len(), "outbreaks": outbreaks.len(), "series_failed": failed }))
}

fn load_outbreaks(path: &Path) -> Result<(Vec<Outbreak>, usize)> {
    let table = io::load_outbreaks(path).with_context(|| format!("reading {}", path.display()))?;
    for r in &table.rejected {
        warn!("{} line {}: {}", path.display(), r.line, r.message);
    }
    Ok((table.outbreaks, table.rejected.len()))
}

const HISTOGRAM_BINS: usize = 10;

type MeasureFn = fn(&OutbreakMeasures) -> Option<f64>;

fn write_histograms(path: &Path, rows: &[(&Outbreak, OutbreakMeasures)]) -> Result<()> {
    let measures: [(&str, MeasureFn); 4] = [
        ("shannon_entropy_bits", |m| Some(m.shannon_entropy_bits)),
        ("permutation_entropy_normalized", |m| m.permutation_entropy_normalized),
        ("skewness", |m| m.skewness),
        ("excess_kurtosis", |m| m.excess_kurtosis),
    ];
    let diseases: BTreeSet<&str> = rows.iter().map(|(o, _)| o.key.disease()).collect();
    let mut w = csv_out(path)?;
    w.write_record(["measure", "disease", "bin", "lower", "upper", "count"])?;
    for (name, get) in measures {
        let values: Vec<(&str, f64)> = rows
            .iter()
            .filter_map(|(o, m)| get(m).map(|v| (o.key.disease(), v)))
            .collect();
        if values.is_empty() {
            continue;
        }
        let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        let bin_of = |v: f64| {
            if width > 0.0 {
                (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1)
            } else {
                0
            }
        };
        for disease in &diseases {
            let mut counts = [0usize; HISTOGRAM_BINS];
            for (_, v) in values.iter().filter(|(d, _)| d == disease) {
                counts[bin_of(*v)] += 1;
            }
            for (b, c) in counts.iter().enumerate() {
                w.write_record([
                    name.to_string(),
                    disease.to_string(),
                    b.to_string(),
                    io::format_value(lo + width * b as f64),
                    io::format_value(if b + 1 == HISTOGRAM_BINS { hi } else { lo + width * (b + 1) as f64 }),
                    c.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn analyze(outbreaks: &Path, out: &Path) -> Result<Value> {
    let (outbreaks, rejected) = load_outbreaks(outbreaks)?;
    fs::create_dir_all(out)?;
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for o in &outbreaks {
        match measure_outbreak(o) {
            Ok(m) => rows.push((o, m)),
            Err(e) => {
                warn!("{}: {e}", o.unique_id);
                failed.push(json!({ "unique_id": o.unique_id, "reason": e.to_string() }));
            }
        }
    }
    io::write_measures(create(&out.join("measures.csv"))?, rows.iter().map(|(o, m)| (&o.key, m)))?;
    write_histograms(&out.join("histograms.csv"), &rows)?;
    Ok(json!({ "outbreaks": outbreaks.len(), "rows_rejected": rejected, "measured": rows.len(), "failed": failed }))
}

pub fn backtest(outbreaks: &Path, out: &Path, cfg: &RunConfig) -> Result<Value> {
    let models = cfg.model_kinds()?;
    let levels = cfg.levels()?;
    let (outbreaks, rejected) = load_outbreaks(outbreaks)?;
    let ids: Vec<String> = outbreaks.iter().map(|o| o.unique_id.clone()).collect();
    let split = split_outbreaks(&ids, &cfg.harness)?;
    fs::create_dir_all(out.join("forecasts"))?;
    let mut w = csv_out(&out.join("split.csv"))?;
    w.write_record(["unique_id", "split"])?;
    let mut labelled: Vec<(&String, &str)> = split
        .train
        .iter()
        .map(|id| (id, "train"))
        .chain(split.val.iter().map(|id| (id, "val")))
        .chain(split.test.iter().map(|id| (id, "test")))
        .collect();
    labelled.sort();
    for (id, name) in labelled {
        w.write_record([id.as_str(), name])?;
    }
    w.flush()?;

    let chosen: HashSet<&String> = match cfg.backtest_split {
        SplitChoice::Train => split.train.iter().collect(),
        SplitChoice::Val => split.val.iter().collect(),
        SplitChoice::Test => split.test.iter().collect(),
        SplitChoice::All => ids.iter().collect(),
    };
    let selected: Vec<Outbreak> = outbreaks.into_iter().filter(|o| chosen.contains(&o.unique_id)).collect();
    let index = OutbreakIndex::new(&selected);

    let mut skipped_w = csv_out(&out.join("skipped.csv"))?;
    skipped_w.write_record(["model", "unique_id", "issuance_week", "reason"])?;
    let mut per_model = serde_json::Map::new();
    for model in models {
        let result = run_backtest(&selected, model, &cfg.harness, &levels)?;
        io::write_hubverse(
            create(&out.join("forecasts").join(format!("{}.csv", model.name())))?,
            &result.forecasts,
            &index,
        )?;
        for s in &result.skipped {
            skipped_w.write_record([model.name(), &s.unique_id, &s.issuance_week_index.to_string(), &s.reason])?;
        }
        info!("{}: {} forecasts, {} skipped fits", model.name(), result.forecasts.len(), result.skipped.len());
        per_model.insert(
            model.name().to_string(),
            json!({ "forecasts": result.forecasts.len(), "skipped_fits": result.skipped.len() }),
        );
    }
    skipped_w.flush()?;
    Ok(json!({
        "rows_rejected": rejected,
        "split": { "train": split.train.len(), "val": split.val.len(), "test": split.test.len() },
        "outbreaks_forecast": selected.len(),
        "models": per_model,
    }))
}

fn table_name(keys: &[GroupKey]) -> String {
    let names: Vec<&str> = keys.iter().map(|k| k.name()).collect();
    format!("by_{}.csv", names.join("_"))
}

pub fn score(forecasts: &[PathBuf], outbreaks: &Path, out: &Path, group_by: &[GroupKey], cfg: &RunConfig) -> Result<Value> {
    let (outbreaks, rejected) = load_outbreaks(outbreaks)?;
    let index = OutbreakIndex::new(&outbreaks);
    let mut resolved = Vec::new();
    let mut unresolved = Vec::new();
    for path in forecasts {
        for f in csv_files(path)? {
            let rows = io::read_hubverse(File::open(&f)?).with_context(|| format!("reading {}", f.display()))?;
            let (ok, missing) = io::resolve_hubverse(rows, &index);
            resolved.extend(ok);
            unresolved.extend(missing);
        }
    }
    let scored = score_forecasts(&resolved, &outbreaks);
    fs::create_dir_all(out)?;
    let mut w = csv_out(&out.join("unmatched.csv"))?;
    w.write_record(["model", "unique_id", "reference_date", "horizon", "reason"])?;
    for u in &unresolved {
        warn!("{} {} {} h={}: {}", u.model, u.unique_id, u.reference_date, u.horizon, u.reason);
        w.write_record([&u.model, &u.unique_id, &u.reference_date.to_string(), &u.horizon.to_string(), &u.reason])?;
    }
    for u in &scored.unmatched {
        warn!("{} {} u={} h={}: {}", u.model, u.unique_id, u.issuance_week_index, u.horizon, u.reason);
        let reference = index_date(&outbreaks, &u.unique_id, u.issuance_week_index);
        w.write_record([&u.model, &u.unique_id, &reference, &u.horizon.to_string(), &u.reason])?;
    }
    w.flush()?;

    let records = &scored.records;
    io::write_score_records(create(&out.join("scores.csv"))?, records)?;
    io::write_aggregate(create(&out.join("by_model_horizon.csv"))?, &["model", "horizon"], &model_horizon_table(records))?;
    let mut tables = vec![
        vec![GroupKey::Model, GroupKey::Phase],
        vec![GroupKey::Disease, GroupKey::Model],
    ];
    if !group_by.is_empty() && !tables.iter().any(|t| t == group_by) {
        tables.push(group_by.to_vec());
    }
    for keys in &tables {
        let names: Vec<&str> = keys.iter().map(|k| k.name()).collect();
        io::write_aggregate(create(&out.join(table_name(keys)))?, &names, &aggregate(records, keys))?;
    }
    let ids: Vec<String> = records
        .iter()
        .map(|r| r.unique_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let batches = sample_minibatches(&ids, &cfg.harness);
    io::write_minibatch_summary(
        create(&out.join("minibatch_by_model.csv"))?,
        &["model"],
        &minibatch_summary(records, &batches, &[GroupKey::Model]),
    )?;
    Ok(json!({
        "rows_rejected": rejected,
        "forecasts_read": resolved.len() + unresolved.len(),
        "targets_scored": records.len(),
        "targets_unmatched": unresolved.len() + scored.unmatched.len(),
        "targets_excluded_from_relative_metrics": records.iter().filter(|r| r.nwis.is_none()).count(),
    }))
}

fn index_date(outbreaks: &[Outbreak], id: &str, u: usize) -> String {
    outbreaks
        .iter()
        .find(|o| o.unique_id == id)
        .and_then(|o| o.start_week.plus_weeks(u as i64).ok())
        .map(|w| w.end_date().to_string())
        .unwrap_or_default()
}

/// Segment, analyze, backtest and score into one directory.
pub fn run(series: &Path, out: &Path, group_by: &[GroupKey], cfg: &RunConfig) -> Result<Value> {
    fs::create_dir_all(out)?;
    let seg = segment_cmd(series, out, cfg)?;
    let outbreaks = out.join("outbreaks.csv");
    let ana = analyze(&outbreaks, out)?;
    let bt = backtest(&outbreaks, out, cfg)?;
    let sc = score(&[out.join("forecasts")], &outbreaks, out, group_by, cfg)?;
    Ok(json!({ "segment": seg, "analyze": ana, "backtest": bt, "score": sc }))
}
