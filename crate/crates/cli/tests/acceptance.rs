//! Acceptance checks. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p outbreak-bench-cli --test acceptance -- --nocapture` to see them.
//!
//! `BLESS=1` regenerates the golden end-to-end outputs.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use outbreak_bench::analytics::{incidence_distribution, permutation_entropy, shannon_entropy};
use outbreak_bench::forecast::{
    fit_ar, fit_ar_order, ModelKind, QuantileForecast, QuantileLevels, QUANTILE_LEVELS,
};
use outbreak_bench::harness::{issuance_windows_for, run_backtest, split_outbreaks, HarnessConfig};
use outbreak_bench::io::{self, OutbreakIndex};
use outbreak_bench::scoring::{interval_score, wis};
use outbreak_bench::segmentation::{segment, SegmentationConfig};
use outbreak_bench::{mmwr_week_of, Error, MmwrWeek, Outbreak, Outcome, SeriesKey, WeeklySeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WIS_TOL: f64 = 1e-9;
const WIS_BUDGET: Duration = Duration::from_secs(5);
const PE_TOL: f64 = 1e-12;
const ENTROPY_TOL: f64 = 1e-12;
const CUT_TOL_WEEKS: i64 = 1;
const AR_COEF_TOL: f64 = 0.1;
const AR_HIT_RATE: f64 = 0.9;
const RW_RATIO_TARGET: f64 = 4.0;
const RW_RATIO_REL_TOL: f64 = 0.25;
const GOLDEN_BUDGET: Duration = Duration::from_secs(60);

fn report(n: u32, name: &str, pass: bool, detail: String) {
    let line = format!("criterion {n:>2} {} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    println!("{line}");
    assert!(pass, "{line}");
}

fn sorted_quantiles(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-1.0..4.0));
    let mut q: Vec<f64> = (0..23).map(|_| rng.random::<f64>() * scale).collect();
    q.sort_by(f64::total_cmp);
    q
}

fn forecast(id: &str, u: usize, h: usize, quantiles: Vec<f64>) -> QuantileForecast {
    QuantileForecast {
        unique_id: id.into(),
        model: "m".into(),
        issuance_week_index: u,
        horizon: h,
        quantiles,
    }
}

/// Mean over levels of `2 * (1{y < q} - tau) * (q - y)`.
fn mean_pinball(q: &[f64], y: f64) -> f64 {
    q.iter()
        .zip(QUANTILE_LEVELS)
        .map(|(&q, tau)| 2.0 * (if y < q { 1.0 } else { 0.0 } - tau) * (q - y))
        .sum::<f64>()
        / 23.0
}

#[test]
fn criterion_01_wis_matches_pinball() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let q = sorted_quantiles(&mut rng);
        let y = rng.random::<f64>() * q[22] * 1.3;
        let w = wis(&forecast("a", 7, 1, q.clone()), y).unwrap();
        worst = worst.max((w - mean_pinball(&q, y)).abs());
    }
    let elapsed = start.elapsed();
    report(
        1,
        "WIS equals mean pinball loss",
        worst <= WIS_TOL && elapsed < WIS_BUDGET,
        format!("1000 forecasts, max |diff| {worst:e} (tol {WIS_TOL:e}), {elapsed:?}"),
    );
}

#[test]
fn criterion_02_wis_arithmetic() {
    let mut failures = Vec::new();
    let mut check = |label: &str, got: f64, want: f64| {
        if got != want {
            failures.push(format!("{label}: got {got}, want {want}"));
        }
    };
    // Width (u - l) plus (2/alpha)(l - y)1(y < l) plus (2/alpha)(y - u)1(y > u).
    check("inside", interval_score(2.0, 6.0, 0.5, 3.0).unwrap(), 4.0);
    check("below", interval_score(2.0, 6.0, 0.5, 1.0).unwrap(), 4.0 + 4.0 * 1.0);
    check("above", interval_score(2.0, 6.0, 0.5, 9.0).unwrap(), 4.0 + 4.0 * 3.0);
    check("below alpha 0.2", interval_score(10.0, 20.0, 0.2, 4.0).unwrap(), 10.0 + 10.0 * 6.0);

    let perfect = wis(&forecast("a", 7, 1, vec![5.0; 23]), 5.0).unwrap();
    check("perfect", perfect, 0.0);
    let point_mass = wis(&forecast("a", 7, 1, vec![5.0; 23]), 8.0).unwrap();
    if (point_mass - 3.0).abs() > 1e-12 {
        failures.push(format!("point mass: got {point_mass}, want 3"));
    }

    // Hand-built: quantiles 0..22, y = 25 lies above every interval.
    let q: Vec<f64> = (0..23).map(f64::from).collect();
    let alphas = [0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
    let mut expected = 0.5 * (25.0 - 11.0);
    for (i, a) in alphas.iter().enumerate() {
        let (l, u) = (i as f64, 22.0 - i as f64);
        expected += a / 2.0 * ((u - l) + 2.0 / a * (25.0 - u));
    }
    expected /= 11.5;
    let got = wis(&forecast("a", 7, 1, q), 25.0).unwrap();
    if (got - expected).abs() > 1e-12 {
        failures.push(format!("hand-built: got {got}, want {expected}"));
    }
    if !matches!(interval_score(3.0, 1.0, 0.5, 2.0), Err(Error::MalformedInterval { .. })) {
        failures.push("l > u accepted".into());
    }
    report(2, "WIS formula arithmetic", failures.is_empty(), if failures.is_empty() {
        "interval, perfect, point-mass and hand-built cases exact".into()
    } else {
        failures.join("; ")
    });
}

#[test]
fn criterion_03_entropy_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0usize;
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let t = rng.random_range(8..=52usize);
        let values: Vec<f64> = (0..t)
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() * 100.0 })
            .collect();
        let Ok(p) = incidence_distribution(&values) else { continue };
        checked += 1;
        let h = shannon_entropy(&p);
        if !(0.0..=(t as f64).log2() + ENTROPY_TOL).contains(&h) {
            violations += 1;
        }
        let pe = permutation_entropy(&values, 3, 1, true).unwrap();
        if !(0.0..=1.0 + ENTROPY_TOL).contains(&pe) {
            violations += 1;
        }
    }
    let mut equality = Vec::new();
    for t in [8usize, 32, 52] {
        let mut spike = vec![0.0; t];
        spike[t / 2] = 40.0;
        let h_spike = shannon_entropy(&incidence_distribution(&spike).unwrap());
        let h_uniform = shannon_entropy(&incidence_distribution(&vec![3.0; t]).unwrap());
        let ramp: Vec<f64> = (0..t).map(|i| i as f64 + 1.0).collect();
        let pe_ramp = permutation_entropy(&ramp, 3, 1, true).unwrap();
        equality.push(h_spike == 0.0 && (h_uniform - (t as f64).log2()).abs() <= ENTROPY_TOL && pe_ramp == 0.0);
    }
    let ok = violations == 0 && checked >= 9_000 && equality.iter().all(|b| *b);
    report(
        3,
        "entropy bounds",
        ok,
        format!("{checked} outbreaks, {violations} bound violations, spike/uniform/monotone equality cases {equality:?}"),
    );
}

/// Exhaustive pattern count: rank each window by pairwise comparison, with
/// ties broken by position.
fn brute_pe(x: &[f64], order: usize) -> f64 {
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for w in x.windows(order) {
        let ranks: Vec<usize> = (0..order)
            .map(|i| (0..order).filter(|&j| w[j] < w[i] || (w[j] == w[i] && j < i)).count())
            .collect();
        *counts.entry(ranks).or_default() += 1;
    }
    let n = (x.len() - order + 1) as f64;
    -counts.values().map(|&c| c as f64 / n).map(|p| p * p.log2()).sum::<f64>()
}

#[test]
fn criterion_04_permutation_entropy_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut ties = 0;
    let mut cases = 0;
    for i in 0..500 {
        let len = rng.random_range(4..=15usize);
        // Half the series draw from five values so ties are common.
        let x: Vec<f64> = (0..len)
            .map(|_| if i % 2 == 0 { rng.random_range(0..5) as f64 } else { rng.random::<f64>() })
            .collect();
        if x.windows(2).any(|w| w[0] == w[1]) {
            ties += 1;
        }
        for order in [2, 3] {
            let got = permutation_entropy(&x, order, 1, false).unwrap();
            worst = worst.max((got - brute_pe(&x, order)).abs());
            cases += 1;
        }
    }
    report(
        4,
        "permutation entropy brute-force oracle",
        worst <= PE_TOL,
        format!("{cases} cases ({ties} series with adjacent ties), max |diff| {worst:e} (tol {PE_TOL:e})"),
    );
}

fn series(values: Vec<f64>) -> WeeklySeries {
    let key = SeriesKey::new("SYNTH", "TEST", Outcome::Cases).unwrap();
    let start = mmwr_week_of(NaiveDate::from_ymd_opt(2020, 1, 4).unwrap()).unwrap();
    WeeklySeries::from_complete(key, start, values).unwrap()
}

#[test]
fn criterion_05_segmentation_synthetics() {
    let mut notes = Vec::new();
    let mut ok = true;
    // Equal bumps at weeks 10 and 30: the analytic trough is week 20.
    let bumps: Vec<f64> = (0..40)
        .map(|t| {
            let t = t as f64;
            100.0 * (-(t - 10.0).powi(2) / 32.0).exp() + 100.0 * (-(t - 30.0).powi(2) / 32.0).exp()
        })
        .collect();
    for sigma in [1.0, 2.0, 3.0] {
        let cfg = SegmentationConfig {
            kernel_bandwidth_weeks: sigma,
            ..Default::default()
        };
        let (obs, report) = segment(&series(bumps.clone()), &cfg).unwrap();
        let cut = obs.get(1).map(|o| {
            o.core_start_offset as i64 + (o.start_week.end_date() - obs[0].start_week.end_date()).num_weeks()
        });
        let good = obs.len() == 2 && cut.is_some_and(|c| (c - 20).abs() <= CUT_TOL_WEEKS);
        ok &= good;
        notes.push(format!("sigma {sigma}: {} outbreaks, cut {:?} (cuts {:?})", obs.len(), cut, report.accepted));
    }

    let cfg = SegmentationConfig::default();
    let spike = segment(&series(vec![0.0, 4.0, 9.0, 12.0, 7.0, 3.0, 0.0]), &cfg).unwrap().0.len();
    let mut lead = vec![4.0, 9.0, 12.0, 7.0, 3.0];
    lead.extend(vec![0.0; 60]);
    let narrow = SegmentationConfig {
        kernel_bandwidth_weeks: 0.25,
        ..Default::default()
    };
    let spike_then_flat = segment(&series(lead), &narrow).unwrap().0.len();
    let ramp = segment(&series((1..=60).map(f64::from).collect()), &cfg).unwrap().0.len();
    ok &= spike == 0 && spike_then_flat == 0 && ramp == 0;
    notes.push(format!(
        "5-week spike: {spike}, spike before 60 flat weeks: {spike_then_flat}, 60-week ramp: {ramp}"
    ));
    report(5, "segmentation synthetics", ok, notes.join("; "));
}

fn random_outbreak(rng: &mut ChaCha8Rng, i: usize) -> Outbreak {
    let core = rng.random_range(8..=52usize);
    let before = rng.random_range(0..=4usize);
    let after = rng.random_range(0..=4usize);
    let n = core + before + after;
    let start = mmwr_week_of(NaiveDate::from_ymd_opt(2010, 1, 2).unwrap())
        .unwrap()
        .plus_weeks(rng.random_range(0..600))
        .unwrap();
    let peak = rng.random_range(0.0..n as f64);
    let width = rng.random_range(2.0..8.0);
    let amp = 10f64.powf(rng.random_range(0.0..4.0));
    let values = (0..n)
        .map(|t| {
            let base = amp * (-(t as f64 - peak).powi(2) / (2.0 * width * width)).exp();
            ((base * rng.random_range(0.8..1.2)) * 100.0).round() / 100.0
        })
        .collect();
    Outbreak {
        unique_id: format!("O{i:04}"),
        key: SeriesKey::new("SYNTH", format!("LOC{}", i % 7), Outcome::ALL[i % 4]).unwrap(),
        start_week: start,
        end_week: start.plus_weeks(n as i64 - 1).unwrap(),
        values,
        core_start_offset: before,
        core_end_offset: before + core - 1,
    }
}

#[test]
fn criterion_06_no_leakage() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cfg = HarnessConfig::default();
    let levels = QuantileLevels::standard();
    let outbreaks: Vec<Outbreak> = (0..200).map(|i| random_outbreak(&mut rng, i)).collect();
    // Each outbreak's copy has every week after a cut-off replaced by noise;
    // forecasts issued at or before the cut-off must not change.
    let cutoffs: Vec<usize> = outbreaks.iter().map(|o| rng.random_range(7..o.duration())).collect();
    let scrambled: Vec<Outbreak> = outbreaks
        .iter()
        .zip(&cutoffs)
        .map(|(o, &c)| {
            let mut s = o.clone();
            for v in &mut s.values[c + 1..] {
                *v = rng.random_range(0.0..1e5);
            }
            s
        })
        .collect();
    let mut violations = 0usize;
    let mut emitted = 0usize;
    for model in ModelKind::ALL {
        let a = run_backtest(&outbreaks, model, &cfg, &levels).unwrap();
        let b = run_backtest(&scrambled, model, &cfg, &levels).unwrap();
        emitted += a.forecasts.len();
        for f in &a.forecasts {
            let training_end = f.issuance_week_index;
            if f.target_week_index() <= training_end || training_end + 1 < cfg.min_history_weeks {
                violations += 1;
            }
        }
        let cut: HashMap<&str, usize> = outbreaks.iter().map(|o| o.unique_id.as_str()).zip(cutoffs.iter().copied()).collect();
        let keep = |f: &&QuantileForecast| f.issuance_week_index <= cut[f.unique_id.as_str()];
        let early_a: Vec<&QuantileForecast> = a.forecasts.iter().filter(keep).collect();
        let early_b: Vec<&QuantileForecast> = b.forecasts.iter().filter(keep).collect();
        if early_a != early_b {
            violations += 1;
        }
    }
    report(
        6,
        "no leakage",
        violations == 0,
        format!("200 outbreaks x 3 models, {emitted} forecasts, {violations} violations (target order and future-scramble invariance)"),
    );
}

fn simulate_ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| {
        // Box-Muller.
        let (u1, u2): (f64, f64) = (rng.random::<f64>().max(f64::MIN_POSITIVE), rng.random());
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + 100 {
        x = phi * x + normal(&mut rng);
        if t >= 100 {
            out.push(x);
        }
    }
    out
}

#[test]
fn criterion_07_ar_recovery() {
    let mut notes = Vec::new();
    let mut ok = true;
    for phi in [0.5, 0.8] {
        let hits = (0..50u64)
            .filter(|&seed| {
                let x = simulate_ar1(phi, 200, 1000 + seed);
                let fit = fit_ar_order(&x, 0, 1).unwrap();
                (fit.coefs[0] - phi).abs() <= AR_COEF_TOL
            })
            .count();
        let rate = hits as f64 / 50.0;
        ok &= rate >= AR_HIT_RATE;
        notes.push(format!("phi {phi}: {hits}/50 within {AR_COEF_TOL}"));
    }
    let ratios: Vec<f64> = (0..50u64)
        .map(|seed| {
            let steps = simulate_ar1(0.0, 200, 5000 + seed);
            let mut level = 100.0;
            let walk: Vec<f64> = steps
                .iter()
                .map(|e| {
                    level += e;
                    level
                })
                .collect();
            let v = fit_ar(&walk).unwrap().variance_multipliers(4);
            v[3] / v[0]
        })
        .collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    ok &= (mean / RW_RATIO_TARGET - 1.0).abs() <= RW_RATIO_REL_TOL;
    notes.push(format!("random-walk Var4/Var1 mean {mean:.3} over 50 walks"));
    report(7, "AR recovery", ok, notes.join("; "));
}

#[test]
fn criterion_08_window_counts() {
    let cfg = HarnessConfig::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for duration in [12usize, 20, 60] {
        // Brute force: every u whose prefix has 8 weeks and whose 4-week
        // horizon stays inside the outbreak.
        let brute: Vec<usize> = (0..duration).filter(|u| u + 1 >= 8 && u + 4 < duration).collect();
        let got: Vec<usize> = issuance_windows_for(duration, &cfg).iter().map(|w| w.issuance).collect();
        let targets: usize = issuance_windows_for(duration, &cfg).iter().map(|w| w.horizons().count()).sum();
        ok &= got == brute && targets == 4 * brute.len();
        notes.push(format!("{duration} weeks: {} windows / {targets} targets", got.len()));
    }
    ok &= issuance_windows_for(60, &cfg).len() == 49;
    report(8, "expanding-window counts", ok, notes.join("; "));
}

fn run_cli(args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_outbreak-bench"))
        .args(args)
        .env("RUST_LOG", "warn")
        .status()
        .expect("spawn cli");
    assert!(status.success(), "cli {args:?} failed");
}

fn files_under(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn criterion_09_golden_end_to_end() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let series = data.join("series.csv");
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        run_cli(&["run", "--series", series.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        runs.push(files_under(&out));
    }
    let elapsed = start.elapsed();

    // The bundled corpus is itself reproducible from its seed.
    let regen = tmp.path().join("synth");
    run_cli(&["synth", "--out", regen.to_str().unwrap()]);
    let corpus_same = std::fs::read(regen.join("series.csv")).unwrap() == std::fs::read(&series).unwrap();

    if std::env::var_os("BLESS").is_some() {
        let _ = std::fs::remove_dir_all(&golden);
        for (rel, bytes) in &runs[0] {
            let p = golden.join(rel);
            std::fs::create_dir_all(p.parent().unwrap()).unwrap();
            std::fs::write(p, bytes).unwrap();
        }
    }
    let expected = files_under(&golden);
    let mismatched: Vec<String> = expected
        .keys()
        .chain(runs[0].keys())
        .filter(|k| expected.get(*k) != runs[0].get(*k))
        .map(|k| k.display().to_string())
        .collect();
    let rerun_same = runs[0] == runs[1];
    let ok = mismatched.is_empty() && rerun_same && corpus_same && elapsed < GOLDEN_BUDGET && !expected.is_empty();
    report(
        9,
        "golden end-to-end run",
        ok,
        format!(
            "{} files, rerun identical {rerun_same}, corpus reproducible {corpus_same}, golden mismatches {mismatched:?}, two runs in {elapsed:?}",
            expected.len()
        ),
    );
}

#[test]
fn criterion_10_split_arithmetic() {
    let ids: Vec<String> = (0..10_799).map(|i| format!("id{i:05}")).collect();
    let cfg = HarnessConfig::default();
    let a = split_outbreaks(&ids, &cfg).unwrap();
    let b = split_outbreaks(&ids, &cfg).unwrap();
    let mut all: Vec<&String> = a.train.iter().chain(&a.val).chain(&a.test).collect();
    all.sort();
    all.dedup();
    let sizes = (a.train.len(), a.val.len(), a.test.len());
    let ok = sizes == (6481, 2159, 2159) && a == b && all.len() == ids.len();
    report(
        10,
        "split determinism and arithmetic",
        ok,
        format!("sizes {sizes:?}, rerun identical {}, partition covers {} ids", a == b, all.len()),
    );
}

fn to_bytes(f: impl FnOnce(&mut Vec<u8>) -> outbreak_bench::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).unwrap();
    buf
}

#[test]
fn criterion_11_format_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = Vec::new();

    let outbreaks: Vec<Outbreak> = (0..1000).map(|i| random_outbreak(&mut rng, i)).collect();
    let table_bytes = to_bytes(|b| io::write_outbreaks(b, &outbreaks));
    let core_bytes = to_bytes(|b| io::write_core_offsets(b, &outbreaks));
    let mut table = io::read_outbreaks(table_bytes.as_slice()).unwrap();
    io::apply_core_offsets(&mut table, &io::read_core_offsets(core_bytes.as_slice()).unwrap());
    let mut sorted = outbreaks.clone();
    sorted.sort_by(|a, b| a.unique_id.cmp(&b.unique_id));
    if table.outbreaks != sorted || !table.rejected.is_empty() {
        failures.push(format!("outbreak read mismatch ({} rejected)", table.rejected.len()));
    }
    if to_bytes(|b| io::write_outbreaks(b, &table.outbreaks)) != table_bytes {
        failures.push("outbreak write-read-write not byte exact".into());
    }

    let index = OutbreakIndex::new(&outbreaks);
    let forecasts: Vec<QuantileForecast> = (0..1000)
        .map(|i| {
            let o = &outbreaks[i];
            let u = rng.random_range(0..o.duration() - 1);
            let h = rng.random_range(1..=4);
            forecast(&o.unique_id, u, h, sorted_quantiles(&mut rng))
        })
        .collect();
    let hub_bytes = to_bytes(|b| io::write_hubverse(b, &forecasts, &index));
    let (mut back, unresolved) = io::resolve_hubverse(io::read_hubverse(hub_bytes.as_slice()).unwrap(), &index);
    let mut expected = forecasts.clone();
    let key = |f: &QuantileForecast| (f.model.clone(), f.unique_id.clone(), f.issuance_week_index, f.horizon);
    expected.sort_by_key(key);
    back.sort_by_key(key);
    if back != expected || !unresolved.is_empty() {
        failures.push("forecast read mismatch".into());
    }
    if to_bytes(|b| io::write_hubverse(b, &back, &index)) != hub_bytes {
        failures.push("forecast write-read-write not byte exact".into());
    }

    // Malformed inputs.
    let hub_text = String::from_utf8(to_bytes(|b| io::write_hubverse(b, &forecasts[..1], &index))).unwrap();
    let missing: Vec<&str> = hub_text.lines().filter(|l| !l.contains(",quantile,0.25,")).collect();
    match io::read_hubverse(missing.join("\n").as_bytes()) {
        Err(Error::Format(m)) if m.contains("missing quantile level 0.25") => {}
        other => failures.push(format!("missing level not rejected as documented: {other:?}")),
    }
    let one = to_bytes(|b| io::write_outbreaks(b, &outbreaks[..2]));
    let text = String::from_utf8(one).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let start: MmwrWeek = outbreaks[0].start_week;
    let friday = (start.end_date() - chrono::Duration::days(1)).to_string();
    lines[1] = lines[1].replacen(&start.end_date().to_string(), &friday, 1);
    let mut cells: Vec<String> = lines[2].split(',').map(String::from).collect();
    cells[7] = "-3".into();
    lines[2] = cells.join(",");
    let bad = io::read_outbreaks(lines.join("\n").as_bytes()).unwrap();
    let saturday_rejected = bad.rejected.iter().any(|r| r.line == 2 && r.message.contains("Saturday"));
    let negative_rejected = bad.rejected.iter().any(|r| r.line == 3 && r.message.contains("negative"));
    if !(saturday_rejected && negative_rejected && bad.outbreaks.is_empty()) {
        failures.push(format!("malformed outbreak rows not rejected: {:?}", bad.rejected));
    }
    report(
        11,
        "format round trips",
        failures.is_empty(),
        if failures.is_empty() {
            "1000 outbreaks and 1000 forecasts round trip byte-exactly; missing level, non-Saturday date and negative value rejected".into()
        } else {
            failures.join("; ")
        },
    );
}
