//! Command-line driver: ingest → segment → analyze → backtest → score.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use outbreak_bench::scoring::GroupKey;
use outbreak_bench::synth::DEFAULT_SYNTH_SEED;
use serde_json::json;

use config::{RunConfig, SplitChoice};

#[derive(Parser)]
#[command(name = "outbreak-bench", version, about = "Outbreak forecasting benchmark engine")]
struct Cli {
    /// TOML run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for splits and minibatches (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "OUTBREAK_BENCH_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SegmentFlags {
    /// Gaussian kernel standard deviation in weeks.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Upper bound on the smoothed second derivative at accepted cuts.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    #[arg(long)]
    min_core: Option<usize>,
    #[arg(long)]
    max_core: Option<usize>,
    #[arg(long)]
    pad: Option<usize>,
}

#[derive(Args)]
struct BacktestFlags {
    /// Comma-separated model names.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    /// Which split to forecast.
    #[arg(long, value_enum)]
    split: Option<SplitChoice>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the seeded synthetic corpus as a series file.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "corpus-seed", default_value_t = DEFAULT_SYNTH_SEED)]
        corpus_seed: u64,
    },
    /// Align manifest-listed observation files to MMWR weeks.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        max_missing: Option<f64>,
    },
    /// Cut weekly series into outbreaks.
    Segment {
        /// Series file or directory of series files.
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: SegmentFlags,
    },
    /// Entropy and shape measures per outbreak.
    Analyze {
        #[arg(long)]
        outbreaks: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expanding-window forecasts for each model.
    Backtest {
        #[arg(long)]
        outbreaks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        flags: BacktestFlags,
    },
    /// Score forecast files against observed outbreaks.
    Score {
        /// Forecast files or directories.
        #[arg(long, required = true, num_args = 1..)]
        forecasts: Vec<PathBuf>,
        #[arg(long)]
        outbreaks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated grouping for an extra summary table.
        #[arg(long, value_delimiter = ',', default_value = "model")]
        group_by: Vec<GroupKey>,
    },
    /// Segment, analyze, backtest and score in one go.
    Run {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "model")]
        group_by: Vec<GroupKey>,
        #[command(flatten)]
        segment: SegmentFlags,
        #[command(flatten)]
        backtest: BacktestFlags,
    },
}

fn apply_segment(cfg: &mut RunConfig, f: &SegmentFlags) {
    let s = &mut cfg.segmentation;
    if let Some(v) = f.bandwidth {
        s.kernel_bandwidth_weeks = v;
    }
    if f.threshold.is_some() {
        s.second_derivative_threshold = f.threshold;
    }
    if let Some(v) = f.min_core {
        s.min_core_weeks = v;
    }
    if let Some(v) = f.max_core {
        s.max_core_weeks = v;
    }
    if let Some(v) = f.pad {
        s.pad_weeks = v;
    }
}

fn apply_backtest(cfg: &mut RunConfig, f: &BacktestFlags) {
    if let Some(m) = &f.models {
        cfg.models = m.clone();
    }
    if let Some(s) = f.split {
        cfg.backtest_split = s;
    }
}

fn finish(out: &Path, cfg: &RunConfig, command: &str, summary: serde_json::Value) -> Result<()> {
    std::fs::create_dir_all(out)?;
    cfg.echo(out)?;
    let doc = json!({ "command": command, "status": "ok", "summary": summary });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(out.join("run_summary.json"), text)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.harness.split_seed = seed;
    }
    match &cli.command {
        Command::Segment { flags, .. } => apply_segment(&mut cfg, flags),
        Command::Backtest { flags, .. } => apply_backtest(&mut cfg, flags),
        Command::Run { segment, backtest, .. } => {
            apply_segment(&mut cfg, segment);
            apply_backtest(&mut cfg, backtest);
        }
        Command::Ingest {
            max_missing: Some(v), ..
        } => cfg.max_missing_fraction = *v,
        _ => {}
    }
    cfg.validate()?;

    let (name, out, summary) = match &cli.command {
        Command::Synth { out, corpus_seed } => ("synth", out, commands::synth(out, *corpus_seed)?),
        Command::Ingest { manifest, out, .. } => ("ingest", out, commands::ingest(manifest, out, &cfg)?),
        Command::Segment { series, out, .. } => ("segment", out, commands::segment_cmd(series, out, &cfg)?),
        Command::Analyze { outbreaks, out } => ("analyze", out, commands::analyze(outbreaks, out)?),
        Command::Backtest { outbreaks, out, .. } => ("backtest", out, commands::backtest(outbreaks, out, &cfg)?),
        Command::Score {
            forecasts,
            outbreaks,
            out,
            group_by,
        } => ("score", out, commands::score(forecasts, outbreaks, out, group_by, &cfg)?),
        Command::Run {
            series, out, group_by, ..
        } => ("run", out, commands::run(series, out, group_by, &cfg)?),
    };
    finish(out, &cfg, name, summary)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
