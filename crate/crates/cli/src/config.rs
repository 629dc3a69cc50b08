use std::path::Path;

use anyhow::{bail, Context, Result};
use outbreak_bench::forecast::{ModelKind, QuantileLevels, QUANTILE_LEVELS};
use outbreak_bench::harness::HarnessConfig;
use outbreak_bench::ingest::DEFAULT_MAX_MISSING_FRACTION;
use outbreak_bench::segmentation::SegmentationConfig;
use serde::{Deserialize, Serialize};

/// Which outbreaks a backtest forecasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SplitChoice {
    Train,
    Val,
    Test,
    All,
}

/// Everything that determines a run's outputs. `harness.split_seed` is the
/// only source of randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub max_missing_fraction: f64,
    pub models: Vec<String>,
    pub backtest_split: SplitChoice,
    pub quantile_levels: Vec<f64>,
    pub segmentation: SegmentationConfig,
    pub harness: HarnessConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_missing_fraction: DEFAULT_MAX_MISSING_FRACTION,
            models: ModelKind::ALL.iter().map(|m| m.name().to_string()).collect(),
            backtest_split: SplitChoice::Test,
            quantile_levels: QUANTILE_LEVELS.to_vec(),
            segmentation: SegmentationConfig::default(),
            harness: HarnessConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.segmentation.validate()?;
        self.harness.validate()?;
        self.model_kinds()?;
        self.levels()?;
        if !(0.0..=1.0).contains(&self.max_missing_fraction) {
            bail!("max_missing_fraction must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn model_kinds(&self) -> Result<Vec<ModelKind>> {
        if self.models.is_empty() {
            bail!("no models selected; available: {}", ModelKind::available());
        }
        let mut kinds = Vec::new();
        for name in &self.models {
            let kind: ModelKind = name.parse()?;
            if !kinds.contains(&kind) {
                kinds.push(kind);
            }
        }
        Ok(kinds)
    }

    /// Forecast files and scoring use the 23 hub levels, so only those are
    /// accepted.
    pub fn levels(&self) -> Result<QuantileLevels> {
        if self.quantile_levels != QUANTILE_LEVELS {
            bail!("quantile_levels must be the 23 hub levels {:?}", QUANTILE_LEVELS);
        }
        Ok(QuantileLevels::new(self.quantile_levels.clone())?)
    }

    /// Writes the effective config into an output directory.
    pub fn echo(&self, dir: &Path) -> Result<()> {
        let text = toml::to_string(self).context("serialising config")?;
        std::fs::write(dir.join("config.toml"), text)?;
        Ok(())
    }
}
