use thiserror::Error;

/// Errors raised by the benchmark engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("date {0} outside the supported range 1900-01-01..=2100-12-31")]
    DateOutOfRange(chrono::NaiveDate),

    #[error("empty series: {0}")]
    EmptySeries(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid series key: {0}")]
    InvalidKey(String),

    #[error("unknown outcome `{0}` (expected one of CASES, DEATHS, HOSPITALIZATIONS, PERCENT UNWEIGHTED)")]
    UnknownOutcome(String),

    #[error("outcome {0} is not additive and cannot be aggregated from daily values")]
    NonAdditiveOutcome(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("malformed interval: lower {lower} > upper {upper}")]
    MalformedInterval { lower: f64, upper: f64 },

    #[error("malformed forecast: {0}")]
    MalformedForecast(String),

    #[error("model fit failed: {0}")]
    FitFailed(String),

    #[error("unknown model `{name}`; available models: {available}")]
    UnknownModel { name: String, available: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("layout overflow: outbreak {id} has duration {duration}, the table holds at most {max} weeks")]
    LayoutOverflow { id: String, duration: usize, max: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
