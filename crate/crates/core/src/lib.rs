//! Outbreak forecasting benchmark engine.
//!
//! Surveillance series are aligned to MMWR weeks ([`ingest`]), split into
//! single-wave outbreaks ([`segmentation`]), characterised ([`analytics`]),
//! forecast by statistical baselines under an expanding-window protocol
//! ([`forecast`], [`harness`]) and scored with interval and point metrics
//! ([`scoring`]). [`io`] reads and writes every interchange file.

pub mod analytics;
pub mod calendar;
pub mod error;
pub mod forecast;
pub mod harness;
pub mod ingest;
pub mod io;
pub mod scoring;
pub mod segmentation;
pub mod synth;
pub mod types;

pub use calendar::{mmwr_week_of, MmwrWeek};
pub use error::{Error, Result};
pub use types::{validate_outbreak, Outbreak, Outcome, SeriesKey, WeeklySeries};
