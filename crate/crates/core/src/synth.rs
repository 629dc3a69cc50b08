//! Seeded synthetic surveillance series for demos and golden runs.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calendar::mmwr_week_of;
use crate::error::Result;
use crate::types::{Outcome, SeriesKey, WeeklySeries};

/// Default seed of the bundled corpus.
pub const DEFAULT_SYNTH_SEED: u64 = 7;

const KEYS: [(&str, &str, Outcome); 5] = [
    ("INFLUENZA", "OHIO", Outcome::Cases),
    ("INFLUENZA", "TEXAS", Outcome::Hospitalizations),
    ("MEASLES", "IOWA", Outcome::Cases),
    ("COVID-19", "MAINE", Outcome::Deaths),
    ("ILI", "NATIONAL", Outcome::PercentUnweighted),
];

/// Five weekly series of recurring Gaussian waves with mild multiplicative
/// noise, rounded to two decimals. Every wave is separated by a clear trough,
/// so segmentation yields about four outbreaks per series.
pub fn synthetic_corpus(seed: u64) -> Result<Vec<WeeklySeries>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = mmwr_week_of(NaiveDate::from_ymd_opt(2015, 1, 3).expect("valid date"))?;
    let mut out = Vec::with_capacity(KEYS.len());
    for (disease, location, outcome) in KEYS {
        let n_waves = 4;
        let mut centers = Vec::with_capacity(n_waves);
        let mut c: f64 = rng.random_range(8.0..12.0);
        for _ in 0..n_waves {
            centers.push((c, rng.random_range(2.5..4.5), rng.random_range(40.0..400.0)));
            c += rng.random_range(20.0..28.0);
        }
        let len = (c - 8.0).ceil() as usize;
        let scale = if outcome == Outcome::PercentUnweighted { 0.02 } else { 1.0 };
        let values: Vec<f64> = (0..len)
            .map(|t| {
                let t = t as f64;
                let signal: f64 = centers
                    .iter()
                    .map(|(mu, sd, amp)| amp * (-(t - mu).powi(2) / (2.0 * sd * sd)).exp())
                    .sum();
                let noise = 1.0 + rng.random_range(-0.03..0.03);
                (((2.0 + signal) * noise * scale) * 100.0).round() / 100.0
            })
            .collect();
        let key = SeriesKey::new(disease, location, outcome)?;
        out.push(WeeklySeries::from_complete(key, start, values)?);
    }
    Ok(out)
}
