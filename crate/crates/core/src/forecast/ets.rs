//! Additive-error exponential smoothing: simple, Holt linear and damped Holt.
//!
//! Models are written in error-correction form
//!
//! ```text
//! forecast_t = level + phi * trend
//! level'     = forecast_t + alpha * e_t
//! trend'     = phi * trend + beta * e_t,      beta = alpha * beta_star
//! ```
//!
//! States start from the first two observations and one-step residuals are
//! collected from the third observation on, so all candidates are compared
//! on the same sample.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{aicc, Dynamics, FittedModel, ModelFamily, MIN_FIT_HISTORY, VARIANCE_FLOOR};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtsKind {
    Simple,
    Holt,
    DampedHolt,
}

impl fmt::Display for EtsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EtsKind::Simple => "ANN",
            EtsKind::Holt => "AAN",
            EtsKind::DampedHolt => "AAdN",
        })
    }
}

impl EtsKind {
    const ALL: [EtsKind; 3] = [EtsKind::Simple, EtsKind::Holt, EtsKind::DampedHolt];

    fn n_params(&self) -> usize {
        match self {
            EtsKind::Simple => 1,
            EtsKind::Holt => 2,
            EtsKind::DampedHolt => 3,
        }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        let unit = (0.01, 0.99);
        match self {
            EtsKind::Simple => vec![unit],
            EtsKind::Holt => vec![unit, unit],
            EtsKind::DampedHolt => vec![unit, unit, (0.8, 0.98)],
        }
    }

    fn grid(&self) -> Vec<Vec<f64>> {
        let unit: Vec<f64> = (0..10).map(|i| 0.05 + 0.1 * i as f64).collect();
        let phis = [0.8, 0.85, 0.9, 0.95, 0.98];
        match self {
            EtsKind::Simple => unit.iter().map(|&a| vec![a]).collect(),
            EtsKind::Holt => unit
                .iter()
                .flat_map(|&a| unit.iter().map(move |&b| vec![a, b]))
                .collect(),
            EtsKind::DampedHolt => {
                let mut out = Vec::with_capacity(unit.len() * unit.len() * phis.len());
                for &a in &unit {
                    for &b in &unit {
                        for &p in &phis {
                            out.push(vec![a, b, p]);
                        }
                    }
                }
                out
            }
        }
    }

    /// (alpha, beta, phi) from a parameter vector.
    fn unpack(&self, params: &[f64]) -> (f64, f64, f64) {
        match self {
            EtsKind::Simple => (params[0], 0.0, 1.0),
            EtsKind::Holt => (params[0], params[0] * params[1], 1.0),
            EtsKind::DampedHolt => (params[0], params[0] * params[1], params[2]),
        }
    }
}

struct Pass {
    sse: f64,
    level: f64,
    trend: f64,
}

fn run(x: &[f64], kind: EtsKind, params: &[f64]) -> Pass {
    let (alpha, beta, phi) = kind.unpack(params);
    let mut level = x[1];
    let mut trend = match kind {
        EtsKind::Simple => 0.0,
        _ => x[1] - x[0],
    };
    let mut sse = 0.0;
    for &obs in &x[2..] {
        let fc = level + phi * trend;
        let e = obs - fc;
        sse += e * e;
        level = fc + alpha * e;
        trend = phi * trend + beta * e;
    }
    Pass { sse, level, trend }
}

/// Grid search followed by a shrinking coordinate pattern search.
fn optimise(x: &[f64], kind: EtsKind) -> (Vec<f64>, Pass) {
    let mut best = kind.grid()[0].clone();
    let mut best_sse = run(x, kind, &best).sse;
    for cand in kind.grid() {
        let sse = run(x, kind, &cand).sse;
        if sse < best_sse {
            best_sse = sse;
            best = cand;
        }
    }
    let bounds = kind.bounds();
    let mut step = 0.05;
    while step > 1e-4 {
        let mut improved = false;
        for i in 0..best.len() {
            for dir in [-1.0, 1.0] {
                let mut cand = best.clone();
                cand[i] = (cand[i] + dir * step).clamp(bounds[i].0, bounds[i].1);
                let sse = run(x, kind, &cand).sse;
                if sse < best_sse {
                    best_sse = sse;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    let pass = run(x, kind, &best);
    (best, pass)
}

/// Fits simple, Holt and damped-Holt smoothing and keeps the AICc winner.
///
/// Exact AICc ties go to the simpler model.
pub fn fit_ets(history: &[f64]) -> Result<FittedModel> {
    if history.len() < MIN_FIT_HISTORY {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_HISTORY,
            got: history.len(),
        });
    }
    if history.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailed("history contains non-finite values".into()));
    }
    let n_resid = history.len() - 2;
    let mut best: Option<(f64, EtsKind, Vec<f64>, Pass)> = None;
    for kind in EtsKind::ALL {
        let (params, pass) = optimise(history, kind);
        let Some(score) = aicc(pass.sse, n_resid, kind.n_params() + 1) else {
            continue;
        };
        if best.as_ref().is_none_or(|(s, ..)| score < *s) {
            best = Some((score, kind, params, pass));
        }
    }
    let (_, kind, params, pass) =
        best.ok_or_else(|| Error::FitFailed("no smoothing model admissible".into()))?;
    let (alpha, beta, phi) = kind.unpack(&params);
    Ok(FittedModel {
        family: ModelFamily::Ets(kind),
        params,
        residual_variance: (pass.sse / n_resid as f64).max(VARIANCE_FLOOR),
        transform: Default::default(),
        dynamics: Dynamics::Ets {
            level: pass.level,
            trend: pass.trend,
            alpha,
            beta,
            phi,
        },
    })
}
