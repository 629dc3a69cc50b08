//! Automatic ARIMA(p, d, 0) with intercept, fit by least squares.

use nalgebra::{DMatrix, DVector};

use super::{aicc, Dynamics, FittedModel, ModelFamily, MIN_FIT_HISTORY, VARIANCE_FLOOR};
use crate::error::{Error, Result};

pub const MAX_AR_ORDER: usize = 5;
pub const MAX_DIFFERENCING: usize = 1;

/// Least-squares AR fit on a (possibly differenced) series.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub d: usize,
    pub p: usize,
    pub intercept: f64,
    pub coefs: Vec<f64>,
    pub sse: f64,
    pub n_resid: usize,
}

fn difference(x: &[f64], d: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    for _ in 0..d {
        y = y.windows(2).map(|w| w[1] - w[0]).collect();
    }
    y
}

/// Regresses `y_t` on an intercept and `p` lags of the `d`-times differenced
/// history.
pub fn fit_ar_order(history: &[f64], d: usize, p: usize) -> Result<ArFit> {
    let y = difference(history, d);
    if y.len() <= 2 * p + 1 {
        return Err(Error::InsufficientData {
            needed: 2 * p + 2 + d,
            got: history.len(),
        });
    }
    let n = y.len() - p;
    let design = DMatrix::from_fn(n, p + 1, |r, c| if c == 0 { 1.0 } else { y[p + r - c] });
    let target = DVector::from_iterator(n, y[p..].iter().copied());

    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (max_sv, min_sv) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    if !(max_sv > 0.0) || min_sv / max_sv < 1e-10 {
        return Err(Error::FitFailed(format!(
            "collinear lags for AR({p}) on d={d} series"
        )));
    }
    let beta = svd
        .solve(&target, 0.0)
        .map_err(|e| Error::FitFailed(e.to_string()))?;
    let resid = &target - &design * &beta;
    Ok(ArFit {
        d,
        p,
        intercept: beta[0],
        coefs: beta.iter().skip(1).copied().collect(),
        sse: resid.norm_squared(),
        n_resid: n,
    })
}

fn into_model(history: &[f64], fit: ArFit) -> FittedModel {
    let keep = (fit.p + fit.d).max(1);
    let tail = history[history.len().saturating_sub(keep)..].to_vec();
    let mut params = vec![fit.intercept];
    params.extend(&fit.coefs);
    FittedModel {
        family: ModelFamily::Ar { d: fit.d, p: fit.p },
        params,
        residual_variance: (fit.sse / fit.n_resid as f64).max(VARIANCE_FLOOR),
        transform: Default::default(),
        dynamics: Dynamics::Ar {
            d: fit.d,
            intercept: fit.intercept,
            coefs: fit.coefs,
            tail,
        },
    }
}

/// Selects `d ∈ {0, 1}` and `p ∈ 0..=5` by AICc.
///
/// Candidates are visited in order of increasing `p`, then `d`, and only a
/// strictly better score replaces the incumbent, so ties go to smaller `p`
/// and then smaller `d`. If no candidate is admissible the model falls back
/// to a random walk with drift.
pub fn fit_ar(history: &[f64]) -> Result<FittedModel> {
    if history.len() < MIN_FIT_HISTORY {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_HISTORY,
            got: history.len(),
        });
    }
    if history.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailed("history contains non-finite values".into()));
    }
    let mut best: Option<(f64, ArFit)> = None;
    for p in 0..=MAX_AR_ORDER {
        for d in 0..=MAX_DIFFERENCING {
            let Ok(fit) = fit_ar_order(history, d, p) else {
                continue;
            };
            let Some(score) = aicc(fit.sse, fit.n_resid, p + 2) else {
                continue;
            };
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((score, fit));
            }
        }
    }
    let fit = match best {
        Some((_, fit)) => fit,
        None => {
            let diffs = difference(history, 1);
            let drift = diffs.iter().sum::<f64>() / diffs.len() as f64;
            let sse = diffs.iter().map(|v| (v - drift).powi(2)).sum();
            ArFit {
                d: 1,
                p: 0,
                intercept: drift,
                coefs: vec![],
                sse,
                n_resid: diffs.len(),
            }
        }
    };
    Ok(into_model(history, fit))
}

/// Point forecasts: iterate the AR recursion on the differenced scale and
/// integrate back.
pub(crate) fn forecast_path(d: usize, intercept: f64, coefs: &[f64], tail: &[f64], h: usize) -> Vec<f64> {
    let mut diffed = difference(tail, d);
    let base = diffed.len();
    for _ in 0..h {
        let next = intercept
            + coefs
                .iter()
                .enumerate()
                .map(|(i, c)| c * diffed[diffed.len() - 1 - i])
                .sum::<f64>();
        diffed.push(next);
    }
    let ahead = &diffed[base..];
    match d {
        0 => ahead.to_vec(),
        _ => {
            let mut level = *tail.last().expect("non-empty tail");
            ahead
                .iter()
                .map(|dv| {
                    level += dv;
                    level
                })
                .collect()
        }
    }
}

/// `psi_0..psi_{h-1}` of the undifferenced model.
pub(crate) fn psi_weights(d: usize, coefs: &[f64], h: usize) -> Vec<f64> {
    // Expand phi(B)(1 - B)^d into a plain AR polynomial.
    let mut ar = coefs.to_vec();
    for _ in 0..d {
        let mut next = vec![0.0; ar.len() + 1];
        next[0] = 1.0;
        for (i, a) in ar.iter().enumerate() {
            next[i] += a;
            next[i + 1] -= a;
        }
        ar = next;
    }
    let mut psi = Vec::with_capacity(h);
    for j in 0..h {
        let v = if j == 0 {
            1.0
        } else {
            ar.iter()
                .enumerate()
                .take(j)
                .map(|(i, a)| a * psi[j - 1 - i])
                .sum()
        };
        psi.push(v);
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::with_capacity(n);
        let mut prev = 0.0;
        for _ in 0..n + 100 {
            let e: f64 = StandardNormal.sample(&mut rng);
            prev = phi * prev + e;
            x.push(prev);
        }
        x.split_off(100)
    }

    /// Closed-form least squares for y_t = c + phi y_{t-1}.
    fn ols_ar1(x: &[f64]) -> f64 {
        let xs = &x[..x.len() - 1];
        let ys = &x[1..];
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let var: f64 = xs.iter().map(|a| (a - mx).powi(2)).sum();
        cov / var
    }

    #[test]
    fn ar1_coefficient_recovered() {
        let x = ar1(0.8, 200, 7);
        let fit = fit_ar_order(&x, 0, 1).unwrap();
        assert!((fit.coefs[0] - ols_ar1(&x)).abs() < 1e-9);
        assert!((fit.coefs[0] - 0.8).abs() < 0.1);
    }

    #[test]
    fn constant_history_is_flat() {
        let m = fit_ar(&[4.0; 15]).unwrap();
        assert!(m.point_forecasts(4).iter().all(|p| (p - 4.0).abs() < 1e-9));
        assert_eq!(m.residual_variance, VARIANCE_FLOOR);
    }

    #[test]
    fn collinear_design_is_rejected() {
        assert!(matches!(
            fit_ar_order(&[2.0; 12], 0, 2),
            Err(Error::FitFailed(_))
        ));
    }

    #[test]
    fn random_walk_psi_weights_are_one() {
        assert_eq!(psi_weights(1, &[], 4), vec![1.0; 4]);
        // AR(1): psi_j = phi^j.
        let psi = psi_weights(0, &[0.5], 4);
        assert_eq!(psi, vec![1.0, 0.5, 0.25, 0.125]);
        // ARIMA(1,1,0): psi_j = (1 - phi^{j+1}) / (1 - phi).
        let psi = psi_weights(1, &[0.5], 4);
        for (j, v) in psi.iter().enumerate() {
            let expected = (1.0 - 0.5f64.powi(j as i32 + 1)) / 0.5;
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn differenced_forecast_integrates() {
        // Drift 2 random walk, no AR terms.
        let path = forecast_path(1, 2.0, &[], &[10.0], 3);
        assert_eq!(path, vec![12.0, 14.0, 16.0]);
        let path = forecast_path(0, 1.0, &[0.5], &[4.0], 2);
        assert_eq!(path, vec![3.0, 2.5]);
    }

    #[test]
    fn random_walk_variance_grows_linearly() {
        let mut ratios = Vec::new();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut level = 50.0;
            let x: Vec<f64> = (0..120)
                .map(|_| {
                    let e: f64 = StandardNormal.sample(&mut rng);
                    level += e;
                    level
                })
                .collect();
            let m = fit_ar(&x).unwrap();
            let v = m.variance_multipliers(4);
            ratios.push(v[3] / v[0]);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((mean - 4.0).abs() <= 1.0, "mean ratio {mean}");
    }
}
