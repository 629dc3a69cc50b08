//! Per-outbreak shape and complexity measures.
//!
//! All measures are computed on the core (unpadded) segment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Outbreak;

/// Largest supported ordinal-pattern order.
pub const MAX_PATTERN_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutbreakMeasures {
    pub unique_id: String,
    pub core_weeks: usize,
    pub shannon_entropy_bits: f64,
    pub permutation_entropy_bits: Option<f64>,
    pub permutation_entropy_normalized: Option<f64>,
    /// `None` when the incidence mass sits on a single week.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

/// Normalises a curve to a probability mass over weeks.
pub fn incidence_distribution(values: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = values.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::DegenerateDistribution(format!(
            "incidence sums to {total}"
        )));
    }
    Ok(values.iter().map(|v| v / total).collect())
}

/// `-Σ p log2 p`, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    let h: f64 = p
        .iter()
        .filter(|&&q| q > 0.0)
        .map(|&q| -q * q.log2())
        .sum();
    h.max(0.0)
}

/// Ordinal pattern index of `window` via its Lehmer code.
///
/// The pattern is the stable argsort of the values: ties rank the earlier
/// element lower.
fn pattern_index(window: &[f64], scratch: &mut Vec<usize>) -> usize {
    scratch.clear();
    scratch.extend(0..window.len());
    scratch.sort_by(|&a, &b| window[a].total_cmp(&window[b]).then(a.cmp(&b)));
    let mut index = 0;
    for i in 0..scratch.len() {
        let smaller_after = scratch[i + 1..].iter().filter(|&&v| v < scratch[i]).count();
        index = index * (scratch.len() - i) + smaller_after;
    }
    index
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Frequencies of each ordinal pattern of the delay embedding, indexed by
/// Lehmer code.
pub fn ordinal_pattern_counts(x: &[f64], order: usize, delay: usize) -> Result<Vec<usize>> {
    if !(2..=MAX_PATTERN_ORDER).contains(&order) || delay == 0 {
        return Err(Error::InvalidConfig(format!(
            "pattern order must be in [2, {MAX_PATTERN_ORDER}] and delay positive, got order {order}, delay {delay}"
        )));
    }
    let needed = order * delay + 1;
    if x.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: x.len(),
        });
    }
    let span = (order - 1) * delay;
    let mut counts = vec![0usize; factorial(order)];
    let mut window = Vec::with_capacity(order);
    let mut scratch = Vec::with_capacity(order);
    for start in 0..x.len() - span {
        window.clear();
        window.extend((0..order).map(|k| x[start + k * delay]));
        counts[pattern_index(&window, &mut scratch)] += 1;
    }
    Ok(counts)
}

/// Permutation entropy in bits; divided by `log2(order!)` when `normalized`.
pub fn permutation_entropy(x: &[f64], order: usize, delay: usize, normalized: bool) -> Result<f64> {
    let counts = ordinal_pattern_counts(x, order, delay)?;
    let total: usize = counts.iter().sum();
    let probs: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    let h = shannon_entropy(&probs);
    Ok(if normalized {
        h / (factorial(order) as f64).log2()
    } else {
        h
    })
}

/// Skewness and excess kurtosis of the week index under the incidence
/// distribution.
pub fn shape_moments(values: &[f64]) -> Result<(f64, f64)> {
    let p = incidence_distribution(values)?;
    let mean: f64 = p.iter().enumerate().map(|(t, q)| t as f64 * q).sum();
    let central = |k: i32| -> f64 {
        p.iter()
            .enumerate()
            .map(|(t, q)| (t as f64 - mean).powi(k) * q)
            .sum()
    };
    let var = central(2);
    if var <= 1e-12 {
        return Err(Error::DegenerateDistribution(
            "incidence concentrated on a single week".into(),
        ));
    }
    let sd = var.sqrt();
    Ok((central(3) / (sd * var), central(4) / (var * var) - 3.0))
}

/// Computes every measure on the outbreak's core segment.
pub fn measure_outbreak(o: &Outbreak) -> Result<OutbreakMeasures> {
    let core = o.core_values();
    let p = incidence_distribution(core)?;
    let pe_bits = permutation_entropy(core, 3, 1, false).ok();
    let pe_norm = pe_bits.map(|h| h / 6f64.log2());
    let moments = shape_moments(core).ok();
    Ok(OutbreakMeasures {
        unique_id: o.unique_id.clone(),
        core_weeks: core.len(),
        shannon_entropy_bits: shannon_entropy(&p),
        permutation_entropy_bits: pe_bits,
        permutation_entropy_normalized: pe_norm,
        skewness: moments.map(|m| m.0),
        excess_kurtosis: moments.map(|m| m.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    /// Independent pattern counter: rank tuples compared directly.
    fn brute_force_pe(x: &[f64], order: usize) -> f64 {
        let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for w in x.windows(order) {
            let ranks: Vec<usize> = (0..order)
                .map(|i| {
                    (0..order)
                        .filter(|&j| w[j] < w[i] || (w[j] == w[i] && j < i))
                        .count()
                })
                .collect();
            *counts.entry(ranks).or_default() += 1;
        }
        let total = (x.len() - order + 1) as f64;
        counts
            .values()
            .map(|&c| {
                let q = c as f64 / total;
                -q * q.log2()
            })
            .sum()
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(incidence_distribution(&[1.0; 4]).unwrap(), vec![0.25; 4]);
        assert_eq!(
            incidence_distribution(&[0.0, 10.0, 0.0]).unwrap(),
            vec![0.0, 1.0, 0.0]
        );
        let p = incidence_distribution(&[2.0, 3.0, 5.0]).unwrap();
        for (a, b) in p.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(incidence_distribution(&[0.0; 5]).is_err());
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&[1.0 / 32.0; 32]) - 5.0).abs() < 1e-12);
        assert_eq!(shannon_entropy(&[0.0, 0.0, 1.0, 0.0]), 0.0);
        assert!((shannon_entropy(&[0.5, 0.25, 0.25]) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn pe_of_monotone_is_zero() {
        let x: Vec<f64> = (0..20).map(|t| t as f64).collect();
        assert_eq!(permutation_entropy(&x, 3, 1, true).unwrap(), 0.0);
    }

    #[test]
    fn pe_order_two_example() {
        let x = [4.0, 7.0, 9.0, 10.0, 6.0, 11.0, 3.0];
        let h = permutation_entropy(&x, 2, 1, false).unwrap();
        let q: [f64; 2] = [4.0 / 6.0, 2.0 / 6.0];
        let oracle = -q.iter().map(|v| v * v.log2()).sum::<f64>();
        assert!((h - oracle).abs() < 1e-15);
        assert!((h - 0.9183).abs() < 1e-4);
    }

    #[test]
    fn pe_all_six_patterns_is_one() {
        // Found by brute-force search over short sequences; its six windows
        // realise each order-3 pattern once.
        let x = [0.0, 1.0, 2.0, 0.0, 3.0, 2.0, 0.0, 1.0];
        let counts = ordinal_pattern_counts(&x, 3, 1).unwrap();
        assert_eq!(counts, vec![1; 6]);
        assert!((permutation_entropy(&x, 3, 1, true).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pe_rejects_short_series() {
        assert!(matches!(
            permutation_entropy(&[1.0, 2.0, 3.0], 3, 1, true),
            Err(Error::InsufficientData { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn ties_rank_earlier_lower() {
        // (5,5,5) is the identity pattern, same as strictly increasing.
        let tied = ordinal_pattern_counts(&[5.0; 4], 3, 1).unwrap();
        let inc = ordinal_pattern_counts(&[1.0, 2.0, 3.0, 4.0], 3, 1).unwrap();
        assert_eq!(tied, inc);
    }

    #[test]
    fn delay_skips_samples() {
        let x = [1.0, 9.0, 2.0, 10.0, 3.0, 11.0, 4.0];
        // With delay 2 both interleaved subsequences are increasing.
        assert_eq!(permutation_entropy(&x, 2, 2, true).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_triangle_has_zero_skew() {
        let (skew, _) = shape_moments(&[1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        assert!(skew.abs() < 1e-12);
    }

    #[test]
    fn uniform_kurtosis_matches_closed_form() {
        for t in [2usize, 5, 12, 52] {
            let (skew, kurt) = shape_moments(&vec![3.0; t]).unwrap();
            let tt = (t * t) as f64;
            let expected = -(6.0 * (tt + 1.0)) / (5.0 * (tt - 1.0));
            assert!(skew.abs() < 1e-10);
            assert!((kurt - expected).abs() < 1e-10, "T={t}: {kurt} vs {expected}");
        }
    }

    #[test]
    fn steep_rise_slow_decline_is_right_skewed() {
        let values = [1.0, 8.0, 6.0, 4.0, 3.0, 2.0, 1.0];
        let (skew, _) = shape_moments(&values).unwrap();
        // Oracle: third central moment by direct summation.
        let total: f64 = values.iter().sum();
        let mean: f64 = values.iter().enumerate().map(|(t, v)| t as f64 * v).sum::<f64>() / total;
        let m3: f64 = values.iter().enumerate().map(|(t, v)| (t as f64 - mean).powi(3) * v).sum();
        assert!(m3 > 0.0);
        assert!(skew > 0.0);
    }

    #[test]
    fn single_spike_shape_is_degenerate() {
        assert!(matches!(
            shape_moments(&[0.0, 0.0, 7.0, 0.0]),
            Err(Error::DegenerateDistribution(_))
        ));
    }

    proptest! {
        #[test]
        fn pe_matches_brute_force(x in prop::collection::vec(0u8..5, 4..15), order in 2usize..=3) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let h = permutation_entropy(&x, order, 1, false).unwrap();
            prop_assert!((h - brute_force_pe(&x, order)).abs() < 1e-12);
        }

        #[test]
        fn pe_invariant_under_monotone_transform(x in prop::collection::vec(0.0f64..100.0, 4..40)) {
            let y: Vec<f64> = x.iter().map(|v| (v + 1.0).ln() * 3.0 + 7.0).collect();
            prop_assert_eq!(
                permutation_entropy(&x, 3, 1, true).unwrap(),
                permutation_entropy(&y, 3, 1, true).unwrap()
            );
        }

        #[test]
        fn time_reversal_and_scaling(x in prop::collection::vec(0.1f64..100.0, 3..52), c in 0.01f64..1000.0) {
            let rev: Vec<f64> = x.iter().rev().copied().collect();
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            let (s, k) = shape_moments(&x).unwrap();
            let (sr, kr) = shape_moments(&rev).unwrap();
            let (ss, ks) = shape_moments(&scaled).unwrap();
            prop_assert!((s + sr).abs() < 1e-9);
            prop_assert!((k - kr).abs() < 1e-9);
            prop_assert!((s - ss).abs() < 1e-9 && (k - ks).abs() < 1e-9);

            let h = shannon_entropy(&incidence_distribution(&x).unwrap());
            let hr = shannon_entropy(&incidence_distribution(&rev).unwrap());
            let hs = shannon_entropy(&incidence_distribution(&scaled).unwrap());
            prop_assert!((h - hr).abs() < 1e-12 && (h - hs).abs() < 1e-12);
            prop_assert!(h <= (x.len() as f64).log2() + 1e-12);
        }
    }
}
