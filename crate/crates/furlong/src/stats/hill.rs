//! Hill estimator of the tail index.
//!
//! Applied to return magnitudes: for ascending order statistics
//! X(1) <= ... <= X(n) and k tail observations,
//! H(k) = (1/k) sum_{i=0}^{k-1} ln(X(n-i) / X(n-k)), and 1/H estimates the
//! tail index. H is scale-free by the ratio form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractions of the sample used as tail sizes when none are given.
pub const DEFAULT_K_FRACTIONS: [f64; 6] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.10];

/// One evaluated tail size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillPoint {
    pub k_fraction: f64,
    pub k_count: usize,
    /// The Hill estimate H(k), non-negative.
    pub estimate: f64,
    /// 1/H when H > 0; None for degenerate (all-equal) tails.
    pub implied_tail_index: Option<f64>,
}

/// Hill estimates over a grid of tail fractions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HillCurve {
    pub points: Vec<HillPoint>,
    /// Fractions that could not be evaluated, with the reason.
    pub skipped: Vec<(f64, String)>,
}

/// Estimate the Hill curve from a return series.
///
/// Values are reduced to magnitudes first; any zero magnitude is a domain
/// error (zero returns must be filtered upstream). Each k_count is
/// floor(fraction * n) and must be at least 2; fractions that fall short
/// are reported in `skipped` rather than failing the curve.
pub fn hill(returns: &[f64], k_fractions: &[f64]) -> Result<HillCurve> {
    let mut magnitudes: Vec<f64> = Vec::with_capacity(returns.len());
    for v in returns {
        let m = v.abs();
        if m <= 0.0 {
            return Err(Error::Domain(
                "zero return magnitude in Hill input; filter zero returns first".into(),
            ));
        }
        magnitudes.push(m);
    }
    let n = magnitudes.len();
    if n < 3 {
        return Err(Error::InsufficientData {
            what: "Hill estimator",
            required: 3,
            actual: n,
        });
    }
    magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut curve = HillCurve::default();
    for &fraction in k_fractions {
        if !(0.0..=1.0).contains(&fraction) {
            curve
                .skipped
                .push((fraction, "fraction outside [0, 1]".into()));
            continue;
        }
        let k = (fraction * n as f64).floor() as usize;
        if k < 2 {
            curve.skipped.push((
                fraction,
                format!("k = floor({fraction} * {n}) = {k} is below 2"),
            ));
            continue;
        }
        if k > n - 1 {
            curve.skipped.push((
                fraction,
                format!("k = {k} leaves no order statistic below the tail"),
            ));
            continue;
        }
        let threshold = magnitudes[n - 1 - k];
        let sum_log: f64 = magnitudes[n - k..]
            .iter()
            .map(|x| (x / threshold).ln())
            .sum();
        let estimate = sum_log / k as f64;
        curve.points.push(HillPoint {
            k_fraction: fraction,
            k_count: k,
            estimate,
            implied_tail_index: (estimate > 0.0).then(|| 1.0 / estimate),
        });
    }
    Ok(curve)
}
