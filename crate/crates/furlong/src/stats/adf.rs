//! Augmented Dickey-Fuller unit-root test (constant-only regression).
//!
//! Regresses the first difference on a constant, the lagged level, and
//! `p` lagged differences; the statistic is the t-ratio on the lagged
//! level. The null hypothesis is a unit root, rejected when the statistic
//! falls below the critical value. Critical values use the MacKinnon
//! (2010) response surface and p-values the MacKinnon (1994) regression
//! approximation, both for the single-series constant case.

use std::collections::BTreeMap;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::stats::ols::ols;
use crate::stats::StatTestResult;

/// Schwert's lag rule: floor(12 (n/100)^(1/4)).
pub fn schwert_lag(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

// MacKinnon (2010) response surface, constant case, one variable.
// cv(T) = b0 + b1/T + b2/T^2 + b3/T^3.
const CV_SURFACE: [(&str, [f64; 4]); 3] = [
    ("1%", [-3.43035, -6.5393, -16.786, -79.433]),
    ("5%", [-2.86154, -2.8903, -4.234, -40.040]),
    ("10%", [-2.56677, -1.5384, -2.809, 0.0]),
];

/// Finite-sample critical value for the constant-only regression at the
/// given effective sample size. `usize::MAX` (or any huge n) approaches
/// the asymptotic value, e.g. -2.86154 at 5%.
pub fn adf_critical_value(level: &str, n_eff: usize) -> Option<f64> {
    let t = n_eff as f64;
    CV_SURFACE
        .iter()
        .find(|(label, _)| *label == level)
        .map(|(_, b)| b[0] + b[1] / t + b[2] / (t * t) + b[3] / (t * t * t))
}

// MacKinnon (1994) p-value approximation, constant case, one variable.
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
const LARGE_P: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];

fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn polyval_ascending(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x + c)
}

/// Asymptotic p-value for an ADF t-statistic.
pub fn adf_p_value(stat: f64) -> f64 {
    if stat > TAU_MAX {
        return 1.0;
    }
    if stat < TAU_MIN {
        return 0.0;
    }
    let poly = if stat <= TAU_STAR {
        polyval_ascending(&SMALL_P, stat)
    } else {
        polyval_ascending(&LARGE_P, stat)
    };
    norm_cdf(poly)
}

/// Run the ADF test. `lags` defaults to the Schwert rule.
pub fn adf(series: &[f64], lags: Option<usize>) -> Result<StatTestResult> {
    let n = series.len();
    if n < 50 {
        return Err(Error::InsufficientData {
            what: "ADF test",
            required: 50,
            actual: n,
        });
    }
    let p = lags.unwrap_or_else(|| schwert_lag(n));
    let k = p + 2; // constant + level + p lagged differences
    if n < p + k + 2 {
        return Err(Error::InsufficientData {
            what: "ADF regression",
            required: p + k + 2,
            actual: n,
        });
    }

    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let mut y = Vec::with_capacity(diffs.len() - p);
    let mut rows = Vec::with_capacity(diffs.len() - p);
    for t in p..diffs.len() {
        y.push(diffs[t]);
        let mut row = Vec::with_capacity(k);
        row.push(1.0);
        row.push(series[t]);
        for lag in 1..=p {
            row.push(diffs[t - lag]);
        }
        rows.push(row);
    }

    let fit = ols(&y, &rows)?;
    let stat = fit.t_stat(1);
    let n_eff = y.len();

    let mut critical_values = BTreeMap::new();
    for (label, _) in CV_SURFACE {
        critical_values.insert(label.to_string(), adf_critical_value(label, n_eff).unwrap());
    }
    let cv5 = critical_values["5%"];

    Ok(StatTestResult {
        test: "adf".into(),
        statistic: stat,
        critical_values,
        p_value: adf_p_value(stat),
        rejected: stat < cv5,
    })
}
