//! Power-law fit to autocorrelation decay.
//!
//! Fits ln rho(tau) = intercept - alpha ln tau by least squares over the
//! lags with positive autocorrelation; the exponent alpha measures how
//! fast dependence dies out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ols::simple_regression;

/// Fitted power-law decay parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Decay exponent, non-negative.
    pub exponent: f64,
    /// Intercept of the log-log regression (ln rho at tau = 1).
    pub intercept: f64,
    /// Lag range [1, max_lag] the fit was asked to use.
    pub lag_range: (usize, usize),
    /// R-squared of the log-log regression.
    pub r_squared: f64,
    /// Number of lags actually used (positive autocorrelation).
    pub used_lags: usize,
    /// Lags in range excluded for non-positive autocorrelation.
    pub excluded_lags: usize,
}

/// Default lag ceiling: min(200, n/10).
pub fn default_power_law_ceiling(n: usize) -> usize {
    200.min(n / 10)
}

/// Fit the decay exponent from (lag, autocorrelation) pairs over lags
/// 1..=max_lag. Needs at least 5 usable (positive) lags.
pub fn fit_powerlaw_acf(acf_values: &[(usize, f64)], max_lag: usize) -> Result<PowerLawFit> {
    let mut log_lags = Vec::new();
    let mut log_rhos = Vec::new();
    let mut excluded = 0usize;
    for &(lag, rho) in acf_values {
        if lag == 0 || lag > max_lag {
            continue;
        }
        if rho > 0.0 {
            log_lags.push((lag as f64).ln());
            log_rhos.push(rho.ln());
        } else {
            excluded += 1;
        }
    }
    if log_lags.len() < 5 {
        return Err(Error::InsufficientData {
            what: "power-law fit (positive-ACF lags)",
            required: 5,
            actual: log_lags.len(),
        });
    }
    let (intercept, slope, r_squared) = simple_regression(&log_lags, &log_rhos)?;
    Ok(PowerLawFit {
        exponent: (-slope).max(0.0),
        intercept,
        lag_range: (1, max_lag),
        r_squared,
        used_lags: log_lags.len(),
        excluded_lags: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn exact_power_law(alpha: f64, lags: usize) -> Vec<(usize, f64)> {
        (0..=lags)
            .map(|lag| {
                let rho = if lag == 0 {
                    1.0
                } else {
                    (lag as f64).powf(-alpha)
                };
                (lag, rho)
            })
            .collect()
    }

    #[test]
    fn exact_half_exponent_recovered() {
        let fit = fit_powerlaw_acf(&exact_power_law(0.5, 50), 50).unwrap();
        assert_abs_diff_eq!(fit.exponent, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-10);
        assert_eq!(fit.used_lags, 50);
        assert_eq!(fit.excluded_lags, 0);
    }

    #[test]
    fn constant_acf_gives_zero_exponent() {
        let values: Vec<(usize, f64)> = (0..=30).map(|lag| (lag, 0.3)).collect();
        let fit = fit_powerlaw_acf(&values, 30).unwrap();
        assert_abs_diff_eq!(fit.exponent, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 0.3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn negative_lags_are_excluded_and_counted() {
        let mut values = exact_power_law(0.5, 30);
        values[7].1 = -0.01;
        values[19].1 = 0.0;
        let fit = fit_powerlaw_acf(&values, 30).unwrap();
        assert_eq!(fit.excluded_lags, 2);
        assert_eq!(fit.used_lags, 28);
        assert!((fit.exponent - 0.5).abs() < 0.05);
    }

    #[test]
    fn too_few_usable_lags_is_typed() {
        let values: Vec<(usize, f64)> = (0..=10).map(|lag| (lag, -0.5)).collect();
        assert!(matches!(
            fit_powerlaw_acf(&values, 10),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn ceiling_rule() {
        assert_eq!(default_power_law_ceiling(100_000), 200);
        assert_eq!(default_power_law_ceiling(1500), 150);
    }

    #[test]
    fn persistent_garch_absolute_returns_decay_in_the_financial_band() {
        use crate::stats::acf;
        use crate::synth::{generate_series, Family, GeneratorSpec};
        let series = generate_series(&GeneratorSpec {
            family: Family::Garch11 { omega: 0.005, a1: 0.05, b1: 0.945 },
            n: 100_000,
            seed: 300,
        })
        .unwrap();
        let abs_returns: Vec<f64> = series.values().iter().map(|v| v.abs()).collect();
        let rho = acf(&abs_returns, 200).unwrap();
        let fit = fit_powerlaw_acf(&rho.correlations, 200).unwrap();
        assert!(
            (0.1..=0.4).contains(&fit.exponent),
            "alpha {} outside the financial band",
            fit.exponent
        );
    }
}
