//! KPSS stationarity test (level case).
//!
//! The null hypothesis is weak stationarity around a constant level; the
//! statistic is n^-2 sum_t S_t^2 / s^2(l) with S_t the partial sums of the
//! demeaned series and s^2(l) the Bartlett-kernel long-run variance. The
//! null is rejected when the statistic exceeds the critical value.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::stats::StatTestResult;

/// Critical values of the level-case KPSS distribution, ascending with
/// their upper-tail probabilities.
const CRITICAL_TABLE: [(f64, f64); 4] = [(0.347, 0.10), (0.463, 0.05), (0.574, 0.025), (0.739, 0.01)];

/// Newey-West bandwidth rule l4: floor(4 (n/100)^(2/9)).
pub fn kpss_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Bartlett-kernel long-run variance at the given bandwidth.
fn bartlett_long_run_variance(residuals: &[f64], bandwidth: usize) -> f64 {
    let n = residuals.len() as f64;
    let mut lrv: f64 = residuals.iter().map(|e| e * e).sum::<f64>() / n;
    for j in 1..=bandwidth {
        let gamma: f64 = residuals[j..]
            .iter()
            .zip(residuals)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n;
        let weight = 1.0 - j as f64 / (bandwidth as f64 + 1.0);
        lrv += 2.0 * weight * gamma;
    }
    lrv
}

/// Interpolated p-value, clamped to the table's [0.01, 0.10] range.
pub fn kpss_p_value(stat: f64) -> f64 {
    if stat <= CRITICAL_TABLE[0].0 {
        return CRITICAL_TABLE[0].1;
    }
    if stat >= CRITICAL_TABLE[3].0 {
        return CRITICAL_TABLE[3].1;
    }
    for window in CRITICAL_TABLE.windows(2) {
        let (x0, p0) = window[0];
        let (x1, p1) = window[1];
        if stat <= x1 {
            return p0 + (p1 - p0) * (stat - x0) / (x1 - x0);
        }
    }
    CRITICAL_TABLE[3].1
}

/// Run the KPSS test. `bandwidth` defaults to the l4 rule.
pub fn kpss(series: &[f64], bandwidth: Option<usize>) -> Result<StatTestResult> {
    let n = series.len();
    if n < 50 {
        return Err(Error::InsufficientData {
            what: "KPSS test",
            required: 50,
            actual: n,
        });
    }
    let l = bandwidth.unwrap_or_else(|| kpss_bandwidth(n));
    let mean = series.iter().sum::<f64>() / n as f64;
    let residuals: Vec<f64> = series.iter().map(|v| v - mean).collect();

    let lrv = bartlett_long_run_variance(&residuals, l);
    if lrv <= 0.0 {
        return Err(Error::Domain(
            "zero long-run variance: KPSS statistic undefined".into(),
        ));
    }

    let mut partial = 0.0;
    let mut sum_sq = 0.0;
    for e in &residuals {
        partial += e;
        sum_sq += partial * partial;
    }
    let stat = sum_sq / ((n * n) as f64 * lrv);

    let mut critical_values = BTreeMap::new();
    critical_values.insert("10%".to_string(), 0.347);
    critical_values.insert("5%".to_string(), 0.463);
    critical_values.insert("2.5%".to_string(), 0.574);
    critical_values.insert("1%".to_string(), 0.739);

    Ok(StatTestResult {
        test: "kpss".into(),
        statistic: stat,
        critical_values,
        p_value: kpss_p_value(stat),
        rejected: stat > 0.463,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::testsupport::{random_walk, white_noise};
    use approx::assert_abs_diff_eq;

    #[test]
    fn five_percent_critical_value_is_pinned() {
        let result = kpss(&white_noise(1, 100), None).unwrap();
        assert_eq!(result.critical_values["5%"], 0.463);
    }

    #[test]
    fn bandwidth_rule_values() {
        assert_eq!(kpss_bandwidth(100), 4);
        assert_eq!(kpss_bandwidth(500), 5);
        assert_eq!(kpss_bandwidth(2000), 7);
    }

    #[test]
    fn frozen_white_noise_fixture() {
        // Reference statistic computed with statsmodels
        // kpss(regression='c', nlags=5) on this exact deterministic series.
        let result = kpss(&white_noise(42, 500), Some(5)).unwrap();
        assert_abs_diff_eq!(result.statistic, 0.0708070859, epsilon = 1e-8);
        assert_eq!(result.p_value, 0.1);
        assert!(!result.rejected);
    }

    #[test]
    fn frozen_random_walk_fixture() {
        let result = kpss(&random_walk(43, 500), Some(5)).unwrap();
        assert_abs_diff_eq!(result.statistic, 3.8034377593, epsilon = 1e-8);
        assert_eq!(result.p_value, 0.01);
        assert!(result.rejected);
    }

    #[test]
    fn p_value_interpolates_between_table_rows() {
        // halfway between 0.463 (p=0.05) and 0.574 (p=0.025)
        let mid = 0.5 * (0.463 + 0.574);
        assert_abs_diff_eq!(kpss_p_value(mid), 0.0375, epsilon = 1e-12);
    }

    #[test]
    fn too_short_series_is_typed() {
        assert!(matches!(
            kpss(&[0.0; 20], None),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn constant_series_has_zero_long_run_variance() {
        assert!(matches!(kpss(&[5.0; 100], None), Err(Error::Domain(_))));
    }
}
