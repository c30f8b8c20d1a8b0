//! Hurst exponent by rescaled-range analysis.
//!
//! For each window size, the series is cut into non-overlapping windows;
//! each window contributes the range of its demeaned cumulative sums over
//! its standard deviation. The exponent is the slope of log mean(R/S)
//! against log window size. 0.5 is memoryless, below is mean-reverting,
//! above is persistent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::ols::simple_regression;

/// R/S estimation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstResult {
    pub estimate: f64,
    pub window_sizes: Vec<usize>,
    pub r_squared: f64,
}

/// Default grid: 10 logarithmically spaced window sizes from 32 to n/4.
///
/// The lower bound sidesteps the worst of the small-window upward bias of
/// plain R/S while staying inside the admissible [16, n/4] range.
pub fn default_windows(n: usize) -> Vec<usize> {
    let lo = 32.0f64;
    let hi = (n / 4) as f64;
    let mut out = Vec::new();
    for i in 0..10 {
        let w = (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / 9.0).exp().round() as usize;
        if out.last() != Some(&w) {
            out.push(w);
        }
    }
    out
}

fn rescaled_range(window: &[f64]) -> Option<f64> {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let mut acc = 0.0;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut var = 0.0;
    for v in window {
        let dev = v - mean;
        acc += dev;
        min = min.min(acc);
        max = max.max(acc);
        var += dev * dev;
    }
    let std = (var / n).sqrt();
    if std <= 1e-12 || max <= min {
        return None;
    }
    Some((max - min) / std)
}

/// Estimate the Hurst exponent. `windows` defaults to [`default_windows`];
/// supplied grids must hold at least 4 sizes inside [16, n/4].
pub fn hurst_rs(series: &[f64], windows: Option<&[usize]>) -> Result<HurstResult> {
    let n = series.len();
    if n < 256 {
        return Err(Error::InsufficientData {
            what: "R/S Hurst estimation",
            required: 256,
            actual: n,
        });
    }
    let grid: Vec<usize> = match windows {
        Some(w) => w.to_vec(),
        None => default_windows(n),
    };
    let grid: Vec<usize> = grid
        .into_iter()
        .filter(|&w| w >= 16 && w <= n / 4)
        .collect();
    if grid.len() < 4 {
        return Err(Error::InsufficientData {
            what: "R/S window grid (sizes within [16, n/4])",
            required: 4,
            actual: grid.len(),
        });
    }

    let mut log_w = Vec::new();
    let mut log_rs = Vec::new();
    let mut used_windows = Vec::new();
    for &w in &grid {
        let mut total = 0.0;
        let mut count = 0usize;
        for chunk in series.chunks_exact(w) {
            if let Some(rs) = rescaled_range(chunk) {
                total += rs;
                count += 1;
            }
        }
        if count > 0 {
            log_w.push((w as f64).ln());
            log_rs.push((total / count as f64).ln());
            used_windows.push(w);
        }
    }
    if used_windows.len() < 4 {
        return Err(Error::Domain(
            "R/S undefined: too many zero-variance windows".into(),
        ));
    }
    let (_, slope, r_squared) = simple_regression(&log_w, &log_rs)?;
    Ok(HurstResult {
        estimate: slope,
        window_sizes: used_windows,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::testsupport::Lcg;

    #[test]
    fn white_noise_is_near_half() {
        let mut lcg = Lcg::new(8);
        let series: Vec<f64> = (0..1 << 16).map(|_| lcg.normal()).collect();
        let result = hurst_rs(&series, None).unwrap();
        assert!(
            (result.estimate - 0.5).abs() < 0.05,
            "H = {}",
            result.estimate
        );
        assert!(result.r_squared > 0.95);
    }

    #[test]
    fn negative_ar1_is_mean_reverting() {
        let mut lcg = Lcg::new(9);
        let n = 1 << 16;
        let mut series = vec![0.0f64; n];
        for t in 1..n {
            series[t] = -0.5 * series[t - 1] + lcg.normal();
        }
        let result = hurst_rs(&series, None).unwrap();
        assert!(result.estimate < 0.5, "H = {}", result.estimate);
    }

    #[test]
    fn trending_path_is_persistent() {
        // cumulative sum of positive-drift increments
        let mut lcg = Lcg::new(10);
        let mut acc = 0.0;
        let series: Vec<f64> = (0..1 << 14)
            .map(|_| {
                acc += 0.5 + lcg.normal();
                acc
            })
            .collect();
        let result = hurst_rs(&series, None).unwrap();
        assert!(result.estimate > 0.5, "H = {}", result.estimate);
    }

    #[test]
    fn window_grid_is_validated() {
        let series = vec![1.0; 300];
        // grid entirely outside [16, n/4]
        assert!(hurst_rs(&series, Some(&[2, 4, 8, 300])).is_err());
    }

    #[test]
    fn short_series_is_typed() {
        assert!(matches!(
            hurst_rs(&[0.0; 100], None),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn default_grid_spans_32_to_quarter() {
        let grid = default_windows(1 << 16);
        assert!(grid.len() >= 8);
        assert_eq!(*grid.first().unwrap(), 32);
        assert_eq!(*grid.last().unwrap(), (1 << 16) / 4);
    }
}
