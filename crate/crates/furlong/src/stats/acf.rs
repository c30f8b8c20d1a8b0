//! Sample autocorrelation function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Autocorrelations for lags 0..=max_lag plus the white-noise band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Acf {
    /// (lag, correlation) with lag 0 first (always 1.0).
    pub correlations: Vec<(usize, f64)>,
    /// Half-width of the +-1.96/sqrt(n) white-noise band.
    pub band: f64,
}

impl Acf {
    pub fn at(&self, lag: usize) -> Option<f64> {
        self.correlations.get(lag).map(|(_, r)| *r)
    }
}

/// rho(tau) = sum (x_t - xbar)(x_{t+tau} - xbar) / sum (x_t - xbar)^2.
///
/// `max_lag` must stay below n/2 and the series must have spread.
pub fn acf(values: &[f64], max_lag: usize) -> Result<Acf> {
    let n = values.len();
    if n < 2 || max_lag >= n.div_ceil(2) {
        return Err(Error::InsufficientData {
            what: "autocorrelation",
            required: 2 * max_lag + 1,
            actual: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let denom: f64 = centered.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(Error::Domain("zero variance: autocorrelation undefined".into()));
    }
    let mut correlations = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let num: f64 = centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum();
        correlations.push((lag, num / denom));
    }
    Ok(Acf {
        correlations,
        band: 1.96 / (n as f64).sqrt(),
    })
}
