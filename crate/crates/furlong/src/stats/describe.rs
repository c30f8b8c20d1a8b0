//! Descriptive moments of a return series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moments in the convention used throughout the crate: sample standard
/// deviation (denominator n-1), moment-based skewness, and Pearson
/// kurtosis where a normal distribution scores 3.0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    /// Pearson kurtosis; 3.0 for a normal distribution (not excess).
    pub kurtosis: f64,
    /// Coefficient of variation, mean / std.
    pub cv: f64,
}

/// Compute descriptive statistics.
///
/// Needs at least 4 observations (for kurtosis) and non-zero spread.
pub fn describe(values: &[f64]) -> Result<DescriptiveStats> {
    let n = values.len();
    if n < 4 {
        return Err(Error::InsufficientData {
            what: "descriptive statistics",
            required: 4,
            actual: n,
        });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    if m2 == 0.0 {
        return Err(Error::Domain(
            "zero standard deviation: skewness and kurtosis undefined".into(),
        ));
    }
    let std = (m2 * nf / (nf - 1.0)).sqrt();
    Ok(DescriptiveStats {
        n,
        mean,
        std,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
        cv: mean / std,
    })
}
