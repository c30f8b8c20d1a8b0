//! The statistical battery.
//!
//! Every estimator takes a plain `&[f64]` slice, validates its stated
//! minimum sample size with a typed error, and is a pure function of its
//! input.

mod acf;
mod adf;
mod describe;
mod gengauss;
mod hill;
mod hurst;
mod kpss;
mod ks;
pub(crate) mod ols;
mod powerlaw;

#[cfg(test)]
pub(crate) mod testsupport;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use acf::{acf, Acf};
pub use adf::{adf, adf_critical_value, adf_p_value, schwert_lag};
pub use describe::{describe, DescriptiveStats};
pub use gengauss::{
    fit_gg, fit_gg_mle, gg_pdf, histogram_density, scale_from_std, std_from_scale, FitMethod,
    GGFit, Histogram,
};
pub use hill::{hill, HillCurve, HillPoint, DEFAULT_K_FRACTIONS};
pub use hurst::{default_windows, hurst_rs, HurstResult};
pub use kpss::{kpss, kpss_bandwidth, kpss_p_value};
pub use ks::{kolmogorov_critical, kolmogorov_sf, ks_critical_value, ks_two_sample};
pub use powerlaw::{default_power_law_ceiling, fit_powerlaw_acf, PowerLawFit};

/// Outcome of a hypothesis test: statistic, critical values by level,
/// p-value, and the 5%-level decision in the test's rejection direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatTestResult {
    pub test: String,
    pub statistic: f64,
    pub critical_values: BTreeMap<String, f64>,
    pub p_value: f64,
    pub rejected: bool,
}
