//! Pipeline run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::DEFAULT_K_FRACTIONS;

/// Which estimator families the analyze stage runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorToggles {
    pub descriptive: bool,
    pub hill: bool,
    pub gg_fit: bool,
    pub ks: bool,
    pub adf: bool,
    pub kpss: bool,
    pub acf: bool,
    pub power_law: bool,
    pub hurst: bool,
}

impl Default for EstimatorToggles {
    fn default() -> Self {
        EstimatorToggles {
            descriptive: true,
            hill: true,
            gg_fit: true,
            ks: true,
            adf: true,
            kpss: true,
            acf: true,
            power_law: true,
            hurst: true,
        }
    }
}

/// A full pipeline run: input, output, and every analysis knob.
///
/// Round-trips losslessly through its TOML file form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    /// Commission override; when absent the market's base rate (or the
    /// standard 5%) applies.
    pub commission: Option<f64>,
    /// Multiplies return values before analysis.
    pub scale: f64,
    /// Tail fractions for the Hill curve.
    pub k_fractions: Vec<f64>,
    /// Autocorrelation lag ceiling.
    pub max_lag: usize,
    /// Significance level for the gain-loss KS test.
    pub ks_level: f64,
    /// Seed recorded for any resampling extension; the pipeline itself is
    /// deterministic.
    pub seed: u64,
    /// 0 = quiet, 1 = normal, 2 = debug.
    pub verbosity: u8,
    pub estimators: EstimatorToggles,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            out_dir: PathBuf::from("out"),
            commission: None,
            scale: 1.0,
            k_fractions: DEFAULT_K_FRACTIONS.to_vec(),
            max_lag: 200,
            ks_level: 0.05,
            seed: 0,
            verbosity: 1,
            estimators: EstimatorToggles::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input.as_os_str().is_empty() {
            return Err(Error::Config("input path is required".into()));
        }
        if self.scale <= 0.0 || !self.scale.is_finite() || self.scale.is_nan() {
            return Err(Error::Config(format!("scale {} must be positive", self.scale)));
        }
        if let Some(c) = self.commission {
            if !(0.0..1.0).contains(&c) {
                return Err(Error::Config(format!("commission {c} outside [0, 1)")));
            }
        }
        if !(0.0 < self.ks_level && self.ks_level < 1.0) {
            return Err(Error::Config(format!(
                "ks_level {} outside (0, 1)",
                self.ks_level
            )));
        }
        if self.max_lag < 10 {
            return Err(Error::Config("max_lag must be at least 10".into()));
        }
        if self.k_fractions.is_empty()
            || self.k_fractions.iter().any(|f| !(0.0 < *f && *f <= 1.0))
        {
            return Err(Error::Config(
                "k_fractions must be non-empty fractions in (0, 1]".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }
}
