//! The analysis report and its CSV mirrors.
//!
//! `report.json` is the single source of truth; every CSV table is derived
//! from the report object, never computed separately. Struct field order
//! and BTree-backed collections keep the JSON byte-stable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::config::RunConfig;
use crate::stats::{DescriptiveStats, GGFit, HillCurve, HurstResult, PowerLawFit, StatTestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 over the per-file content hashes, in (event, market) order.
    pub input_hash: String,
    pub crate_version: String,
    pub markets_parsed: usize,
    pub messages_parsed: usize,
    pub config: RunConfig,
}

/// Positive/negative split of a return sample plus the two-sample KS test
/// between the positive values and the negative magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainLossAnalysis {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive: Option<DescriptiveStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negative: Option<DescriptiveStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<StatTestResult>,
    pub positive_count: usize,
    pub negative_count: usize,
    pub zero_count: usize,
}

/// Pooled (all markets, all events) unconditional-distribution results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledAnalysis {
    /// Which series the block was computed on.
    pub series: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptive: Option<DescriptiveStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_loss: Option<GainLossAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hill: Option<HillCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gg_fit: Option<GGFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gg_fit_mle: Option<GGFit>,
    /// Estimators that could not run on this block, with the reason.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Per-market time-dependence results. Absolute-return variants carry the
/// `_abs` suffix; log-return variants `_log`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketAnalysis {
    pub market_id: String,
    pub event_id: String,
    /// Length of the market's log-return series.
    pub n_returns: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adf_abs: Option<StatTestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kpss_abs: Option<StatTestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adf_log: Option<StatTestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kpss_log: Option<StatTestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acf_lag1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_law_abs: Option<PowerLawFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hurst: Option<HurstResult>,
    /// Per-estimator failures, recorded instead of failing the run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Cross-market summary of the absolute-return power-law exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSummary {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub min: f64,
}

impl PowerLawSummary {
    /// Summarize exponents; None when the list is empty.
    pub fn from_exponents(exponents: &[f64]) -> Option<PowerLawSummary> {
        if exponents.is_empty() {
            return None;
        }
        let n = exponents.len();
        let mean = exponents.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (exponents.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n as f64 - 1.0))
                .sqrt()
        } else {
            0.0
        };
        Some(PowerLawSummary {
            n,
            mean,
            std,
            max: exponents.iter().cloned().fold(f64::MIN, f64::max),
            min: exponents.iter().cloned().fold(f64::MAX, f64::min),
        })
    }
}

/// A market that could not be analyzed at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketError {
    pub market_id: String,
    pub stage: String,
    pub message: String,
}

/// Data-quality counters accumulated across the run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DataQuality {
    pub parse_warnings: usize,
    pub unknown_fields: usize,
    pub replay_warnings: usize,
    pub settlement_warnings: usize,
    pub zero_returns_excluded: usize,
    /// First few warning strings, for the human reading the report.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<String>,
}

/// The full analysis report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    /// Unconditional distribution of the pooled tick log returns.
    pub log_returns: PooledAnalysis,
    /// Gain-loss structure of the settlement returns.
    pub settlement: GainLossAnalysis,
    /// One entry per analyzable market, ordered by market id.
    pub per_market: Vec<MarketAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_law_summary: Option<PowerLawSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub market_errors: Vec<MarketError>,
    pub data_quality: DataQuality,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json_file(path: &Path) -> Result<AnalysisReport> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Pipeline(format!("bad report: {e}")))
    }
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn stationarity_rows(entries: &[(String, Option<&StatTestResult>)]) -> Vec<Vec<String>> {
    entries
        .iter()
        .filter_map(|(id, result)| {
            result.map(|r| {
                vec![
                    id.clone(),
                    r.statistic.to_string(),
                    r.critical_values
                        .get("5%")
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                    r.p_value.to_string(),
                    r.rejected.to_string(),
                ]
            })
        })
        .collect()
}

fn descriptive_row(label: &str, stats: &DescriptiveStats) -> Vec<String> {
    vec![
        label.to_string(),
        stats.n.to_string(),
        stats.mean.to_string(),
        stats.std.to_string(),
        stats.skewness.to_string(),
        stats.kurtosis.to_string(),
        stats.cv.to_string(),
    ]
}

/// Derive every CSV table from the report. Returns the written paths.
pub fn write_report_tables(report: &AnalysisReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let emit = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<PathBuf> {
        let path = out_dir.join(name);
        write_csv(&path, header, rows)?;
        Ok(path)
    };

    let descriptive_header = ["series", "n", "mean", "std", "skewness", "kurtosis", "cv"];
    let mut rows = Vec::new();
    if let Some(stats) = &report.log_returns.descriptive {
        rows.push(descriptive_row("log_returns_pooled", stats));
    }
    written.push(emit("table_descriptive.csv", &descriptive_header, rows)?);

    if let Some(hill) = &report.log_returns.hill {
        let rows = hill
            .points
            .iter()
            .map(|p| {
                vec![
                    p.k_fraction.to_string(),
                    p.k_count.to_string(),
                    p.estimate.to_string(),
                    p.implied_tail_index
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                ]
            })
            .collect();
        written.push(emit(
            "table_hill.csv",
            &["k_fraction", "k_count", "hill_estimate", "implied_tail_index"],
            rows,
        )?);
    }

    let posneg = |gl: &GainLossAnalysis| {
        let mut rows = Vec::new();
        if let Some(p) = &gl.positive {
            rows.push(descriptive_row("positive", p));
        }
        if let Some(n) = &gl.negative {
            rows.push(descriptive_row("negative", n));
        }
        rows
    };
    if let Some(gl) = &report.log_returns.gain_loss {
        written.push(emit("table_posneg_log.csv", &descriptive_header, posneg(gl))?);
    }
    written.push(emit(
        "table_posneg_settlement.csv",
        &descriptive_header,
        posneg(&report.settlement),
    )?);

    let stationarity_header = ["market_id", "statistic", "critical_value_5pct", "p_value", "rejected"];
    type Pick = fn(&MarketAnalysis) -> Option<&StatTestResult>;
    let variants: [(&str, Pick); 4] = [
        ("table_adf_abs.csv", |m| m.adf_abs.as_ref()),
        ("table_kpss_abs.csv", |m| m.kpss_abs.as_ref()),
        ("table_adf_log.csv", |m| m.adf_log.as_ref()),
        ("table_kpss_log.csv", |m| m.kpss_log.as_ref()),
    ];
    for (name, pick) in variants {
        let entries: Vec<(String, Option<&StatTestResult>)> = report
            .per_market
            .iter()
            .map(|m| (m.market_id.clone(), pick(m)))
            .collect();
        written.push(emit(name, &stationarity_header, stationarity_rows(&entries))?);
    }

    let rows = report
        .per_market
        .iter()
        .filter_map(|m| {
            m.power_law_abs.map(|fit| {
                vec![
                    m.market_id.clone(),
                    fit.exponent.to_string(),
                    fit.r_squared.to_string(),
                    fit.used_lags.to_string(),
                ]
            })
        })
        .collect();
    written.push(emit(
        "table_powerlaw_markets.csv",
        &["market_id", "exponent", "r_squared", "used_lags"],
        rows,
    )?);

    if let Some(summary) = &report.power_law_summary {
        written.push(emit(
            "table_powerlaw_summary.csv",
            &["n", "mean", "std", "max", "min"],
            vec![vec![
                summary.n.to_string(),
                summary.mean.to_string(),
                summary.std.to_string(),
                summary.max.to_string(),
                summary.min.to_string(),
            ]],
        )?);
    }

    Ok(written)
}

/// A short human-readable summary of a report.
pub fn summarize(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let p = &report.provenance;
    out.push_str(&format!(
        "input {} | {} markets, {} messages\n",
        &p.input_hash[..16.min(p.input_hash.len())],
        p.markets_parsed,
        p.messages_parsed
    ));
    if let Some(d) = &report.log_returns.descriptive {
        out.push_str(&format!(
            "pooled log returns: n={} mean={:.6} std={:.6} skew={:.4} kurt={:.4} cv={:.4}\n",
            d.n, d.mean, d.std, d.skewness, d.kurtosis, d.cv
        ));
    }
    if let Some(fit) = &report.log_returns.gg_fit {
        out.push_str(&format!(
            "generalized Gaussian fit: beta={:.4} scale={:.4} (sse {:.3e})\n",
            fit.beta, fit.scale, fit.sse
        ));
    }
    if let Some(gl) = &report.log_returns.gain_loss {
        if let Some(ks) = &gl.ks {
            out.push_str(&format!(
                "gain-loss KS (log returns): D={:.6} p={:.4} rejected={}\n",
                ks.statistic, ks.p_value, ks.rejected
            ));
        }
    }
    let adf_rejects = report
        .per_market
        .iter()
        .filter(|m| m.adf_abs.as_ref().is_some_and(|r| r.rejected))
        .count();
    let kpss_rejects = report
        .per_market
        .iter()
        .filter(|m| m.kpss_abs.as_ref().is_some_and(|r| r.rejected))
        .count();
    out.push_str(&format!(
        "per-market (absolute returns): ADF rejects unit root in {}/{}, KPSS rejects stationarity in {}/{}\n",
        adf_rejects,
        report.per_market.len(),
        kpss_rejects,
        report.per_market.len()
    ));
    if let Some(s) = &report.power_law_summary {
        out.push_str(&format!(
            "power-law decay of |returns| ACF: n={} mean={:.5} std={:.5} max={:.5} min={:.5}\n",
            s.n, s.mean, s.std, s.max, s.min
        ));
    }
    if !report.market_errors.is_empty() {
        out.push_str(&format!("{} market(s) skipped with errors\n", report.market_errors.len()));
    }
    out.push_str(&format!(
        "data quality: {} parse warnings, {} replay warnings, {} settlement warnings\n",
        report.data_quality.parse_warnings,
        report.data_quality.replay_warnings,
        report.data_quality.settlement_warnings
    ));
    out
}
