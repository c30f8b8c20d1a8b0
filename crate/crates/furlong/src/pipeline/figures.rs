//! Plot-data files for the four report figures.
//!
//! The artifact emits data, not pictures: each file starts with a `#`
//! comment line documenting its columns, followed by a CSV header and
//! rows. Figure parameters (fits, exponents) come from the report; raw
//! series come from the store the pipeline kept alongside it.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pipeline::report::AnalysisReport;
use crate::returns::ReturnSeries;
use crate::stats::{acf, fit_gg, gg_pdf, histogram_density};

/// Raw log-return series kept for figure emission.
#[derive(Debug, Clone)]
pub struct SeriesStore {
    pub pooled: ReturnSeries,
    pub markets: BTreeMap<String, ReturnSeries>,
}

/// Market ids the reference tables use for their three sample markets;
/// preferred for figures when present in the data.
pub const PREFERRED_SAMPLE_IDS: [&str; 3] = ["1.122946937", "1.122946927", "1.122946942"];

/// Pick the three figure markets: the preferred ids when present,
/// otherwise the markets with the most observations.
pub fn sample_market_ids(report: &AnalysisReport) -> Vec<String> {
    let mut ids: Vec<String> = PREFERRED_SAMPLE_IDS
        .iter()
        .filter(|id| report.per_market.iter().any(|m| m.market_id == **id))
        .map(|id| id.to_string())
        .collect();
    if ids.len() < 3 {
        let mut by_size: Vec<&crate::pipeline::report::MarketAnalysis> =
            report.per_market.iter().collect();
        by_size.sort_by(|a, b| {
            b.n_returns
                .cmp(&a.n_returns)
                .then_with(|| a.market_id.cmp(&b.market_id))
        });
        for m in by_size {
            if ids.len() >= 3 {
                break;
            }
            if !ids.contains(&m.market_id) {
                ids.push(m.market_id.clone());
            }
        }
    }
    ids.truncate(3);
    ids
}

fn write_lines(path: &Path, comment: &str, header: &str, rows: Vec<String>) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "# columns: {comment}").map_err(|e| Error::io(path, e))?;
    writeln!(file, "{header}").map_err(|e| Error::io(path, e))?;
    for row in rows {
        writeln!(file, "{row}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Emit fig1/fig2/fig3/fig4 data files. Returns the written paths.
pub fn emit_plot_data(
    report: &AnalysisReport,
    store: &SeriesStore,
    out_dir: &Path,
    max_lag: usize,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let pooled = store.pooled.values();

    // fig 1: pooled empirical density plus the fitted generalized Gaussian
    if let Some(fit) = &report.log_returns.gg_fit {
        if let Ok(hist) = histogram_density(&pooled) {
            let rows = hist
                .centers
                .iter()
                .zip(&hist.densities)
                .map(|(&x, &d)| {
                    let fitted = gg_pdf(x, fit.mu, fit.scale, fit.beta).unwrap_or(f64::NAN);
                    format!("{x},{d},{fitted}")
                })
                .collect();
            let path = out_dir.join("fig1_pdf.csv");
            write_lines(
                &path,
                "bin_center, empirical_density, fitted_density (generalized Gaussian)",
                "bin_center,empirical_density,fitted_density",
                rows,
            )?;
            written.push(path);
        }
    }

    // fig 2: per-sign densities of the pooled returns, long format
    {
        let positive: Vec<f64> = pooled.iter().copied().filter(|v| *v > 0.0).collect();
        let negative: Vec<f64> = pooled.iter().filter(|v| **v < 0.0).map(|v| -v).collect();
        let mut rows = Vec::new();
        for (sign, sample) in [("positive", &positive), ("negative", &negative)] {
            if sample.len() < 2 {
                continue;
            }
            let Ok(hist) = histogram_density(sample) else { continue };
            let fit = fit_gg(sample).ok();
            for (&x, &d) in hist.centers.iter().zip(&hist.densities) {
                let fitted = fit
                    .and_then(|f| gg_pdf(x, f.mu, f.scale, f.beta).ok())
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                rows.push(format!("{sign},{x},{d},{fitted}"));
            }
        }
        if !rows.is_empty() {
            let path = out_dir.join("fig2_pdf_posneg.csv");
            write_lines(
                &path,
                "sign, bin_center, empirical_density, fitted_density (per-sign generalized Gaussian)",
                "sign,bin_center,empirical_density,fitted_density",
                rows,
            )?;
            written.push(path);
        }
    }

    // figs 3 and 4: autocorrelation and power-law decay for sample markets
    for market_id in sample_market_ids(report) {
        let Some(series) = store.markets.get(&market_id) else { continue };
        let values = series.values();
        let n = values.len();
        if n < 4 {
            continue;
        }
        let lag_cap = max_lag.min(n.div_ceil(2).saturating_sub(1));
        if lag_cap < 1 {
            continue;
        }
        if let Ok(result) = acf(&values, lag_cap) {
            let rows = result
                .correlations
                .iter()
                .map(|(lag, rho)| format!("{lag},{rho},{},{}", -result.band, result.band))
                .collect();
            let path = out_dir.join(format!("fig3_acf_{market_id}.csv"));
            write_lines(
                &path,
                "lag, autocorrelation, band_lo, band_hi (+-1.96/sqrt(n))",
                "lag,acf,band_lo,band_hi",
                rows,
            )?;
            written.push(path);
        }

        let fit = report
            .per_market
            .iter()
            .find(|m| m.market_id == market_id)
            .and_then(|m| m.power_law_abs);
        if let Some(fit) = fit {
            let abs_values: Vec<f64> = values.iter().map(|v| v.abs()).collect();
            let pl_cap = fit.lag_range.1.min(lag_cap);
            if let Ok(result) = acf(&abs_values, pl_cap) {
                let rows = result
                    .correlations
                    .iter()
                    .map(|(lag, rho)| {
                        let fitted = if *lag == 0 {
                            String::new()
                        } else {
                            (fit.intercept.exp() * (*lag as f64).powf(-fit.exponent)).to_string()
                        };
                        format!("{lag},{rho},{fitted}")
                    })
                    .collect();
                let path = out_dir.join(format!("fig4_acf_powerlaw_{market_id}.csv"));
                write_lines(
                    &path,
                    "lag, autocorrelation of |returns|, fitted exp(intercept) * lag^-alpha",
                    "lag,acf_abs,fitted",
                    rows,
                )?;
                written.push(path);
            }
        }
    }

    Ok(written)
}
