//! Batch pipeline: ingest -> replay -> datasets -> returns -> estimators
//! -> report and plot data.
//!
//! Per-market work runs in parallel; results are assembled in market-id
//! order so the same input, config, and seed always produce a
//! byte-identical `report.json`.

pub mod config;
mod figures;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::{open_archive, ParsedMarketFile};
use crate::replay::{
    build_definition_datasets, build_runner_change_dataset, csv as dataset_csv, extract_winners,
    group_by_market, MarketTimeline, Replayer, RunnerChangeRecord,
};
use crate::returns::{
    commission_for, concat_returns, log_returns, settlement_returns, BetSide, ReturnSeries,
    SettlementReturnRecord,
};
use crate::stats::{
    acf, adf, default_power_law_ceiling, describe, fit_gg, fit_gg_mle, fit_powerlaw_acf, hill,
    hurst_rs, kpss, ks_two_sample,
};

pub use config::{EstimatorToggles, RunConfig};
pub use figures::{emit_plot_data, sample_market_ids, SeriesStore, PREFERRED_SAMPLE_IDS};
pub use report::{
    summarize, write_report_tables, AnalysisReport, DataQuality, GainLossAnalysis, MarketAnalysis,
    MarketError, PooledAnalysis, PowerLawSummary, Provenance,
};

/// Everything a pipeline run produces.
#[derive(Debug)]
pub struct PipelineOutput {
    pub report: AnalysisReport,
    /// Raw log-return series backing the figures; useful for callers that
    /// want to emit more plot data.
    pub store: SeriesStore,
    pub written: Vec<PathBuf>,
}

/// Per-selection price ticks: last traded price where present and changed.
fn price_series(timeline: &MarketTimeline) -> BTreeMap<i64, Vec<(i64, f64)>> {
    let mut ordered: Vec<&(i64, crate::ingest::MarketChange)> = timeline.changes.iter().collect();
    ordered.sort_by_key(|(pt, _)| *pt);
    let mut series: BTreeMap<i64, Vec<(i64, f64)>> = BTreeMap::new();
    for (pt, mc) in ordered {
        for rc in mc.rc.iter().flatten() {
            if let Some(ltp) = rc.ltp {
                let ticks = series.entry(rc.id).or_default();
                if ticks.last().is_none_or(|(_, prev)| *prev != ltp) {
                    ticks.push((*pt, ltp));
                }
            }
        }
    }
    series
}

/// Merged log returns of every selection in the market.
fn market_log_returns(timeline: &MarketTimeline) -> Result<ReturnSeries> {
    let per_selection: Vec<ReturnSeries> = price_series(timeline)
        .values()
        .map(|ticks| log_returns(&timeline.market_id, ticks))
        .collect::<Result<_>>()?;
    let mut merged = concat_returns(&per_selection)?;
    merged.id = timeline.market_id.clone();
    Ok(merged)
}

fn note_for(what: &str, e: Error) -> String {
    format!("{what}: {e}")
}

fn analyze_market(
    market_id: &str,
    event_id: &str,
    series: &ReturnSeries,
    cfg: &RunConfig,
) -> MarketAnalysis {
    let values = series.values();
    let n = values.len();
    let abs_values: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let mut analysis = MarketAnalysis {
        market_id: market_id.to_string(),
        event_id: event_id.to_string(),
        n_returns: n,
        adf_abs: None,
        kpss_abs: None,
        adf_log: None,
        kpss_log: None,
        acf_lag1: None,
        power_law_abs: None,
        hurst: None,
        notes: Vec::new(),
    };

    if cfg.estimators.adf {
        match adf(&abs_values, None) {
            Ok(r) => analysis.adf_abs = Some(r),
            Err(e) => analysis.notes.push(note_for("adf_abs", e)),
        }
        match adf(&values, None) {
            Ok(r) => analysis.adf_log = Some(r),
            Err(e) => analysis.notes.push(note_for("adf_log", e)),
        }
    }
    if cfg.estimators.kpss {
        match kpss(&abs_values, None) {
            Ok(r) => analysis.kpss_abs = Some(r),
            Err(e) => analysis.notes.push(note_for("kpss_abs", e)),
        }
        match kpss(&values, None) {
            Ok(r) => analysis.kpss_log = Some(r),
            Err(e) => analysis.notes.push(note_for("kpss_log", e)),
        }
    }
    if cfg.estimators.acf && n >= 4 {
        let lag_cap = cfg.max_lag.min(n.div_ceil(2).saturating_sub(1)).max(1);
        match acf(&values, lag_cap) {
            Ok(r) => analysis.acf_lag1 = r.at(1),
            Err(e) => analysis.notes.push(note_for("acf", e)),
        }
    }
    if cfg.estimators.power_law {
        let ceiling = default_power_law_ceiling(n)
            .min(n.div_ceil(2).saturating_sub(1))
            .max(1);
        let fit =
            acf(&abs_values, ceiling).and_then(|r| fit_powerlaw_acf(&r.correlations, ceiling));
        match fit {
            Ok(f) => analysis.power_law_abs = Some(f),
            Err(e) => analysis.notes.push(note_for("power_law_abs", e)),
        }
    }
    if cfg.estimators.hurst {
        match hurst_rs(&values, None) {
            Ok(r) => analysis.hurst = Some(r),
            Err(e) => analysis.notes.push(note_for("hurst", e)),
        }
    }
    analysis
}

fn gain_loss_block(
    values: &[f64],
    level: f64,
    run_ks: bool,
    notes: &mut Vec<String>,
) -> GainLossAnalysis {
    let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    let negative: Vec<f64> = values.iter().filter(|v| **v < 0.0).map(|v| -*v).collect();
    let zero_count = values.len() - positive.len() - negative.len();
    let mut block = GainLossAnalysis {
        positive: None,
        negative: None,
        ks: None,
        positive_count: positive.len(),
        negative_count: negative.len(),
        zero_count,
    };
    match describe(&positive) {
        Ok(d) => block.positive = Some(d),
        Err(e) => notes.push(format!("positive describe: {e}")),
    }
    match describe(&negative) {
        Ok(d) => block.negative = Some(d),
        Err(e) => notes.push(format!("negative describe: {e}")),
    }
    if run_ks {
        match ks_two_sample(&positive, &negative, level) {
            Ok(r) => block.ks = Some(r),
            Err(e) => notes.push(format!("gain-loss ks: {e}")),
        }
    }
    block
}

fn write_settlement_csv(path: &Path, records: &[&SettlementReturnRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "t",
        "eventId",
        "marketId",
        "selectionId",
        "side",
        "stake",
        "odds",
        "net_return",
    ])?;
    for r in records {
        writer.write_record(&[
            r.t.to_string(),
            r.event_id.clone(),
            r.market_id.clone(),
            r.selection_id.to_string(),
            match r.side {
                BetSide::Back => "back".to_string(),
                BetSide::Lay => "lay".to_string(),
            },
            r.stake.to_string(),
            r.odds.to_string(),
            r.net_return.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn parse_input(input: &Path) -> Result<Vec<ParsedMarketFile>> {
    let streams = open_archive(input)?;
    if streams.is_empty() {
        return Err(Error::Pipeline("no markets found".into()));
    }
    streams.par_iter().map(|s| s.parse()).collect()
}

/// Summary of a dataset-only build.
#[derive(Debug, Clone)]
pub struct DatasetSummary {
    pub markets: usize,
    pub runner_change_rows: usize,
    pub definition_rows: usize,
    pub winners: usize,
    pub warnings: usize,
    pub written: Vec<PathBuf>,
}

/// Ingest and replay only: write the runner-change, definition, and
/// winners CSVs without running any analysis.
pub fn build_datasets(input: &Path, out_dir: &Path) -> Result<DatasetSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = parse_input(input)?;
    let timelines = group_by_market(&files);
    let mut written = Vec::new();
    let mut warnings: usize = files.iter().map(|f| f.warnings.len()).sum();

    let mut rc_by_event: BTreeMap<String, Vec<RunnerChangeRecord>> = BTreeMap::new();
    let mut rc_rows = 0usize;
    for timeline in &timelines {
        let outcome = build_runner_change_dataset(timeline);
        warnings += outcome.warnings.len();
        rc_rows += outcome.records.len();
        rc_by_event
            .entry(timeline.event_id.clone())
            .or_default()
            .extend(outcome.records);
    }
    for (event_id, records) in rc_by_event.iter_mut() {
        records.sort_by_key(|r| r.pt);
        let path = out_dir.join(format!("runner_changes_{event_id}.csv"));
        dataset_csv::write_runner_changes(&path, records)?;
        written.push(path);
    }

    let (full_defs, condensed_defs) = build_definition_datasets(&timelines);
    let path = out_dir.join("market_definitions_full.csv");
    dataset_csv::write_definitions(&path, &full_defs, true)?;
    written.push(path);
    let path = out_dir.join("market_definitions.csv");
    dataset_csv::write_definitions(&path, &condensed_defs, false)?;
    written.push(path);

    let winners = extract_winners(&timelines);
    warnings += winners.warnings.len();
    let path = out_dir.join("winners.csv");
    dataset_csv::write_winners(&path, &winners.records)?;
    written.push(path);

    Ok(DatasetSummary {
        markets: timelines.len(),
        runner_change_rows: rc_rows,
        definition_rows: full_defs.len(),
        winners: winners.records.len(),
        warnings,
        written,
    })
}

/// Summary of a returns-only build.
#[derive(Debug, Clone)]
pub struct ReturnsSummary {
    pub markets_settled: usize,
    pub positive: usize,
    pub negative: usize,
    pub zeros: usize,
    pub warnings: usize,
    pub written: Vec<PathBuf>,
}

/// Ingest, replay, and write the settlement return files only.
pub fn build_returns(
    input: &Path,
    out_dir: &Path,
    commission: Option<f64>,
) -> Result<ReturnsSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = parse_input(input)?;
    let timelines = group_by_market(&files);
    let winners = extract_winners(&timelines);
    let (_, condensed_defs) = build_definition_datasets(&timelines);
    let winner_by_market: BTreeMap<&str, i64> = winners
        .records
        .iter()
        .map(|w| (w.market_id.as_str(), w.winner))
        .collect();
    let base_rate_by_market: BTreeMap<&str, f64> = condensed_defs
        .iter()
        .filter_map(|d| d.market_base_rate.map(|r| (d.market_id.as_str(), r)))
        .collect();

    let mut records: Vec<SettlementReturnRecord> = Vec::new();
    let mut markets_settled = 0usize;
    let mut zeros = 0usize;
    let mut warnings = winners.warnings.len();
    for timeline in &timelines {
        let Some(&winner) = winner_by_market.get(timeline.market_id.as_str()) else {
            continue;
        };
        let c = commission_for(
            base_rate_by_market
                .get(timeline.market_id.as_str())
                .copied(),
            commission,
        );
        let outcome = settlement_returns(timeline, winner, c)?;
        markets_settled += 1;
        zeros += outcome.zero_count;
        warnings += outcome.warnings.len();
        records.extend(outcome.positive);
        records.extend(outcome.negative);
    }
    records.sort_by_key(|r| r.t);

    let mut written = Vec::new();
    let mut events: Vec<String> = records.iter().map(|r| r.event_id.clone()).collect();
    events.sort();
    events.dedup();
    for event_id in &events {
        for (name, keep_positive) in [("returns_positive", true), ("returns_negative", false)] {
            let subset: Vec<&SettlementReturnRecord> = records
                .iter()
                .filter(|r| r.event_id == *event_id && (r.net_return > 0.0) == keep_positive)
                .collect();
            let path = out_dir.join(format!("{name}_{event_id}.csv"));
            write_settlement_csv(&path, &subset)?;
            written.push(path);
        }
    }
    let path = out_dir.join("returns_all.csv");
    write_settlement_csv(&path, &records.iter().collect::<Vec<_>>())?;
    written.push(path);

    let positive = records.iter().filter(|r| r.net_return > 0.0).count();
    Ok(ReturnsSummary {
        markets_settled,
        positive,
        negative: records.len() - positive,
        zeros,
        warnings,
        written,
    })
}

/// Run the whole pipeline per the config. Writes the normalized datasets,
/// the return files, `report.json`, the CSV report tables, and the figure
/// data files into `config.out_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<PipelineOutput> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let out = config.out_dir.as_path();
    let mut written: Vec<PathBuf> = Vec::new();

    // ---- ingest ------------------------------------------------------
    let files = parse_input(&config.input)?;

    let mut hasher = Sha256::new();
    for file in &files {
        hasher.update(file.content_hash.as_bytes());
    }
    let input_hash: String = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();

    let mut data_quality = DataQuality::default();
    let mut warning_samples: Vec<String> = Vec::new();
    for file in &files {
        data_quality.parse_warnings += file.warnings.len();
        data_quality.unknown_fields += file.stats.unknown_fields;
        warning_samples.extend(file.warnings.iter().take(3).cloned());
    }
    let messages_parsed: usize = files.iter().map(|f| f.stats.messages).sum();

    // ---- replay and datasets -------------------------------------------
    let timelines = group_by_market(&files);
    let mut replayer = Replayer::new("");
    for file in &files {
        for env in &file.messages {
            replayer.apply_envelope(env)?;
        }
    }
    data_quality.replay_warnings += replayer.warnings().len();
    warning_samples.extend(replayer.warnings().iter().take(3).cloned());

    let mut rc_by_event: BTreeMap<String, Vec<RunnerChangeRecord>> = BTreeMap::new();
    for timeline in &timelines {
        let outcome = build_runner_change_dataset(timeline);
        data_quality.replay_warnings += outcome.warnings.len();
        warning_samples.extend(outcome.warnings.iter().take(2).cloned());
        rc_by_event
            .entry(timeline.event_id.clone())
            .or_default()
            .extend(outcome.records);
    }
    for (event_id, records) in rc_by_event.iter_mut() {
        records.sort_by_key(|r| r.pt);
        let path = out.join(format!("runner_changes_{event_id}.csv"));
        dataset_csv::write_runner_changes(&path, records)?;
        written.push(path);
    }

    let (full_defs, condensed_defs) = build_definition_datasets(&timelines);
    let path = out.join("market_definitions_full.csv");
    dataset_csv::write_definitions(&path, &full_defs, true)?;
    written.push(path);
    let path = out.join("market_definitions.csv");
    dataset_csv::write_definitions(&path, &condensed_defs, false)?;
    written.push(path);

    let winners = extract_winners(&timelines);
    data_quality.replay_warnings += winners.warnings.len();
    warning_samples.extend(winners.warnings.iter().take(2).cloned());
    let path = out.join("winners.csv");
    dataset_csv::write_winners(&path, &winners.records)?;
    written.push(path);

    let winner_by_market: BTreeMap<&str, i64> = winners
        .records
        .iter()
        .map(|w| (w.market_id.as_str(), w.winner))
        .collect();
    let base_rate_by_market: BTreeMap<&str, f64> = condensed_defs
        .iter()
        .filter_map(|d| d.market_base_rate.map(|r| (d.market_id.as_str(), r)))
        .collect();

    // ---- returns ---------------------------------------------------------
    let mut market_errors: Vec<MarketError> = Vec::new();
    let mut market_series: BTreeMap<String, ReturnSeries> = BTreeMap::new();
    for timeline in &timelines {
        match market_log_returns(timeline) {
            Ok(series) if !series.is_empty() => {
                market_series.insert(timeline.market_id.clone(), series.scaled(config.scale));
            }
            Ok(_) => market_errors.push(MarketError {
                market_id: timeline.market_id.clone(),
                stage: "returns".into(),
                message: "no usable price changes".into(),
            }),
            Err(e) => market_errors.push(MarketError {
                market_id: timeline.market_id.clone(),
                stage: "returns".into(),
                message: e.to_string(),
            }),
        }
    }
    let pooled = {
        let list: Vec<ReturnSeries> = market_series.values().cloned().collect();
        concat_returns(&list)?
    };

    let mut settlement_records: Vec<SettlementReturnRecord> = Vec::new();
    for timeline in &timelines {
        let Some(&winner) = winner_by_market.get(timeline.market_id.as_str()) else {
            market_errors.push(MarketError {
                market_id: timeline.market_id.clone(),
                stage: "settlement".into(),
                message: "no resolved winner; settlement skipped".into(),
            });
            continue;
        };
        let commission = commission_for(
            base_rate_by_market
                .get(timeline.market_id.as_str())
                .copied(),
            config.commission,
        );
        let outcome = settlement_returns(timeline, winner, commission)?;
        data_quality.settlement_warnings += outcome.warnings.len();
        warning_samples.extend(outcome.warnings.iter().take(2).cloned());
        settlement_records.extend(outcome.positive);
        settlement_records.extend(outcome.negative);
    }
    settlement_records.sort_by_key(|r| r.t);

    let events: Vec<String> = rc_by_event.keys().cloned().collect();
    for event_id in &events {
        for (name, keep_positive) in [("returns_positive", true), ("returns_negative", false)] {
            let subset: Vec<&SettlementReturnRecord> = settlement_records
                .iter()
                .filter(|r| r.event_id == *event_id && (r.net_return > 0.0) == keep_positive)
                .collect();
            let path = out.join(format!("{name}_{event_id}.csv"));
            write_settlement_csv(&path, &subset)?;
            written.push(path);
        }
    }
    let path = out.join("returns_all.csv");
    write_settlement_csv(&path, &settlement_records.iter().collect::<Vec<_>>())?;
    written.push(path);

    // ---- pooled estimators --------------------------------------------------
    let pooled_values = pooled.values();
    let nonzero: Vec<f64> = pooled_values
        .iter()
        .copied()
        .filter(|v| *v != 0.0)
        .collect();
    data_quality.zero_returns_excluded = pooled_values.len() - nonzero.len();

    let mut pooled_block = PooledAnalysis {
        series: "log_returns".into(),
        n: pooled_values.len(),
        descriptive: None,
        gain_loss: None,
        hill: None,
        gg_fit: None,
        gg_fit_mle: None,
        notes: Vec::new(),
    };
    if config.estimators.descriptive {
        match describe(&pooled_values) {
            Ok(d) => pooled_block.descriptive = Some(d),
            Err(e) => pooled_block.notes.push(format!("describe: {e}")),
        }
        let mut notes = Vec::new();
        pooled_block.gain_loss = Some(gain_loss_block(
            &pooled_values,
            config.ks_level,
            config.estimators.ks,
            &mut notes,
        ));
        pooled_block.notes.extend(notes);
    }
    if config.estimators.hill {
        match hill(&nonzero, &config.k_fractions) {
            Ok(curve) => pooled_block.hill = Some(curve),
            Err(e) => pooled_block.notes.push(format!("hill: {e}")),
        }
    }
    if config.estimators.gg_fit {
        match fit_gg(&pooled_values) {
            Ok(fit) => pooled_block.gg_fit = Some(fit),
            Err(e) => pooled_block.notes.push(format!("gg_fit: {e}")),
        }
        match fit_gg_mle(&pooled_values) {
            Ok(fit) => pooled_block.gg_fit_mle = Some(fit),
            Err(e) => pooled_block.notes.push(format!("gg_fit_mle: {e}")),
        }
    }

    let mut settlement_notes = Vec::new();
    let settlement_values: Vec<f64> = settlement_records.iter().map(|r| r.net_return).collect();
    let settlement_block = gain_loss_block(
        &settlement_values,
        config.ks_level,
        config.estimators.ks,
        &mut settlement_notes,
    );
    pooled_block.notes.extend(
        settlement_notes
            .into_iter()
            .map(|n| format!("settlement {n}")),
    );

    // ---- per-market estimators ------------------------------------------------
    let event_by_market: BTreeMap<&str, &str> = timelines
        .iter()
        .map(|t| (t.market_id.as_str(), t.event_id.as_str()))
        .collect();
    let series_list: Vec<(&String, &ReturnSeries)> = market_series.iter().collect();
    let per_market: Vec<MarketAnalysis> = series_list
        .par_iter()
        .map(|(market_id, series)| {
            let event_id = event_by_market
                .get(market_id.as_str())
                .copied()
                .unwrap_or("");
            analyze_market(market_id, event_id, series, config)
        })
        .collect();

    let exponents: Vec<f64> = per_market
        .iter()
        .filter_map(|m| m.power_law_abs.map(|f| f.exponent))
        .collect();
    let power_law_summary = if config.estimators.power_law {
        PowerLawSummary::from_exponents(&exponents)
    } else {
        None
    };

    warning_samples.truncate(12);
    data_quality.samples = warning_samples;

    let report = AnalysisReport {
        provenance: Provenance {
            input_hash,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            markets_parsed: timelines.len(),
            messages_parsed,
            config: config.clone(),
        },
        log_returns: pooled_block,
        settlement: settlement_block,
        per_market,
        power_law_summary,
        market_errors,
        data_quality,
    };

    let store = SeriesStore {
        pooled,
        markets: market_series,
    };

    let report_path = out.join("report.json");
    std::fs::write(&report_path, report.to_json()).map_err(|e| Error::io(&report_path, e))?;
    written.push(report_path);
    written.extend(write_report_tables(&report, out)?);
    written.extend(emit_plot_data(&report, &store, out, config.max_lag)?);

    Ok(PipelineOutput {
        report,
        store,
        written,
    })
}
