//! CSV export and re-import of the normalized datasets.
//!
//! Headers match the dataset field names exactly; absent values are empty
//! cells (never "0"); ladders are embedded as compact JSON arrays. Every
//! writer has a matching reader so exports round-trip losslessly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::PriceLevel;
use crate::replay::datasets::{MarketDefinitionRecord, RunnerChangeRecord, WinnerRecord};

pub const RUNNER_CHANGE_HEADER: [&str; 14] = [
    "atb", "id", "t", "inPlay", "spn", "spf", "atl", "spl", "trd", "ltp", "tv", "spb", "eventId",
    "marketId",
];

pub const DEFINITION_HEADER: [&str; 8] = [
    "id",
    "turnInPlayEnabled",
    "marketBaseRate",
    "eventId",
    "marketTime",
    "suspendTime",
    "complete",
    "numberOfActiveRunners",
];

pub const WINNER_HEADER: [&str; 4] = ["id", "winner", "eventId", "numberOfRunners"];

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn ladder_cell(v: &Option<Vec<PriceLevel>>) -> String {
    match v {
        Some(levels) => serde_json::to_string(levels).expect("ladder serializes"),
        None => String::new(),
    }
}

fn parse_opt_f64(cell: &str, line: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>().map(Some).map_err(|e| Error::Schema {
        line,
        reason: format!("bad float {cell:?}: {e}"),
    })
}

fn parse_opt_bool(cell: &str, line: usize) -> Result<Option<bool>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<bool>().map(Some).map_err(|e| Error::Schema {
        line,
        reason: format!("bad bool {cell:?}: {e}"),
    })
}

fn parse_ladder(cell: &str, line: usize) -> Result<Option<Vec<PriceLevel>>> {
    if cell.is_empty() {
        return Ok(None);
    }
    serde_json::from_str(cell).map(Some).map_err(|e| Error::Schema {
        line,
        reason: format!("bad ladder {cell:?}: {e}"),
    })
}

fn parse_time_to_pt(t: &str, line: usize) -> Result<i64> {
    chrono::NaiveDateTime::parse_from_str(t, "%Y-%m-%d %H:%M:%S")
        .map(|dt| dt.and_utc().timestamp_millis())
        .map_err(|e| Error::Schema {
            line,
            reason: format!("bad time {t:?}: {e}"),
        })
}

/// Write the runner change dataset (14 columns).
pub fn write_runner_changes(path: &Path, records: &[RunnerChangeRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(RUNNER_CHANGE_HEADER)?;
    for r in records {
        writer.write_record(&[
            ladder_cell(&r.atb),
            r.id.to_string(),
            r.t.clone(),
            r.in_play.to_string(),
            opt_f64(r.spn),
            opt_f64(r.spf),
            ladder_cell(&r.atl),
            ladder_cell(&r.spl),
            ladder_cell(&r.trd),
            opt_f64(r.ltp),
            opt_f64(r.tv),
            ladder_cell(&r.spb),
            r.event_id.clone(),
            r.market_id.clone(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a runner change CSV back into records.
///
/// `pt` is reconstructed from the formatted time and therefore carries
/// second precision.
pub fn read_runner_changes(path: &Path) -> Result<Vec<RunnerChangeRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let t = row[2].to_string();
        let pt = parse_time_to_pt(&t, line)?;
        out.push(RunnerChangeRecord {
            atb: parse_ladder(&row[0], line)?,
            id: row[1].parse().map_err(|e| Error::Schema {
                line,
                reason: format!("bad id: {e}"),
            })?,
            t,
            in_play: row[3].parse().map_err(|e| Error::Schema {
                line,
                reason: format!("bad inPlay: {e}"),
            })?,
            spn: parse_opt_f64(&row[4], line)?,
            spf: parse_opt_f64(&row[5], line)?,
            atl: parse_ladder(&row[6], line)?,
            spl: parse_ladder(&row[7], line)?,
            trd: parse_ladder(&row[8], line)?,
            ltp: parse_opt_f64(&row[9], line)?,
            tv: parse_opt_f64(&row[10], line)?,
            spb: parse_ladder(&row[11], line)?,
            event_id: row[12].to_string(),
            market_id: row[13].to_string(),
            pt,
        });
    }
    Ok(out)
}

/// Write a definition dataset. `include_in_play` selects the full-history
/// layout; the condensed layout drops that column.
pub fn write_definitions(
    path: &Path,
    records: &[MarketDefinitionRecord],
    include_in_play: bool,
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = DEFINITION_HEADER.to_vec();
    if include_in_play {
        header.push("inPlay");
    }
    writer.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.market_id.clone(),
            opt_bool(r.turn_in_play_enabled),
            opt_f64(r.market_base_rate),
            r.event_id.clone(),
            r.market_time.clone().unwrap_or_default(),
            r.suspend_time.clone().unwrap_or_default(),
            opt_bool(r.complete),
            r.number_of_active_runners
                .map(|n| n.to_string())
                .unwrap_or_default(),
        ];
        if include_in_play {
            row.push(opt_bool(r.in_play));
        }
        writer.write_record(&row)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a definition CSV (either layout; detected from the header).
pub fn read_definitions(path: &Path) -> Result<Vec<MarketDefinitionRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let has_in_play = reader
        .headers()?
        .iter()
        .any(|h| h == "inPlay");
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let empty_to_none = |s: &str| {
            if s.is_empty() {
                None
            } else {
                Some(s.to_string())
            }
        };
        out.push(MarketDefinitionRecord {
            market_id: row[0].to_string(),
            turn_in_play_enabled: parse_opt_bool(&row[1], line)?,
            market_base_rate: parse_opt_f64(&row[2], line)?,
            event_id: row[3].to_string(),
            market_time: empty_to_none(&row[4]),
            suspend_time: empty_to_none(&row[5]),
            complete: parse_opt_bool(&row[6], line)?,
            number_of_active_runners: if row[7].is_empty() {
                None
            } else {
                Some(row[7].parse().map_err(|e| Error::Schema {
                    line,
                    reason: format!("bad runner count: {e}"),
                })?)
            },
            in_play: if has_in_play {
                parse_opt_bool(&row[8], line)?
            } else {
                None
            },
            pt: 0,
        });
    }
    Ok(out)
}

/// Write the winners dataset.
pub fn write_winners(path: &Path, records: &[WinnerRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(WINNER_HEADER)?;
    for r in records {
        writer.write_record(&[
            r.market_id.clone(),
            r.winner.to_string(),
            r.event_id.clone(),
            r.number_of_runners.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a winners CSV back into records.
pub fn read_winners(path: &Path) -> Result<Vec<WinnerRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let bad = |what: &str, e: std::num::ParseIntError| Error::Schema {
            line,
            reason: format!("bad {what}: {e}"),
        };
        out.push(WinnerRecord {
            market_id: row[0].to_string(),
            winner: row[1].parse().map_err(|e| bad("winner", e))?,
            event_id: row[2].to_string(),
            number_of_runners: row[3].parse().map_err(|e| bad("runner count", e))?,
        });
    }
    Ok(out)
}
