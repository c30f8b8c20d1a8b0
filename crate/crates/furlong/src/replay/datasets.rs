//! The four normalized datasets: runner changes, full and condensed market
//! definitions, and winners.

use std::collections::{BTreeMap, BTreeSet};

use crate::ingest::{
    format_time, MarketChange, MarketDefinitionMsg, ParsedMarketFile, PriceLevel,
};

/// One market's change stream, flattened to (publish time, change) pairs.
#[derive(Debug, Clone)]
pub struct MarketTimeline {
    pub event_id: String,
    pub market_id: String,
    pub changes: Vec<(i64, MarketChange)>,
}

/// Split parsed files into per-market timelines, preserving input order.
///
/// A single file normally holds a single market, but concatenated streams
/// are handled by routing each change on its own market id.
pub fn group_by_market(files: &[ParsedMarketFile]) -> Vec<MarketTimeline> {
    let mut map: BTreeMap<String, MarketTimeline> = BTreeMap::new();
    for file in files {
        for env in &file.messages {
            for mc in &env.mc {
                let timeline = map.entry(mc.id.clone()).or_insert_with(|| MarketTimeline {
                    event_id: file.event_id.clone(),
                    market_id: mc.id.clone(),
                    changes: Vec::new(),
                });
                if let Some(def) = &mc.market_definition {
                    if let Some(event_id) = &def.event_id {
                        timeline.event_id = event_id.clone();
                    }
                }
                timeline.changes.push((env.pt, mc.clone()));
            }
        }
    }
    map.into_values().collect()
}

/// One row of the runner change dataset.
///
/// Field set and order mirror the exported CSV: the message's own delta
/// fields plus formatted time, the joined in-play flag, and identity.
#[derive(Debug, Clone, PartialEq)]
pub struct RunnerChangeRecord {
    pub atb: Option<Vec<PriceLevel>>,
    pub id: i64,
    pub t: String,
    pub in_play: bool,
    pub spn: Option<f64>,
    pub spf: Option<f64>,
    pub atl: Option<Vec<PriceLevel>>,
    pub spl: Option<Vec<PriceLevel>>,
    pub trd: Option<Vec<PriceLevel>>,
    pub ltp: Option<f64>,
    pub tv: Option<f64>,
    pub spb: Option<Vec<PriceLevel>>,
    pub event_id: String,
    pub market_id: String,
    /// Millisecond publish time backing `t`; not exported.
    pub pt: i64,
}

/// One row of the market definition dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketDefinitionRecord {
    pub market_id: String,
    pub turn_in_play_enabled: Option<bool>,
    pub market_base_rate: Option<f64>,
    pub event_id: String,
    pub market_time: Option<String>,
    pub suspend_time: Option<String>,
    pub complete: Option<bool>,
    pub number_of_active_runners: Option<i64>,
    /// Present in the full-history variant only.
    pub in_play: Option<bool>,
    /// Millisecond publish time of the definition; not exported.
    pub pt: i64,
}

/// One row of the winners dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct WinnerRecord {
    pub market_id: String,
    pub winner: i64,
    pub event_id: String,
    pub number_of_runners: usize,
}

/// Result of a dataset build plus any data-quality warnings.
#[derive(Debug, Clone, Default)]
pub struct BuildOutcome<T> {
    pub records: Vec<T>,
    pub warnings: Vec<String>,
}

/// In-play state changes of one market, ordered by publish time.
fn in_play_track(timeline: &MarketTimeline) -> Vec<(i64, bool)> {
    let mut track: Vec<(i64, bool)> = Vec::new();
    let mut last = false;
    for (pt, mc) in &timeline.changes {
        if let Some(def) = &mc.market_definition {
            if let Some(in_play) = def.in_play {
                last = in_play;
            }
            track.push((*pt, last));
        }
    }
    track.sort_by_key(|(pt, _)| *pt);
    track
}

/// Latest definition in-play value with publish time at or before `pt`.
fn join_in_play(track: &[(i64, bool)], pt: i64) -> Option<bool> {
    let mut result = None;
    for (def_pt, in_play) in track {
        if *def_pt <= pt {
            result = Some(*in_play);
        } else {
            break;
        }
    }
    result
}

/// Build the runner change dataset for one market timeline.
///
/// Each runner change message becomes one record. The in-play flag is
/// joined from the latest definition at or before the record's publish
/// time; records before any definition get `false` plus a warning. Output
/// is sorted ascending by time with input order breaking ties.
pub fn build_runner_change_dataset(timeline: &MarketTimeline) -> BuildOutcome<RunnerChangeRecord> {
    let track = in_play_track(timeline);
    let mut records = Vec::new();
    let mut warnings = Vec::new();

    for (pt, mc) in &timeline.changes {
        for rc in mc.rc.iter().flatten() {
            let in_play = match join_in_play(&track, *pt) {
                Some(flag) => flag,
                None => {
                    warnings.push(format!(
                        "{}: runner change for selection {} at pt {pt} precedes any market definition; in-play recorded as false",
                        timeline.market_id, rc.id
                    ));
                    false
                }
            };
            records.push(RunnerChangeRecord {
                atb: rc.atb.clone(),
                id: rc.id,
                t: format_time(*pt),
                in_play,
                spn: rc.spn,
                spf: rc.spf,
                atl: rc.atl.clone(),
                spl: rc.spl.clone(),
                trd: rc.trd.clone(),
                ltp: rc.ltp,
                tv: rc.tv,
                spb: rc.spb.clone(),
                event_id: timeline.event_id.clone(),
                market_id: timeline.market_id.clone(),
                pt: *pt,
            });
        }
    }
    records.sort_by_key(|r| r.pt);
    BuildOutcome { records, warnings }
}

fn definition_record(
    timeline: &MarketTimeline,
    pt: i64,
    def: &MarketDefinitionMsg,
    in_play: Option<bool>,
) -> MarketDefinitionRecord {
    MarketDefinitionRecord {
        market_id: timeline.market_id.clone(),
        turn_in_play_enabled: def.turn_in_play_enabled,
        market_base_rate: def.market_base_rate,
        event_id: def.event_id.clone().unwrap_or_else(|| timeline.event_id.clone()),
        market_time: def.market_time.clone(),
        suspend_time: def.suspend_time.clone(),
        complete: def.complete,
        number_of_active_runners: def.number_of_active_runners,
        in_play,
        pt,
    }
}

/// Build the full and condensed market definition datasets.
///
/// Full keeps every definition change with its in-play flag. Condensed
/// keeps one representative per market: the last definition while the
/// market status was still OPEN, falling back to the last overall.
pub fn build_definition_datasets(
    timelines: &[MarketTimeline],
) -> (Vec<MarketDefinitionRecord>, Vec<MarketDefinitionRecord>) {
    let mut full = Vec::new();
    let mut condensed = Vec::new();

    for timeline in timelines {
        let mut market_full: Vec<(MarketDefinitionRecord, Option<String>)> = Vec::new();
        let mut in_play = false;
        for (pt, mc) in &timeline.changes {
            if let Some(def) = &mc.market_definition {
                if let Some(flag) = def.in_play {
                    in_play = flag;
                }
                market_full.push((
                    definition_record(timeline, *pt, def, Some(in_play)),
                    def.status.clone(),
                ));
            }
        }
        market_full.sort_by_key(|(r, _)| r.pt);

        let representative = market_full
            .iter()
            .rev()
            .find(|(_, status)| status.as_deref() == Some("OPEN"))
            .or_else(|| market_full.last());
        if let Some((rep, _)) = representative {
            let mut rep = rep.clone();
            rep.in_play = None;
            condensed.push(rep);
        }
        full.extend(market_full.into_iter().map(|(r, _)| r));
    }
    (full, condensed)
}

/// Extract one winner row per market whose definition history ends with
/// exactly one runner in status WINNER.
///
/// The runner count covers every selection that ever held status ACTIVE
/// while the market status was OPEN. Markets with zero or multiple winners
/// are excluded with a warning.
pub fn extract_winners(timelines: &[MarketTimeline]) -> BuildOutcome<WinnerRecord> {
    let mut records = Vec::new();
    let mut warnings = Vec::new();

    for timeline in timelines {
        let mut final_status: BTreeMap<i64, String> = BTreeMap::new();
        let mut available: BTreeSet<i64> = BTreeSet::new();
        let mut saw_definition = false;

        for (_, mc) in &timeline.changes {
            if let Some(def) = &mc.market_definition {
                saw_definition = true;
                let open = def.status.as_deref() == Some("OPEN");
                for rd in def.runners.iter().flatten() {
                    if let Some(status) = &rd.status {
                        final_status.insert(rd.id, status.clone());
                        if open && status == "ACTIVE" {
                            available.insert(rd.id);
                        }
                    }
                }
            }
        }
        if !saw_definition {
            warnings.push(format!(
                "{}: no market definitions; winner unknown, market excluded",
                timeline.market_id
            ));
            continue;
        }
        let winners: Vec<i64> = final_status
            .iter()
            .filter(|(_, s)| s.as_str() == "WINNER")
            .map(|(id, _)| *id)
            .collect();
        match winners.as_slice() {
            [winner] => {
                let n = available.len();
                if !(3..=21).contains(&n) {
                    warnings.push(format!(
                        "{}: {n} runners is outside the expected 3..=21 range",
                        timeline.market_id
                    ));
                }
                records.push(WinnerRecord {
                    market_id: timeline.market_id.clone(),
                    winner: *winner,
                    event_id: timeline.event_id.clone(),
                    number_of_runners: n,
                });
            }
            [] => warnings.push(format!(
                "{}: no runner finished with status WINNER; market excluded",
                timeline.market_id
            )),
            many => warnings.push(format!(
                "{}: {} runners finished with status WINNER; market excluded",
                timeline.market_id,
                many.len()
            )),
        }
    }
    BuildOutcome { records, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_message;

    fn timeline(lines: &[&str]) -> MarketTimeline {
        let messages: Vec<_> = lines
            .iter()
            .map(|l| parse_message(l, 1).unwrap())
            .collect();
        let file = ParsedMarketFile {
            event_id: "ev1".into(),
            market_id: "1.1".into(),
            messages,
            stats: Default::default(),
            warnings: Vec::new(),
            content_hash: String::new(),
        };
        group_by_market(&[file]).remove(0)
    }

    #[test]
    fn in_play_flip_joins_between_changes() {
        let tl = timeline(&[
            r#"{"pt":10,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":false}}]}"#,
            r#"{"pt":20,"mc":[{"id":"1.1","rc":[{"id":7,"ltp":2.0}]}]}"#,
            r#"{"pt":30,"mc":[{"id":"1.1","rc":[{"id":7,"ltp":2.1}]}]}"#,
            r#"{"pt":40,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":true}}]}"#,
            r#"{"pt":50,"mc":[{"id":"1.1","rc":[{"id":7,"ltp":2.2}]}]}"#,
        ]);
        let out = build_runner_change_dataset(&tl);
        let flags: Vec<bool> = out.records.iter().map(|r| r.in_play).collect();
        assert_eq!(flags, vec![false, false, true]);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn empty_stream_builds_empty_dataset() {
        let tl = MarketTimeline {
            event_id: "ev".into(),
            market_id: "1.1".into(),
            changes: Vec::new(),
        };
        assert!(build_runner_change_dataset(&tl).records.is_empty());
    }

    #[test]
    fn out_of_order_input_is_sorted_by_time() {
        let tl = timeline(&[
            r#"{"pt":30,"mc":[{"id":"1.1","rc":[{"id":7,"ltp":2.1}]}]}"#,
            r#"{"pt":10,"mc":[{"id":"1.1","rc":[{"id":7,"ltp":2.0}]}]}"#,
        ]);
        let out = build_runner_change_dataset(&tl);
        assert_eq!(out.records[0].pt, 10);
        assert_eq!(out.records[1].pt, 30);
        // both precede any definition
        assert_eq!(out.warnings.len(), 2);
        assert!(out.records.iter().all(|r| !r.in_play));
    }

    #[test]
    fn five_definitions_condense_to_one() {
        let lines: Vec<String> = (0..5)
            .map(|i| {
                format!(
                    r#"{{"pt":{},"mc":[{{"id":"1.1","marketDefinition":{{"status":"{}","inPlay":false,"numberOfActiveRunners":{}}}}}]}}"#,
                    10 + i,
                    if i < 4 { "OPEN" } else { "SUSPENDED" },
                    10 - i
                )
            })
            .collect();
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let tl = timeline(&refs);
        let (full, condensed) = build_definition_datasets(&[tl]);
        assert_eq!(full.len(), 5);
        assert_eq!(condensed.len(), 1);
        // representative is the last OPEN definition (pt 13), not the SUSPENDED one
        assert_eq!(condensed[0].pt, 13);
        assert_eq!(condensed[0].number_of_active_runners, Some(7));
        assert_eq!(condensed[0].in_play, None);
        assert!(full.iter().all(|r| r.in_play.is_some()));
    }

    #[test]
    fn no_definitions_builds_both_empty() {
        let tl = timeline(&[r#"{"pt":10,"mc":[{"id":"1.1","rc":[{"id":7,"ltp":2.0}]}]}"#]);
        let (full, condensed) = build_definition_datasets(&[tl]);
        assert!(full.is_empty());
        assert!(condensed.is_empty());
    }

    #[test]
    fn interleaved_markets_condense_per_market() {
        let lines = [
            r#"{"pt":10,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":false}}]}"#,
            r#"{"pt":11,"mc":[{"id":"1.2","marketDefinition":{"status":"OPEN","inPlay":false}}]}"#,
            r#"{"pt":12,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":true}}]}"#,
        ];
        let messages: Vec<_> = lines.iter().map(|l| parse_message(l, 1).unwrap()).collect();
        let file = ParsedMarketFile {
            event_id: "ev1".into(),
            market_id: "multi".into(),
            messages,
            stats: Default::default(),
            warnings: Vec::new(),
            content_hash: String::new(),
        };
        let timelines = group_by_market(&[file]);
        assert_eq!(timelines.len(), 2);
        let (full, condensed) = build_definition_datasets(&timelines);
        assert_eq!(full.len(), 3);
        assert_eq!(condensed.len(), 2);
    }

    #[test]
    fn winner_with_statuses_maps_directly() {
        let tl = timeline(&[
            r#"{"pt":10,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":false,"runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"},{"id":3,"status":"ACTIVE"}]}}]}"#,
            r#"{"pt":90,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","inPlay":true,"runners":[{"id":1,"status":"WINNER"},{"id":2,"status":"LOSER"},{"id":3,"status":"LOSER"}]}}]}"#,
        ]);
        let out = extract_winners(&[tl]);
        assert_eq!(out.records.len(), 1);
        let rec = &out.records[0];
        assert_eq!(rec.winner, 1);
        assert_eq!(rec.number_of_runners, 3);
        assert_eq!(rec.event_id, "ev1");
    }

    #[test]
    fn removed_runner_still_counts_if_it_was_active_while_open() {
        let tl = timeline(&[
            r#"{"pt":10,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":false,"runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"},{"id":3,"status":"ACTIVE"},{"id":4,"status":"ACTIVE"}]}}]}"#,
            r#"{"pt":40,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":false,"runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"},{"id":3,"status":"ACTIVE"},{"id":4,"status":"REMOVED"}]}}]}"#,
            r#"{"pt":90,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","inPlay":true,"runners":[{"id":1,"status":"WINNER"},{"id":2,"status":"LOSER"},{"id":3,"status":"LOSER"},{"id":4,"status":"REMOVED"}]}}]}"#,
        ]);
        let out = extract_winners(&[tl]);
        assert_eq!(out.records[0].number_of_runners, 4);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn no_winner_excludes_market_with_warning() {
        let tl = timeline(&[
            r#"{"pt":10,"mc":[{"id":"1.1","marketDefinition":{"status":"OPEN","inPlay":false,"runners":[{"id":1,"status":"ACTIVE"},{"id":2,"status":"ACTIVE"},{"id":3,"status":"ACTIVE"}]}}]}"#,
            r#"{"pt":90,"mc":[{"id":"1.1","marketDefinition":{"status":"CLOSED","inPlay":true,"runners":[{"id":1,"status":"LOSER"},{"id":2,"status":"LOSER"},{"id":3,"status":"LOSER"}]}}]}"#,
        ]);
        let out = extract_winners(&[tl]);
        assert!(out.records.is_empty());
        assert_eq!(out.warnings.len(), 1);
    }
}
