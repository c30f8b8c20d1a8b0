//! Typed market change messages and the line decoder.
//!
//! One stream line is one JSON object: an envelope (`op`, `clk`, `pt`, `mc`)
//! whose market changes carry either a market definition or a list of runner
//! changes. Nearly every field is nullable and delta based: absent means
//! "unchanged", and the types below preserve absence instead of defaulting.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One `[price, size]` ladder level as it appears on the wire.
///
/// A size of zero is a deletion marker for that price level on replay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "(f64, f64)", from = "(f64, f64)")]
pub struct PriceLevel {
    pub price: f64,
    pub size: f64,
}

impl From<(f64, f64)> for PriceLevel {
    fn from((price, size): (f64, f64)) -> Self {
        PriceLevel { price, size }
    }
}

impl From<PriceLevel> for (f64, f64) {
    fn from(level: PriceLevel) -> Self {
        (level.price, level.size)
    }
}

/// Valid decimal-odds range on the exchange.
pub const MIN_ODDS: f64 = 1.01;
pub const MAX_ODDS: f64 = 1000.0;

fn is_empty_map(m: &BTreeMap<String, Value>) -> bool {
    m.is_empty()
}

/// Envelope common to every stream message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageEnvelope {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clk: Option<String>,
    /// Publish time, integer milliseconds since the Unix epoch.
    pub pt: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mc: Vec<MarketChange>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extra: BTreeMap<String, Value>,
}

/// One market's change payload inside an envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketChange {
    pub id: String,
    #[serde(rename = "marketDefinition", skip_serializing_if = "Option::is_none")]
    pub market_definition: Option<MarketDefinitionMsg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rc: Option<Vec<RunnerChangeMsg>>,
    /// Total traded volume across the market.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv: Option<f64>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extra: BTreeMap<String, Value>,
}

/// Market definition payload.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MarketDefinitionMsg {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsp_market: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub turn_in_play_enabled: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub persistence_enabled: Option<bool>,
    /// Commission rate applicable to the market, in percent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub market_base_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub number_of_winners: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betting_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub market_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub market_time: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suspend_time: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsp_reconciled: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_play: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_matching: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runners_voidable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub number_of_active_runners: Option<i64>,
    /// Seconds an order is held before entering the market (in-play delay).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bet_delay: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regulators: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discount_allowed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timezone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub open_date: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub event_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runners: Option<Vec<RunnerDefinition>>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extra: BTreeMap<String, Value>,
}

/// Per-runner entry inside a market definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunnerDefinition {
    pub id: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sort_priority: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removal_date: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adjustment_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bsp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hc: Option<f64>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extra: BTreeMap<String, Value>,
}

/// Runner change payload: price/volume deltas for one selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunnerChangeMsg {
    pub id: i64,
    /// Last traded price, decimal odds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ltp: Option<f64>,
    /// Cumulative traded volume for this selection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv: Option<f64>,
    /// Traded price/volume ladder.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trd: Option<Vec<PriceLevel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atb: Option<Vec<PriceLevel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atl: Option<Vec<PriceLevel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spb: Option<Vec<PriceLevel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spl: Option<Vec<PriceLevel>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spn: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hc: Option<f64>,
    #[serde(flatten, skip_serializing_if = "is_empty_map")]
    pub extra: BTreeMap<String, Value>,
}

impl RunnerChangeMsg {
    /// Bare change for a selection with every delta field absent.
    pub fn empty(id: i64) -> Self {
        RunnerChangeMsg {
            id,
            ltp: None,
            tv: None,
            trd: None,
            atb: None,
            atl: None,
            spb: None,
            spl: None,
            spn: None,
            spf: None,
            hc: None,
            extra: BTreeMap::new(),
        }
    }

    fn ladders(&self) -> impl Iterator<Item = &Vec<PriceLevel>> {
        [&self.trd, &self.atb, &self.atl, &self.spb, &self.spl]
            .into_iter()
            .flatten()
    }

    /// True if every ladder price is within the decimal-odds range and
    /// every size is non-negative.
    pub fn ladders_in_bounds(&self) -> bool {
        self.ladders().all(|ladder| {
            ladder
                .iter()
                .all(|l| l.price >= MIN_ODDS && l.price <= MAX_ODDS && l.size >= 0.0)
        })
    }
}

impl MessageEnvelope {
    /// Count of JSON keys that did not map to a recognized field, summed
    /// over the envelope and every nested payload.
    pub fn unknown_field_count(&self) -> usize {
        let mut n = self.extra.len();
        for mc in &self.mc {
            n += mc.extra.len();
            if let Some(def) = &mc.market_definition {
                n += def.extra.len();
                if let Some(runners) = &def.runners {
                    n += runners.iter().map(|r| r.extra.len()).sum::<usize>();
                }
            }
            if let Some(rc) = &mc.rc {
                n += rc.iter().map(|r| r.extra.len()).sum::<usize>();
            }
        }
        n
    }
}

/// Decode one stream line into a typed envelope.
///
/// `line_no` is only used for error reporting. Malformed JSON and schema
/// violations (missing or non-integer `pt`) are distinguished so callers
/// can report them separately.
pub fn parse_message(line: &str, line_no: usize) -> Result<MessageEnvelope> {
    match serde_json::from_str::<MessageEnvelope>(line) {
        Ok(envelope) => Ok(envelope),
        Err(e) if e.is_syntax() || e.is_eof() => Err(Error::Json {
            line: line_no,
            reason: e.to_string(),
        }),
        Err(e) => Err(Error::Schema {
            line: line_no,
            reason: e.to_string(),
        }),
    }
}

/// Render a publish time as a GMT `YYYY-MM-DD HH:MM:SS` string.
///
/// The sub-second part is truncated toward zero.
pub fn format_time(pt_millis: i64) -> String {
    let secs = pt_millis.div_euclid(1000);
    match chrono::DateTime::from_timestamp(secs, 0) {
        Some(dt) => dt.format("%Y-%m-%d %H:%M:%S").to_string(),
        None => format!("invalid-time({pt_millis})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_runner_change() {
        let line = r#"{"op":"mcm","clk":"3984067612","pt":1609459200000,"mc":[{"id":"1.122946937","rc":[{"ltp":3.5,"id":123456,"tv":150.0}]}]}"#;
        let env = parse_message(line, 1).unwrap();
        assert_eq!(env.op.as_deref(), Some("mcm"));
        assert_eq!(env.clk.as_deref(), Some("3984067612"));
        assert_eq!(env.pt, 1609459200000);
        assert_eq!(env.mc.len(), 1);
        let mc = &env.mc[0];
        assert_eq!(mc.id, "1.122946937");
        assert!(mc.market_definition.is_none());
        let rc = mc.rc.as_ref().unwrap();
        assert_eq!(rc.len(), 1);
        assert_eq!(rc[0].id, 123456);
        assert_eq!(rc[0].ltp, Some(3.5));
        assert_eq!(rc[0].tv, Some(150.0));
        assert!(rc[0].atb.is_none());
        assert!(rc[0].trd.is_none());
        assert!(rc[0].spn.is_none());
        assert_eq!(env.unknown_field_count(), 0);
    }

    #[test]
    fn absent_ltp_stays_absent() {
        let line = r#"{"op":"mcm","pt":1,"mc":[{"id":"1.1","rc":[{"id":7,"tv":10.0}]}]}"#;
        let env = parse_message(line, 1).unwrap();
        let rc = &env.mc[0].rc.as_ref().unwrap()[0];
        assert_eq!(rc.ltp, None);
        assert_eq!(rc.tv, Some(10.0));
    }

    #[test]
    fn truncated_json_is_a_parse_error() {
        let err = parse_message(r#"{"op":"#, 42).unwrap_err();
        match err {
            Error::Json { line, .. } => assert_eq!(line, 42),
            other => panic!("expected Json error, got {other:?}"),
        }
    }

    #[test]
    fn missing_pt_is_a_schema_error() {
        let err = parse_message(r#"{"op":"mcm","mc":[]}"#, 3).unwrap_err();
        assert!(matches!(err, Error::Schema { line: 3, .. }));
    }

    #[test]
    fn non_integer_pt_is_a_schema_error() {
        let err = parse_message(r#"{"op":"mcm","pt":12.5,"mc":[]}"#, 9).unwrap_err();
        assert!(matches!(err, Error::Schema { line: 9, .. }));
    }

    #[test]
    fn unknown_fields_are_kept_and_counted() {
        let line = r#"{"op":"mcm","pt":5,"mystery":1,"mc":[{"id":"1.2","img":true,"rc":[{"id":1,"zz":3}]}]}"#;
        let env = parse_message(line, 1).unwrap();
        assert_eq!(env.unknown_field_count(), 3);
    }

    #[test]
    fn ladders_decode_as_price_size_pairs() {
        let line = r#"{"pt":5,"mc":[{"id":"1.2","rc":[{"id":1,"atb":[[3.5,10.0],[3.45,2.5]],"atl":[[3.55,4.0]]}]}]}"#;
        let env = parse_message(line, 1).unwrap();
        let rc = &env.mc[0].rc.as_ref().unwrap()[0];
        let atb = rc.atb.as_ref().unwrap();
        assert_eq!(atb[0], PriceLevel { price: 3.5, size: 10.0 });
        assert_eq!(atb[1].price, 3.45);
        assert!(rc.ladders_in_bounds());
    }

    #[test]
    fn out_of_range_ladder_detected() {
        let line = r#"{"pt":5,"mc":[{"id":"1.2","rc":[{"id":1,"atb":[[1.005,10.0]]}]}]}"#;
        let env = parse_message(line, 1).unwrap();
        assert!(!env.mc[0].rc.as_ref().unwrap()[0].ladders_in_bounds());
    }

    #[test]
    fn market_definition_round_trip() {
        let line = r#"{"op":"mcm","pt":77,"mc":[{"id":"1.9","marketDefinition":{"venue":"Ascot","bspMarket":true,"turnInPlayEnabled":true,"marketBaseRate":5.0,"eventId":"30000001","eventType":"7","numberOfWinners":1,"bettingType":"ODDS","marketType":"WIN","marketTime":"2021-01-01T13:00:00.000Z","status":"OPEN","inPlay":false,"numberOfActiveRunners":3,"betDelay":0,"regulators":["MR_INT"],"version":1,"runners":[{"id":101,"status":"ACTIVE","sortPriority":1},{"id":102,"status":"ACTIVE","sortPriority":2},{"id":103,"status":"ACTIVE","sortPriority":3}]}}]}"#;
        let env = parse_message(line, 1).unwrap();
        let def = env.mc[0].market_definition.as_ref().unwrap();
        assert_eq!(def.venue.as_deref(), Some("Ascot"));
        assert_eq!(def.market_base_rate, Some(5.0));
        assert_eq!(def.number_of_active_runners, Some(3));
        assert_eq!(def.runners.as_ref().unwrap().len(), 3);
        assert_eq!(env.unknown_field_count(), 0);

        let serialized = serde_json::to_string(&env).unwrap();
        let reparsed = parse_message(&serialized, 1).unwrap();
        assert_eq!(env, reparsed);
    }

    #[test]
    fn format_time_epoch_and_truncation() {
        assert_eq!(format_time(0), "1970-01-01 00:00:00");
        // Independently computed calendar values.
        assert_eq!(format_time(1609459200000), "2021-01-01 00:00:00");
        assert_eq!(format_time(1609459200999), "2021-01-01 00:00:00");
        assert_eq!(format_time(123456789012345), "5882-03-11 00:30:12");
    }
}
