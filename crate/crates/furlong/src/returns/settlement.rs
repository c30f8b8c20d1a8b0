//! Commission-adjusted settlement returns for back and lay bets.
//!
//! Each traded-volume increase on a selection is treated as a matched bet:
//! stake = the volume delta, odds = the last traded price at that signal.
//! One back-side and one lay-side record are produced per signal and the
//! records are split by the sign of the net return. Commission applies to
//! net winnings only:
//!
//! - back win:  +stake * (odds - 1) * (1 - c)
//! - back loss: -stake
//! - lay win (runner loses):  +stake * (1 - c)
//! - lay loss (runner wins):  -stake * (odds - 1)

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::replay::MarketTimeline;

/// The exchange's standard commission rate used when a market does not
/// declare its own base rate.
pub const DEFAULT_COMMISSION: f64 = 0.05;

/// Side of an exchange bet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetSide {
    Back,
    Lay,
}

/// One settled bet with its net return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementReturnRecord {
    /// Epoch milliseconds of the price signal.
    pub t: i64,
    pub event_id: String,
    pub market_id: String,
    pub selection_id: i64,
    pub side: BetSide,
    pub stake: f64,
    pub odds: f64,
    pub net_return: f64,
}

/// Settlement output split by return sign.
#[derive(Debug, Clone, Default)]
pub struct SettlementOutcome {
    pub positive: Vec<SettlementReturnRecord>,
    pub negative: Vec<SettlementReturnRecord>,
    /// Records with exactly zero net return are excluded from both lists
    /// but counted here.
    pub zero_count: usize,
    pub warnings: Vec<String>,
}

/// Resolve the commission rate: explicit override first, then the market's
/// declared base rate (a percentage), then the standard 5%.
pub fn commission_for(market_base_rate: Option<f64>, override_rate: Option<f64>) -> f64 {
    if let Some(c) = override_rate {
        return c;
    }
    match market_base_rate {
        Some(rate) => rate / 100.0,
        None => DEFAULT_COMMISSION,
    }
}

/// Net return of a single settled bet.
pub fn settle(side: BetSide, stake: f64, odds: f64, runner_won: bool, commission: f64) -> f64 {
    match (side, runner_won) {
        (BetSide::Back, true) => stake * (odds - 1.0) * (1.0 - commission),
        (BetSide::Back, false) => -stake,
        (BetSide::Lay, false) => stake * (1.0 - commission),
        (BetSide::Lay, true) => -stake * (odds - 1.0),
    }
}

/// Compute settlement returns for one market timeline.
///
/// `winner` is the winning selection id (from the winners dataset) and
/// `commission` the resolved rate in [0, 1).
pub fn settlement_returns(
    timeline: &MarketTimeline,
    winner: i64,
    commission: f64,
) -> Result<SettlementOutcome> {
    if !(0.0..1.0).contains(&commission) {
        return Err(Error::Domain(format!(
            "commission rate {commission} outside [0, 1)"
        )));
    }
    let mut outcome = SettlementOutcome::default();
    let mut last_tv: BTreeMap<i64, f64> = BTreeMap::new();
    let mut last_ltp: BTreeMap<i64, f64> = BTreeMap::new();

    let mut ordered: Vec<&(i64, crate::ingest::MarketChange)> = timeline.changes.iter().collect();
    ordered.sort_by_key(|(pt, _)| *pt);

    for (pt, mc) in ordered {
        for rc in mc.rc.iter().flatten() {
            if let Some(ltp) = rc.ltp {
                last_ltp.insert(rc.id, ltp);
            }
            let Some(tv) = rc.tv else { continue };
            let delta = match last_tv.insert(rc.id, tv) {
                Some(prev) if tv < prev => {
                    outcome.warnings.push(format!(
                        "{}: selection {} traded volume decreased {prev} -> {tv} at pt {pt}; signal skipped",
                        timeline.market_id, rc.id
                    ));
                    continue;
                }
                Some(prev) => tv - prev,
                // First tv observation seeds the baseline; the whole
                // opening volume is treated as one matched bet.
                None => tv,
            };
            if delta <= 0.0 {
                continue;
            }
            let Some(odds) = last_ltp.get(&rc.id).copied() else {
                outcome.warnings.push(format!(
                    "{}: selection {} traded volume changed before any last traded price; signal skipped",
                    timeline.market_id, rc.id
                ));
                continue;
            };
            let won = rc.id == winner;
            for side in [BetSide::Back, BetSide::Lay] {
                let net = settle(side, delta, odds, won, commission);
                let record = SettlementReturnRecord {
                    t: *pt,
                    event_id: timeline.event_id.clone(),
                    market_id: timeline.market_id.clone(),
                    selection_id: rc.id,
                    side,
                    stake: delta,
                    odds,
                    net_return: net,
                };
                if net > 0.0 {
                    outcome.positive.push(record);
                } else if net < 0.0 {
                    outcome.negative.push(record);
                } else {
                    outcome.zero_count += 1;
                }
            }
        }
    }
    Ok(outcome)
}
