//! Delta-accumulated market and runner state.
//!
//! Stream fields are nullable and delta based: an absent field leaves state
//! untouched, a present scalar overwrites, a ladder entry upserts its price
//! level, and a ladder size of zero deletes the level.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ingest::{MarketChange, MarketDefinitionMsg, MessageEnvelope, PriceLevel};

/// Which way a ladder sorts its best price first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderSide {
    /// Available to back: best price is the highest, sorted descending.
    Back,
    /// Available to lay: best price is the lowest, sorted ascending.
    Lay,
    /// Price-neutral ladders (traded volume, starting price): ascending.
    Neutral,
}

/// An accumulated price ladder with distinct price levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceLadder {
    side: LadderSide,
    levels: Vec<PriceLevel>,
}

impl PriceLadder {
    pub fn new(side: LadderSide) -> Self {
        PriceLadder {
            side,
            levels: Vec::new(),
        }
    }

    /// Upsert the given levels; a size of zero removes that price.
    pub fn apply(&mut self, update: &[PriceLevel]) {
        for level in update {
            match self.levels.iter().position(|l| l.price == level.price) {
                Some(idx) => {
                    if level.size == 0.0 {
                        self.levels.remove(idx);
                    } else {
                        self.levels[idx].size = level.size;
                    }
                }
                None => {
                    if level.size != 0.0 {
                        self.levels.push(*level);
                    }
                }
            }
        }
        match self.side {
            LadderSide::Back => self
                .levels
                .sort_by(|a, b| b.price.partial_cmp(&a.price).unwrap()),
            LadderSide::Lay | LadderSide::Neutral => self
                .levels
                .sort_by(|a, b| a.price.partial_cmp(&b.price).unwrap()),
        }
    }

    pub fn levels(&self) -> &[PriceLevel] {
        &self.levels
    }

    pub fn best(&self) -> Option<PriceLevel> {
        self.levels.first().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Accumulated state for one selection.
#[derive(Debug, Clone)]
pub struct RunnerState {
    pub id: i64,
    pub ltp: Option<f64>,
    pub tv: Option<f64>,
    pub atb: PriceLadder,
    pub atl: PriceLadder,
    pub trd: PriceLadder,
    pub spb: PriceLadder,
    pub spl: PriceLadder,
    pub spn: Option<f64>,
    pub spf: Option<f64>,
    pub status: Option<String>,
    pub hc: Option<f64>,
}

impl RunnerState {
    pub fn new(id: i64) -> Self {
        RunnerState {
            id,
            ltp: None,
            tv: None,
            atb: PriceLadder::new(LadderSide::Back),
            atl: PriceLadder::new(LadderSide::Lay),
            trd: PriceLadder::new(LadderSide::Neutral),
            spb: PriceLadder::new(LadderSide::Back),
            spl: PriceLadder::new(LadderSide::Lay),
            spn: None,
            spf: None,
            status: None,
            hc: None,
        }
    }
}

/// Accumulated state for one market.
#[derive(Debug, Clone)]
pub struct MarketState {
    pub market_id: String,
    pub event_id: String,
    pub in_play: bool,
    pub status: Option<String>,
    /// Commission rate applicable to the market, percent.
    pub market_base_rate: Option<f64>,
    pub number_of_active_runners: Option<i64>,
    pub runners: BTreeMap<i64, RunnerState>,
    /// Latest full definition payload seen.
    pub definition: Option<MarketDefinitionMsg>,
    pub last_pt: Option<i64>,
}

impl MarketState {
    pub fn new(market_id: impl Into<String>, event_id: impl Into<String>) -> Self {
        MarketState {
            market_id: market_id.into(),
            event_id: event_id.into(),
            in_play: false,
            status: None,
            market_base_rate: None,
            number_of_active_runners: None,
            runners: BTreeMap::new(),
            definition: None,
            last_pt: None,
        }
    }

    fn runner_mut(&mut self, id: i64) -> &mut RunnerState {
        self.runners.entry(id).or_insert_with(|| RunnerState::new(id))
    }

    /// Apply one market change. Returns data-quality warnings (traded
    /// volume decreases, and similar) without failing the replay.
    pub fn apply_delta(&mut self, pt: i64, change: &MarketChange) -> Result<Vec<String>> {
        if change.id != self.market_id {
            return Err(Error::Contract(format!(
                "market change for {} applied to state of {}",
                change.id, self.market_id
            )));
        }
        let mut warnings = Vec::new();

        if let Some(def) = &change.market_definition {
            if let Some(in_play) = def.in_play {
                if self.in_play && !in_play {
                    warnings.push(format!(
                        "{}: in-play flag reverted to false at pt {pt}",
                        self.market_id
                    ));
                }
                self.in_play = in_play;
            }
            if let Some(status) = &def.status {
                self.status = Some(status.clone());
            }
            if let Some(rate) = def.market_base_rate {
                self.market_base_rate = Some(rate);
            }
            if let Some(n) = def.number_of_active_runners {
                self.number_of_active_runners = Some(n);
            }
            if let Some(event_id) = &def.event_id {
                if self.event_id.is_empty() || self.event_id == "unknown" {
                    self.event_id = event_id.clone();
                }
            }
            if let Some(runners) = &def.runners {
                for rd in runners {
                    let runner = self.runner_mut(rd.id);
                    if let Some(status) = &rd.status {
                        runner.status = Some(status.clone());
                    }
                    if let Some(hc) = rd.hc {
                        runner.hc = Some(hc);
                    }
                }
                let active = runners
                    .iter()
                    .filter(|r| r.status.as_deref() == Some("ACTIVE"))
                    .count() as i64;
                if let Some(declared) = def.number_of_active_runners {
                    if declared != active {
                        warnings.push(format!(
                            "{}: definition declares {declared} active runners but lists {active}",
                            self.market_id
                        ));
                    }
                }
            }
            self.definition = Some(def.clone());
        }

        for rc in change.rc.iter().flatten() {
            let market_id = self.market_id.clone();
            let runner = self.runner_mut(rc.id);
            if let Some(ltp) = rc.ltp {
                runner.ltp = Some(ltp);
            }
            if let Some(tv) = rc.tv {
                if let Some(prev) = runner.tv {
                    if tv < prev {
                        warnings.push(format!(
                            "{market_id}: selection {} traded volume decreased {prev} -> {tv} at pt {pt}",
                            rc.id
                        ));
                    }
                }
                runner.tv = Some(tv);
            }
            if let Some(spn) = rc.spn {
                runner.spn = Some(spn);
            }
            if let Some(spf) = rc.spf {
                runner.spf = Some(spf);
            }
            if let Some(hc) = rc.hc {
                runner.hc = Some(hc);
            }
            if let Some(atb) = &rc.atb {
                runner.atb.apply(atb);
            }
            if let Some(atl) = &rc.atl {
                runner.atl.apply(atl);
            }
            if let Some(trd) = &rc.trd {
                runner.trd.apply(trd);
            }
            if let Some(spb) = &rc.spb {
                runner.spb.apply(spb);
            }
            if let Some(spl) = &rc.spl {
                runner.spl.apply(spl);
            }
        }

        self.last_pt = Some(pt);
        Ok(warnings)
    }
}

/// Replays envelopes across any number of markets.
#[derive(Debug, Default)]
pub struct Replayer {
    event_hint: String,
    states: BTreeMap<String, MarketState>,
    warnings: Vec<String>,
}

impl Replayer {
    /// `event_hint` seeds the event id of markets whose definitions do not
    /// carry one (typically the containing directory name).
    pub fn new(event_hint: impl Into<String>) -> Self {
        Replayer {
            event_hint: event_hint.into(),
            states: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn apply_envelope(&mut self, env: &MessageEnvelope) -> Result<()> {
        for mc in &env.mc {
            let state = self
                .states
                .entry(mc.id.clone())
                .or_insert_with(|| MarketState::new(mc.id.clone(), self.event_hint.clone()));
            let mut w = state.apply_delta(env.pt, mc)?;
            self.warnings.append(&mut w);
        }
        Ok(())
    }

    pub fn states(&self) -> &BTreeMap<String, MarketState> {
        &self.states
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn into_states(self) -> (BTreeMap<String, MarketState>, Vec<String>) {
        (self.states, self.warnings)
    }
}
