//! Synthetic exchange-format message streams.
//!
//! Each market gets an opening definition, delta-based runner change
//! messages on the valid odds tick grid, one in-play flip, and a terminal
//! definition with exactly one WINNER. Output parses and replays with zero
//! data-quality warnings and is byte-identical for a given seed.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{
    MarketChange, MarketDefinitionMsg, MessageEnvelope, PriceLevel, RunnerChangeMsg,
    RunnerDefinition,
};

/// Shape of the generated corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStreamSpec {
    pub markets: usize,
    /// Runners per market are drawn uniformly from this inclusive range,
    /// which must stay within the exchange profile of 3..=21.
    pub runners_min: usize,
    pub runners_max: usize,
    /// Total messages per market, definitions included.
    pub messages_per_market: usize,
    /// Inter-trade gap model: lognormal with this mean and standard
    /// deviation, in seconds.
    pub mean_gap_secs: f64,
    pub sd_gap_secs: f64,
    pub seed: u64,
}

impl Default for SyntheticStreamSpec {
    fn default() -> Self {
        SyntheticStreamSpec {
            markets: 1,
            runners_min: 3,
            runners_max: 21,
            messages_per_market: 200,
            mean_gap_secs: 50.0,
            sd_gap_secs: 450.0,
            seed: 0,
        }
    }
}

impl SyntheticStreamSpec {
    pub fn validate(&self) -> Result<()> {
        if self.markets == 0 {
            return Err(Error::Domain("stream spec needs at least one market".into()));
        }
        if !(3..=21).contains(&self.runners_min)
            || !(3..=21).contains(&self.runners_max)
            || self.runners_min > self.runners_max
        {
            return Err(Error::Domain(format!(
                "runners range {}..={} must sit inside 3..=21",
                self.runners_min, self.runners_max
            )));
        }
        if self.messages_per_market < 10 {
            return Err(Error::Domain(
                "need at least 10 messages per market (3 definitions plus trades)".into(),
            ));
        }
        if self.mean_gap_secs <= 0.0 || self.sd_gap_secs <= 0.0 {
            return Err(Error::Domain("gap model needs positive mean and sd".into()));
        }
        Ok(())
    }
}

/// One generated market file.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketStreamText {
    pub event_id: String,
    pub market_id: String,
    pub text: String,
}

/// All generated market files for a spec.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamBundle {
    pub markets: Vec<MarketStreamText>,
}

impl StreamBundle {
    /// All markets concatenated into one newline-delimited text.
    pub fn concatenated(&self) -> String {
        self.markets.iter().map(|m| m.text.as_str()).collect()
    }
}

// Exchange odds tick grid in milli-odds: (band upper bound, increment).
const TICK_BANDS: [(i64, i64); 10] = [
    (2_000, 10),
    (3_000, 20),
    (4_000, 50),
    (6_000, 100),
    (10_000, 200),
    (20_000, 500),
    (30_000, 1_000),
    (50_000, 2_000),
    (100_000, 5_000),
    (1_000_000, 10_000),
];

fn tick_grid() -> Vec<i64> {
    let mut grid = Vec::new();
    let mut price = 1_010;
    for &(upper, step) in &TICK_BANDS {
        while price < upper {
            grid.push(price);
            price += step;
        }
    }
    grid.push(1_000_000);
    grid
}

fn price_of(milli: i64) -> f64 {
    milli as f64 / 1000.0
}

fn iso_time(ms: i64) -> String {
    chrono::DateTime::from_timestamp_millis(ms)
        .expect("valid synthetic timestamp")
        .format("%Y-%m-%dT%H:%M:%S%.3fZ")
        .to_string()
}

const BASE_TIME_MS: i64 = 1_609_502_400_000; // 2021-01-01 12:00:00 GMT
const VENUES: [&str; 5] = ["Ascot", "Sandown", "Newmarket", "York", "Goodwood"];
const MARKETS_PER_EVENT: usize = 8;

struct MarketPlan {
    index: usize,
    event_index: usize,
    market_id: String,
    event_id: String,
    runner_ids: Vec<i64>,
}

#[allow(clippy::too_many_arguments)]
fn definition(
    plan: &MarketPlan,
    statuses: &[(i64, &str)],
    market_time: i64,
    status: &str,
    in_play: bool,
    bet_delay: i64,
    version: i64,
    complete_active: Option<i64>,
) -> MarketDefinitionMsg {
    let runners: Vec<RunnerDefinition> = statuses
        .iter()
        .enumerate()
        .map(|(j, (id, st))| RunnerDefinition {
            id: *id,
            name: Some(format!("Runner {}", j + 1)),
            status: Some((*st).to_string()),
            sort_priority: Some(j as i64 + 1),
            removal_date: None,
            adjustment_factor: None,
            bsp: None,
            hc: None,
            extra: BTreeMap::new(),
        })
        .collect();
    let active = complete_active
        .unwrap_or_else(|| statuses.iter().filter(|(_, s)| *s == "ACTIVE").count() as i64);
    MarketDefinitionMsg {
        venue: Some(VENUES[plan.event_index % VENUES.len()].to_string()),
        bsp_market: Some(true),
        turn_in_play_enabled: Some(true),
        persistence_enabled: Some(true),
        market_base_rate: Some(5.0),
        event_id: Some(plan.event_id.clone()),
        event_type: Some("7".to_string()),
        number_of_winners: Some(1),
        betting_type: Some("ODDS".to_string()),
        market_type: Some("WIN".to_string()),
        market_time: Some(iso_time(market_time)),
        suspend_time: Some(iso_time(market_time)),
        bsp_reconciled: Some(false),
        complete: Some(true),
        in_play: Some(in_play),
        cross_matching: Some(true),
        runners_voidable: Some(false),
        number_of_active_runners: Some(active),
        bet_delay: Some(bet_delay),
        status: Some(status.to_string()),
        regulators: Some(vec!["MR_INT".to_string()]),
        discount_allowed: Some(false),
        timezone: Some("Europe/London".to_string()),
        open_date: Some(iso_time(BASE_TIME_MS)),
        version: Some(version),
        name: Some(format!("Race {}", plan.index + 1)),
        event_name: Some(format!("Synthetic Meeting {}", plan.event_index + 1)),
        runners: Some(runners),
        extra: BTreeMap::new(),
    }
}

fn encode(env: &MessageEnvelope) -> String {
    serde_json::to_string(env).expect("synthetic envelope serializes")
}

fn envelope(pt: i64, clk: u64, market_id: &str, def: Option<MarketDefinitionMsg>, rc: Option<Vec<RunnerChangeMsg>>) -> MessageEnvelope {
    MessageEnvelope {
        op: Some("mcm".to_string()),
        clk: Some(clk.to_string()),
        pt,
        mc: vec![MarketChange {
            id: market_id.to_string(),
            market_definition: def,
            rc,
            tv: None,
            extra: BTreeMap::new(),
        }],
        extra: BTreeMap::new(),
    }
}

fn generate_market(spec: &SyntheticStreamSpec, plan: &MarketPlan, grid: &[i64]) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        spec.seed ^ (plan.index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let n_runners = plan.runner_ids.len();
    let gap_sigma2 = (1.0 + (spec.sd_gap_secs / spec.mean_gap_secs).powi(2)).ln();
    let gap_mu = spec.mean_gap_secs.ln() - gap_sigma2 / 2.0;
    let gaps = LogNormal::new(gap_mu, gap_sigma2.sqrt())
        .map_err(|e| Error::Domain(format!("gap model: {e}")))?;

    // initial tick index per runner, between odds 1.5 and 30
    let lo_tick = grid.iter().position(|&p| p >= 1_500).unwrap();
    let hi_tick = grid.iter().position(|&p| p >= 30_000).unwrap();
    let mut tick_idx: Vec<usize> = (0..n_runners)
        .map(|_| rng.random_range(lo_tick..=hi_tick))
        .collect();
    let mut tv_cents: Vec<u64> = vec![0; n_runners];

    let trades = spec.messages_per_market - 3;
    let flip_after = (trades as f64 * 0.6).floor() as usize;
    let market_time = BASE_TIME_MS + plan.index as i64 * 600_000;
    let mut pt = market_time;
    let mut clk = 0u64;
    let mut lines = Vec::with_capacity(spec.messages_per_market);

    let active: Vec<(i64, &str)> = plan.runner_ids.iter().map(|id| (*id, "ACTIVE")).collect();
    // in-play flip happens once trading reaches the scheduled market time
    let flip_time_estimate = market_time + 60_000;

    clk += 1;
    lines.push(encode(&envelope(
        pt,
        clk,
        &plan.market_id,
        Some(definition(plan, &active, flip_time_estimate, "OPEN", false, 0, 1, None)),
        None,
    )));

    let mut flipped = false;
    for trade in 0..trades {
        let gap_secs: f64 = gaps.sample(&mut rng);
        let gap_ms = ((gap_secs * 1000.0).round() as i64).clamp(50, 7_200_000);
        pt += gap_ms;

        if !flipped && trade == flip_after {
            clk += 1;
            lines.push(encode(&envelope(
                pt,
                clk,
                &plan.market_id,
                Some(definition(plan, &active, flip_time_estimate, "OPEN", true, 1, 2, None)),
                None,
            )));
            flipped = true;
        }

        let runner = rng.random_range(0..n_runners);
        // move 1..=3 ticks, reflecting at the grid ends
        let step = rng.random_range(1..=3i64) * if rng.random::<bool>() { 1 } else { -1 };
        let mut idx = tick_idx[runner] as i64 + step;
        if idx < 0 {
            idx = -idx;
        }
        let max_idx = grid.len() as i64 - 1;
        if idx > max_idx {
            idx = 2 * max_idx - idx;
        }
        tick_idx[runner] = idx as usize;
        let ltp_milli = grid[tick_idx[runner]];
        let stake_cents = rng.random_range(200..=5_000u64);
        tv_cents[runner] += stake_cents;

        let mut rc = RunnerChangeMsg::empty(plan.runner_ids[runner]);
        rc.ltp = Some(price_of(ltp_milli));
        rc.tv = Some(tv_cents[runner] as f64 / 100.0);
        rc.trd = Some(vec![PriceLevel {
            price: price_of(ltp_milli),
            size: stake_cents as f64 / 100.0,
        }]);
        if trade % 4 == 0 {
            let below = tick_idx[runner].saturating_sub(1);
            let above = (tick_idx[runner] + 1).min(grid.len() - 1);
            rc.atb = Some(vec![PriceLevel {
                price: price_of(grid[below]),
                size: rng.random_range(100..=10_000u64) as f64 / 100.0,
            }]);
            rc.atl = Some(vec![PriceLevel {
                price: price_of(grid[above]),
                size: rng.random_range(100..=10_000u64) as f64 / 100.0,
            }]);
        }

        clk += 1;
        lines.push(encode(&envelope(
            pt,
            clk,
            &plan.market_id,
            None,
            Some(vec![rc]),
        )));
    }

    if !flipped {
        // degenerate tiny streams: flip right before settlement
        pt += 50;
        clk += 1;
        lines.push(encode(&envelope(
            pt,
            clk,
            &plan.market_id,
            Some(definition(plan, &active, flip_time_estimate, "OPEN", true, 1, 2, None)),
            None,
        )));
    }

    let winner = rng.random_range(0..n_runners);
    let terminal: Vec<(i64, &str)> = plan
        .runner_ids
        .iter()
        .enumerate()
        .map(|(j, id)| (*id, if j == winner { "WINNER" } else { "LOSER" }))
        .collect();
    pt += 60_000;
    clk += 1;
    lines.push(encode(&envelope(
        pt,
        clk,
        &plan.market_id,
        Some(definition(plan, &terminal, flip_time_estimate, "CLOSED", true, 1, 3, Some(0))),
        None,
    )));

    let mut text = lines.join("\n");
    text.push('\n');
    Ok(text)
}

/// Generate the full bundle for a spec.
pub fn generate_stream(spec: &SyntheticStreamSpec) -> Result<StreamBundle> {
    spec.validate()?;
    let grid = tick_grid();
    let mut markets = Vec::with_capacity(spec.markets);
    let mut seed_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for index in 0..spec.markets {
        let event_index = index / MARKETS_PER_EVENT;
        let runners = seed_rng.random_range(spec.runners_min..=spec.runners_max);
        let plan = MarketPlan {
            index,
            event_index,
            market_id: format!("1.{}", 200_000_000 + index),
            event_id: format!("{}", 30_000_001 + event_index),
            runner_ids: (0..runners).map(|j| ((index + 1) * 1000 + j) as i64).collect(),
        };
        let text = generate_market(spec, &plan, &grid)?;
        markets.push(MarketStreamText {
            event_id: plan.event_id,
            market_id: plan.market_id,
            text,
        });
    }
    Ok(StreamBundle { markets })
}

/// Write the bundle as an ingestible directory tree:
/// `<dir>/<eventId>/<marketId>.json` (or `.bz2` when `compress` is set).
pub fn write_stream_tree(
    spec: &SyntheticStreamSpec,
    dir: &Path,
    compress: bool,
) -> Result<Vec<PathBuf>> {
    let bundle = generate_stream(spec)?;
    let mut paths = Vec::with_capacity(bundle.markets.len());
    for market in &bundle.markets {
        let event_dir = dir.join(&market.event_id);
        std::fs::create_dir_all(&event_dir).map_err(|e| Error::io(&event_dir, e))?;
        let path = if compress {
            let path = event_dir.join(format!("{}.bz2", market.market_id));
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut enc = bzip2::write::BzEncoder::new(file, bzip2::Compression::default());
            enc.write_all(market.text.as_bytes())
                .and_then(|_| enc.finish().map(drop))
                .map_err(|e| Error::io(&path, e))?;
            path
        } else {
            let path = event_dir.join(format!("{}.json", market.market_id));
            std::fs::write(&path, &market.text).map_err(|e| Error::io(&path, e))?;
            path
        };
        paths.push(path);
    }
    Ok(paths)
}
