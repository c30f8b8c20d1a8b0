//! Decode exchange stream messages line by line.
//!
//! Generates a small synthetic market stream, then walks it the way an
//! ingest job would: parse each line, inspect the typed envelope, and
//! count data-quality issues.
//!
//! Run with: cargo run --example parse_stream

use furlong::ingest::{format_time, parse_message};
use furlong::synth::{generate_stream, SyntheticStreamSpec};

fn main() -> furlong::Result<()> {
    let spec = SyntheticStreamSpec {
        markets: 1,
        runners_min: 5,
        runners_max: 5,
        messages_per_market: 12,
        seed: 7,
        ..Default::default()
    };
    let bundle = generate_stream(&spec)?;
    let market = &bundle.markets[0];
    println!("stream for market {} (event {}):\n", market.market_id, market.event_id);

    let mut unknown_fields = 0;
    for (idx, line) in market.text.lines().enumerate() {
        let env = parse_message(line, idx + 1)?;
        unknown_fields += env.unknown_field_count();
        for mc in &env.mc {
            if let Some(def) = &mc.market_definition {
                println!(
                    "{}  definition: status={} inPlay={} activeRunners={}",
                    format_time(env.pt),
                    def.status.as_deref().unwrap_or("?"),
                    def.in_play.unwrap_or(false),
                    def.number_of_active_runners.unwrap_or(-1),
                );
            }
            for rc in mc.rc.iter().flatten() {
                println!(
                    "{}  trade: selection={} ltp={:?} tv={:?}",
                    format_time(env.pt),
                    rc.id,
                    rc.ltp,
                    rc.tv,
                );
            }
        }
    }
    println!("\nunknown fields encountered: {unknown_fields}");

    // malformed lines are errors, not panics
    let err = parse_message(r#"{"op":"#, 99).unwrap_err();
    println!("malformed line reports: {err}");
    Ok(())
}
