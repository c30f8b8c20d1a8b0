//! Generate a synthetic exchange stream and prove it round-trips.
//!
//! The generator emits delta-based messages on the valid odds tick grid:
//! an opening definition, trades, one in-play flip, and a terminal
//! definition with exactly one winner. Identical seeds give identical
//! bytes.
//!
//! Run with: cargo run --example synthetic_stream

use furlong::ingest::open_archive;
use furlong::synth::{generate_stream, write_stream_tree, SyntheticStreamSpec};

fn main() -> furlong::Result<()> {
    let spec = SyntheticStreamSpec {
        markets: 2,
        runners_min: 4,
        runners_max: 8,
        messages_per_market: 60,
        seed: 99,
        ..Default::default()
    };

    let bundle = generate_stream(&spec)?;
    println!("generated {} markets:", bundle.markets.len());
    for market in &bundle.markets {
        let first_line = market.text.lines().next().unwrap_or("");
        println!(
            "  event {} market {} ({} bytes). first line:\n    {}",
            market.event_id,
            market.market_id,
            market.text.len(),
            &first_line[..first_line.len().min(120)]
        );
    }

    let again = generate_stream(&spec)?;
    println!(
        "\nsame seed, same bytes: {}",
        bundle.concatenated() == again.concatenated()
    );

    let out = std::env::temp_dir().join("furlong-synth-stream");
    let paths = write_stream_tree(&spec, &out, true)?;
    println!("\nwrote {} compressed market files under {}", paths.len(), out.display());

    let total: usize = open_archive(&out)?
        .iter()
        .map(|s| s.parse().map(|p| p.stats.messages))
        .collect::<furlong::Result<Vec<_>>>()?
        .into_iter()
        .sum();
    println!("round trip through the bz2 ingest path: {total} messages parsed");
    Ok(())
}
