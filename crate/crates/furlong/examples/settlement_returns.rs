//! Commission-adjusted settlement returns for back and lay bets.
//!
//! Shows the payoff rules on hand cases, then settles a full synthetic
//! market against its winner and splits the records by sign.
//!
//! Run with: cargo run --example settlement_returns

use furlong::ingest::open_archive;
use furlong::replay::{extract_winners, group_by_market};
use furlong::returns::{settle, settlement_returns, BetSide};
use furlong::synth::{write_stream_tree, SyntheticStreamSpec};

fn main() -> furlong::Result<()> {
    println!("payoff rules at stake 10, odds 2.0, commission 5%:");
    println!("  back, runner wins:  {:+.2}", settle(BetSide::Back, 10.0, 2.0, true, 0.05));
    println!("  back, runner loses: {:+.2}", settle(BetSide::Back, 10.0, 2.0, false, 0.05));
    println!("  lay,  runner loses: {:+.2}", settle(BetSide::Lay, 10.0, 2.0, false, 0.05));
    println!("  lay,  runner wins:  {:+.2}", settle(BetSide::Lay, 10.0, 2.0, true, 0.05));

    let work = std::env::temp_dir().join("furlong-settlement");
    let spec = SyntheticStreamSpec {
        markets: 1,
        messages_per_market: 200,
        seed: 33,
        ..Default::default()
    };
    write_stream_tree(&spec, &work, false)?;
    let files: Vec<_> = open_archive(&work)?
        .iter()
        .map(|s| s.parse())
        .collect::<furlong::Result<_>>()?;
    let timelines = group_by_market(&files);
    let winners = extract_winners(&timelines);
    let winner = &winners.records[0];
    println!(
        "\nmarket {}: winner is selection {}",
        winner.market_id, winner.winner
    );

    let outcome = settlement_returns(&timelines[0], winner.winner, 0.05)?;
    println!(
        "{} positive records, {} negative records, {} zero (excluded)",
        outcome.positive.len(),
        outcome.negative.len(),
        outcome.zero_count
    );
    let gross_positive: f64 = outcome.positive.iter().map(|r| r.net_return).sum();
    let gross_negative: f64 = outcome.negative.iter().map(|r| r.net_return).sum();
    println!("gross positive {gross_positive:+.2}, gross negative {gross_negative:+.2}");
    if let Some(first) = outcome.positive.first() {
        println!(
            "first winning record: t={} selection={} side={:?} stake={:.2} odds={:.2} net={:+.2}",
            first.t, first.selection_id, first.side, first.stake, first.odds, first.net_return
        );
    }
    Ok(())
}
