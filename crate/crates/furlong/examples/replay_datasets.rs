//! Replay a stream into the four normalized datasets.
//!
//! Builds the runner-change table (with the in-play join), the full and
//! condensed market definitions, and the winners file, then exports them
//! as CSV.
//!
//! Run with: cargo run --example replay_datasets

use furlong::ingest::open_archive;
use furlong::replay::{
    build_definition_datasets, build_runner_change_dataset, csv, extract_winners, group_by_market,
};
use furlong::synth::{write_stream_tree, SyntheticStreamSpec};

fn main() -> furlong::Result<()> {
    let work = std::env::temp_dir().join("furlong-replay-datasets");
    let data = work.join("data");
    let out = work.join("out");
    std::fs::create_dir_all(&out).map_err(|e| furlong::Error::io(&out, e))?;

    let spec = SyntheticStreamSpec {
        markets: 3,
        messages_per_market: 150,
        seed: 21,
        ..Default::default()
    };
    write_stream_tree(&spec, &data, true)?;

    let files: Vec<_> = open_archive(&data)?
        .iter()
        .map(|s| s.parse())
        .collect::<furlong::Result<_>>()?;
    let timelines = group_by_market(&files);

    let mut total_rows = 0;
    for timeline in &timelines {
        let outcome = build_runner_change_dataset(timeline);
        total_rows += outcome.records.len();
        let path = out.join(format!("runner_changes_{}.csv", timeline.event_id));
        csv::write_runner_changes(&path, &outcome.records)?;
    }
    println!("{total_rows} runner-change rows across {} markets", timelines.len());

    let (full, condensed) = build_definition_datasets(&timelines);
    csv::write_definitions(&out.join("market_definitions_full.csv"), &full, true)?;
    csv::write_definitions(&out.join("market_definitions.csv"), &condensed, false)?;
    println!("{} definition changes, {} condensed rows", full.len(), condensed.len());

    let winners = extract_winners(&timelines);
    csv::write_winners(&out.join("winners.csv"), &winners.records)?;
    for w in &winners.records {
        println!(
            "market {}: winner {} of {} runners",
            w.market_id, w.winner, w.number_of_runners
        );
    }

    println!("\nCSV files written under {}", out.display());
    Ok(())
}
