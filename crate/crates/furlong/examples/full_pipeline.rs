//! The whole pipeline in one shot: synthetic archive in, report out.
//!
//! Equivalent to `furlong synth stream ...` followed by
//! `furlong analyze ...`, but driven through the library API.
//!
//! Run with: cargo run --example full_pipeline

use furlong::pipeline::{run_pipeline, sample_market_ids, summarize, RunConfig};
use furlong::synth::{write_stream_tree, SyntheticStreamSpec};

fn main() -> furlong::Result<()> {
    let work = std::env::temp_dir().join("furlong-full-pipeline");
    let data = work.join("data");
    let spec = SyntheticStreamSpec {
        markets: 12,
        messages_per_market: 400,
        seed: 2024,
        ..Default::default()
    };
    write_stream_tree(&spec, &data, true)?;
    println!("synthetic archive: 12 markets under {}", data.display());

    let config = RunConfig {
        input: data,
        out_dir: work.join("out"),
        seed: 1,
        ..Default::default()
    };
    let output = run_pipeline(&config)?;

    println!("\n--- report summary ---");
    print!("{}", summarize(&output.report));

    println!("\nfigure sample markets: {:?}", sample_market_ids(&output.report));
    println!("\nfiles written ({} total):", output.written.len());
    for path in output.written.iter().take(12) {
        println!("  {}", path.display());
    }
    if output.written.len() > 12 {
        println!("  ... and {} more", output.written.len() - 12);
    }
    println!("\nfull output directory: {}", config.out_dir.display());
    Ok(())
}
