//! Message replay into accumulated state and the normalized datasets.

pub mod csv;
mod datasets;
mod state;

pub use datasets::{
    build_definition_datasets, build_runner_change_dataset, extract_winners, group_by_market,
    BuildOutcome, MarketDefinitionRecord, MarketTimeline, RunnerChangeRecord, WinnerRecord,
};
pub use state::{LadderSide, MarketState, PriceLadder, Replayer, RunnerState};
