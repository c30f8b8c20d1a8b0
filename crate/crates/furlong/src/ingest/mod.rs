//! Stream ingestion: archives in, typed market change messages out.

mod archive;
mod message;

pub use archive::{open_archive, LineIter, MarketStream, ParseStats, ParsedMarketFile};
pub use message::{
    format_time, parse_message, MarketChange, MarketDefinitionMsg, MessageEnvelope, PriceLevel,
    RunnerChangeMsg, RunnerDefinition, MAX_ODDS, MIN_ODDS,
};
