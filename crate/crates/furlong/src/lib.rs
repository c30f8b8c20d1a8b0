//! Parsing, replay, and stylized-facts analysis for betting-exchange stream data.
//!
//! The crate covers the full path from a raw historical archive to a
//! statistical report:
//!
//! - [`ingest`]: open tar.bz2 archives, directory trees, or bare `.bz2`
//!   files and decode newline-delimited market change messages.
//! - [`replay`]: accumulate delta messages into market/runner state and
//!   emit the normalized runner-change, market-definition, and winner
//!   datasets.
//! - [`returns`]: tick-level price returns in log/simple/absolute/squared
//!   form, plus commission-adjusted back/lay settlement returns.
//! - [`stats`]: descriptive moments, Hill tail index, generalized Gaussian
//!   fits, two-sample KS, ADF/KPSS stationarity tests, autocorrelation,
//!   power-law ACF decay, and R/S Hurst estimation.
//! - [`synth`]: seeded generators for return series with known properties
//!   and for exchange-format message streams; the oracle for everything
//!   above.
//! - [`pipeline`]: the batch driver that ties the stages together and
//!   writes `report.json`, CSV tables, and plot-data files.
//!
//! Each major capability has a runnable example under `examples/`; start
//! with `full_pipeline`.

pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod replay;
pub mod returns;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
