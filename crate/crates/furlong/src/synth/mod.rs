//! Seeded synthetic data: return series with known properties and
//! exchange-format message streams. The correctness oracle for the
//! parser, the replay, and every estimator.

mod series;
mod stream;

pub use series::{generate_series, Family, GeneratorSpec};
pub use stream::{
    generate_stream, write_stream_tree, MarketStreamText, StreamBundle, SyntheticStreamSpec,
};
