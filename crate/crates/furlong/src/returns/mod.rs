//! Price returns and their transforms.
//!
//! Log returns difference the natural log of consecutive prices; simple
//! returns are relative differences; conversions between the two and the
//! absolute/squared transforms are element-wise. All operations are pure.

mod settlement;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use settlement::{
    commission_for, settle, settlement_returns, BetSide, SettlementOutcome,
    SettlementReturnRecord, DEFAULT_COMMISSION,
};

/// Transform applied to the values of a return series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Log,
    Simple,
    Absolute,
    Squared,
    Raw,
}

/// A timestamped series of dimensionless returns for one market (or a
/// concatenation labelled "combined").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub id: String,
    /// (epoch milliseconds, value), timestamps non-decreasing.
    pub points: Vec<(i64, f64)>,
    pub transform: Transform,
    /// Scale factor already applied to the values (1 = none).
    pub scale: f64,
}

impl ReturnSeries {
    pub fn new(id: impl Into<String>, points: Vec<(i64, f64)>, transform: Transform) -> Self {
        ReturnSeries {
            id: id.into(),
            points,
            transform,
            scale: 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|(_, v)| *v).collect()
    }

    /// Multiply every value by `factor`, recording it in `scale`.
    pub fn scaled(&self, factor: f64) -> ReturnSeries {
        ReturnSeries {
            id: self.id.clone(),
            points: self.points.iter().map(|(t, v)| (*t, v * factor)).collect(),
            transform: self.transform,
            scale: self.scale * factor,
        }
    }
}

fn check_prices(prices: &[(i64, f64)]) -> Result<()> {
    for (t, p) in prices {
        if *p <= 0.0 || p.is_nan() {
            return Err(Error::Domain(format!(
                "non-positive price {p} at t={t}; returns are undefined"
            )));
        }
    }
    Ok(())
}

/// Log returns: value_i = ln(P_i) - ln(P_{i-1}), stamped at P_i's time.
///
/// Fewer than two prices yield an empty series; a non-positive price is a
/// domain error naming the tick.
pub fn log_returns(id: &str, prices: &[(i64, f64)]) -> Result<ReturnSeries> {
    check_prices(prices)?;
    let points = prices
        .windows(2)
        .map(|w| (w[1].0, w[1].1.ln() - w[0].1.ln()))
        .collect();
    Ok(ReturnSeries::new(id, points, Transform::Log))
}

/// Simple returns: value_i = (P_i - P_{i-1}) / P_{i-1}.
pub fn simple_returns(id: &str, prices: &[(i64, f64)]) -> Result<ReturnSeries> {
    check_prices(prices)?;
    let points = prices
        .windows(2)
        .map(|w| (w[1].0, (w[1].1 - w[0].1) / w[0].1))
        .collect();
    Ok(ReturnSeries::new(id, points, Transform::Simple))
}

/// Direction for converting between log and simple returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvertDirection {
    /// r = exp(R) - 1
    LogToSimple,
    /// R = ln(1 + r)
    SimpleToLog,
}

/// Convert element-wise between log and simple returns.
///
/// The source tag must match the direction, and the series must be
/// unscaled (the identities only hold for raw values).
pub fn convert(series: &ReturnSeries, direction: ConvertDirection) -> Result<ReturnSeries> {
    if series.scale != 1.0 {
        return Err(Error::Domain(format!(
            "cannot convert a series with scale factor {} applied",
            series.scale
        )));
    }
    let (expected, target) = match direction {
        ConvertDirection::LogToSimple => (Transform::Log, Transform::Simple),
        ConvertDirection::SimpleToLog => (Transform::Simple, Transform::Log),
    };
    if series.transform != expected {
        return Err(Error::Contract(format!(
            "convert expects a {expected:?}-tagged series, got {:?}",
            series.transform
        )));
    }
    let mut points = Vec::with_capacity(series.points.len());
    for (t, v) in &series.points {
        let converted = match direction {
            ConvertDirection::LogToSimple => v.exp() - 1.0,
            ConvertDirection::SimpleToLog => {
                if *v <= -1.0 {
                    return Err(Error::Domain(format!(
                        "simple return {v} at t={t} is <= -1; log return undefined"
                    )));
                }
                v.ln_1p()
            }
        };
        points.push((*t, converted));
    }
    Ok(ReturnSeries {
        id: series.id.clone(),
        points,
        transform: target,
        scale: 1.0,
    })
}

/// Element-wise transform kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointTransform {
    Absolute,
    Squared,
}

/// Apply |x| or x^2 element-wise, updating the tag.
pub fn transform(series: &ReturnSeries, kind: PointTransform) -> ReturnSeries {
    let (f, tag): (fn(f64) -> f64, Transform) = match kind {
        PointTransform::Absolute => (f64::abs, Transform::Absolute),
        PointTransform::Squared => (|x| x * x, Transform::Squared),
    };
    ReturnSeries {
        id: series.id.clone(),
        points: series.points.iter().map(|(t, v)| (*t, f(*v))).collect(),
        transform: series.transform,
        scale: series.scale,
    }
    .tagged(tag)
}

impl ReturnSeries {
    fn tagged(mut self, tag: Transform) -> Self {
        self.transform = tag;
        self
    }
}

/// Merge time-sorted series into one combined series ordered by timestamp,
/// with ties broken by input order.
///
/// All inputs must share transform tag and scale.
pub fn concat_returns(series_list: &[ReturnSeries]) -> Result<ReturnSeries> {
    if series_list.is_empty() {
        return Ok(ReturnSeries::new("combined", Vec::new(), Transform::Log));
    }
    let tag = series_list[0].transform;
    let scale = series_list[0].scale;
    for s in series_list {
        if s.transform != tag || s.scale != scale {
            return Err(Error::Contract(format!(
                "concat_returns requires a homogeneous schema; found ({:?}, scale {}) and ({:?}, scale {})",
                tag, scale, s.transform, s.scale
            )));
        }
    }

    // k-way merge over already-sorted inputs
    let mut cursors: Vec<usize> = vec![0; series_list.len()];
    let total: usize = series_list.iter().map(|s| s.len()).sum();
    let mut points = Vec::with_capacity(total);
    loop {
        let mut best: Option<(usize, i64)> = None;
        for (idx, series) in series_list.iter().enumerate() {
            if let Some((t, _)) = series.points.get(cursors[idx]) {
                if best.is_none_or(|(_, bt)| *t < bt) {
                    best = Some((idx, *t));
                }
            }
        }
        match best {
            Some((idx, _)) => {
                points.push(series_list[idx].points[cursors[idx]]);
                cursors[idx] += 1;
            }
            None => break,
        }
    }
    let mut combined = ReturnSeries::new("combined", points, tag);
    combined.scale = scale;
    Ok(combined)
}
