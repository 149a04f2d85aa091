//! Daily series derived from the graph, and their correlation with weather.

mod study;

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, Utc};
use thiserror::Error;

use crate::uplift::DatatypeRegistry;

pub use study::{
    run_correlation_study, CorrelationEntry, CorrelationTable, DeviceDiagnostics, ScatterRow,
    StudyError, StudyOutput, StudyRequest,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("unknown climate datatype {0:?}")]
    UnknownDatatype(String),
}

/// At most one finite value per calendar day.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DailySeries {
    pub points: BTreeMap<NaiveDate, f64>,
    pub unit: String,
}

impl DailySeries {
    pub fn new(unit: impl Into<String>) -> Self {
        DailySeries {
            points: BTreeMap::new(),
            unit: unit.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// What [`cumulative_to_daily`] left out.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DailyDiagnostics {
    /// Days whose difference was negative (counter reset).
    pub resets: Vec<NaiveDate>,
}

/// Daily energy from a cumulative counter, using UTC calendar days.
///
/// The value for day `d` is the last reading of `d` minus the last reading of
/// the previous day that has any reading. The first day with readings has no
/// value. Negative differences are dropped and listed in the diagnostics.
pub fn cumulative_to_daily(samples: &[(DateTime<Utc>, f64)]) -> (DailySeries, DailyDiagnostics) {
    let mut last: BTreeMap<NaiveDate, (DateTime<Utc>, f64)> = BTreeMap::new();
    for &(t, v) in samples {
        let day = t.date_naive();
        match last.get(&day) {
            Some((prev, _)) if *prev > t => {}
            _ => {
                last.insert(day, (t, v));
            }
        }
    }
    let mut series = DailySeries::new("kWh");
    let mut diag = DailyDiagnostics::default();
    let mut prev: Option<f64> = None;
    for (day, (_, v)) in last {
        if let Some(p) = prev {
            let diff = v - p;
            if diff < 0.0 {
                diag.resets.push(day);
            } else {
                series.points.insert(day, diff);
            }
        }
        prev = Some(v);
    }
    (series, diag)
}

/// Scales raw values into the registry's unit for `code`.
pub fn unit_normalize(
    series: &DailySeries,
    code: &str,
    datatypes: &DatatypeRegistry,
) -> Result<DailySeries, AnalysisError> {
    let info = datatypes
        .get(code)
        .ok_or_else(|| AnalysisError::UnknownDatatype(code.to_string()))?;
    Ok(DailySeries {
        points: series.points.iter().map(|(d, v)| (*d, v * info.scale)).collect(),
        unit: info.unit.clone(),
    })
}

/// Pairs for the days present in both series, date-ascending.
pub fn align_join(a: &DailySeries, b: &DailySeries) -> Vec<(NaiveDate, f64, f64)> {
    a.points
        .iter()
        .filter_map(|(d, x)| b.points.get(d).map(|y| (*d, *x, *y)))
        .collect()
}

/// Pearson's r in one pass over running means and co-moments.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalysisError> {
    if x.len() != y.len() {
        return Err(AnalysisError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalysisError::UndefinedCorrelation(format!(
            "{} sample(s), need at least 2",
            x.len()
        )));
    }
    let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (i + 1) as f64;
        let dx = a - mx;
        let dy = b - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (a - mx);
        syy += dy * (b - my);
        sxy += dx * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(AnalysisError::UndefinedCorrelation("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
