use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{Datelike, NaiveDate};
use thiserror::Error;

use super::{align_join, cumulative_to_daily, pearson, unit_normalize, AnalysisError, DailySeries};
use crate::exec::Parallelism;
use crate::query::{evaluate_with, parse_query, QueryError};
use crate::rdf::{FrozenGraph, Term};
use crate::uplift::DatatypeRegistry;
use crate::vocab::{Iri, TermRegistry, XSD_DATE_TIME};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StudyError {
    #[error("{0} does not occur as a subject in the graph")]
    UnknownDevice(Iri),
    #[error("no cap:retrieveWeatherFrom link for {subject} or any system it belongs to (checked {checked})")]
    MissingWeatherLink { subject: Iri, checked: String },
    #[error("{subject} retrieves weather from several stations: {stations}")]
    AmbiguousWeatherLink { subject: Iri, stations: String },
    #[error("conflicting values: {0}")]
    Conflict(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("internal query failed: {0}")]
    Query(#[from] QueryError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRequest {
    pub devices: Vec<Iri>,
    pub year: i32,
    /// Climate datatype codes, e.g. `TMAX`, `PRCP`.
    pub datatypes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationEntry {
    pub datatype: String,
    pub device: String,
    pub r: f64,
    pub n: usize,
}

/// Entries ordered by requested datatype, then requested device.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorrelationTable {
    pub entries: Vec<CorrelationEntry>,
}

impl CorrelationTable {
    pub fn get(&self, datatype: &str, device: &str) -> Option<&CorrelationEntry> {
        self.entries
            .iter()
            .find(|e| e.datatype == datatype && e.device == device)
    }

    /// `datatype,device,r,n`
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["datatype", "device", "r", "n"]).expect("in-memory write");
        for e in &self.entries {
            w.write_record([&e.datatype, &e.device, &e.r.to_string(), &e.n.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// One point of the energy/weather scatter; weather columns are empty when
/// the station has no value for that day.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRow {
    pub device: String,
    pub date: NaiveDate,
    pub energy_kwh: f64,
    pub tmax_c: Option<f64>,
    pub prcp_mm: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeviceDiagnostics {
    pub device: String,
    pub station: Option<Iri>,
    pub samples: usize,
    pub days: usize,
    pub resets: Vec<NaiveDate>,
    pub skipped: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StudyOutput {
    pub table: CorrelationTable,
    pub scatter: Vec<ScatterRow>,
    pub diagnostics: Vec<DeviceDiagnostics>,
}

impl StudyOutput {
    /// `device,date,energy_kwh,tmax_c,prcp_mm`
    pub fn scatter_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["device", "date", "energy_kwh", "tmax_c", "prcp_mm"])
            .expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.scatter {
            w.write_record([
                r.device.clone(),
                r.date.to_string(),
                r.energy_kwh.to_string(),
                opt(r.tmax_c),
                opt(r.prcp_mm),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

fn instant_literal(y: i32, m: u32, d: u32) -> String {
    format!("\"{y:04}-{m:02}-{d:02}T00:00:00Z\"^^<{XSD_DATE_TIME}>")
}

/// Listing 1-style query for one device's readings. The lower bound reaches
/// back one day so that January 1st has a previous reading to difference.
fn energy_query(device: &Iri, year: i32, reg: &TermRegistry) -> String {
    let v = reg.terms();
    format!(
        "SELECT ?time ?value WHERE {{\n  <{device}> ?power ?property .\n  ?property <{}> ?evaluation .\n  ?evaluation <{}> ?value ;\n    <{}> ?time .\n  FILTER(?time >= {})\n  FILTER(?time < {})\n}}\nORDER BY ?time",
        v.evaluation,
        v.evaluated_value,
        v.result_time,
        instant_literal(year - 1, 12, 31),
        instant_literal(year + 1, 1, 1),
    )
}

fn weather_query(station: &Iri, datatype: &Iri, year: i32, reg: &TermRegistry) -> String {
    let v = reg.terms();
    format!(
        "SELECT ?time ?value WHERE {{\n  ?obs <{}> <{station}> ;\n    <{}> <{datatype}> ;\n    <{}> ?value ;\n    <{}> ?time .\n  FILTER(?time >= {})\n  FILTER(?time < {})\n}}\nORDER BY ?time",
        v.source_station,
        v.with_data_type,
        v.has_result,
        v.result_time,
        instant_literal(year, 1, 1),
        instant_literal(year + 1, 1, 1),
    )
}

/// Follows `seas:subSystemOf` upward until some system has a weather link.
fn resolve_station(g: &FrozenGraph, device: &Iri, reg: &TermRegistry) -> Result<Iri, StudyError> {
    let v = reg.terms();
    let mut frontier = vec![device.clone()];
    let mut seen = BTreeSet::new();
    while !frontier.is_empty() {
        let mut stations = BTreeSet::new();
        for s in &frontier {
            for t in g.match_pattern(Some(s), Some(&v.retrieve_weather_from), None) {
                if let Term::Iri(st) = t.object {
                    stations.insert(st);
                }
            }
        }
        match stations.len() {
            0 => {}
            1 => return Ok(stations.into_iter().next().expect("one station")),
            _ => {
                return Err(StudyError::AmbiguousWeatherLink {
                    subject: device.clone(),
                    stations: stations.iter().map(Iri::as_str).collect::<Vec<_>>().join(", "),
                })
            }
        }
        seen.extend(frontier.iter().cloned());
        let mut next = Vec::new();
        for s in &frontier {
            for t in g.match_pattern(Some(s), Some(&v.sub_system_of), None) {
                if let Term::Iri(parent) = t.object {
                    if !seen.contains(&parent) && !next.contains(&parent) {
                        next.push(parent);
                    }
                }
            }
        }
        frontier = next;
    }
    Err(StudyError::MissingWeatherLink {
        subject: device.clone(),
        checked: seen.iter().map(Iri::as_str).collect::<Vec<_>>().join(", "),
    })
}

fn series_rows(
    g: &FrozenGraph,
    text: &str,
    reg: &TermRegistry,
    par: Parallelism,
) -> Result<Vec<(chrono::DateTime<chrono::Utc>, f64)>, StudyError> {
    let q = parse_query(text, reg)?;
    let res = evaluate_with(g, &q, par);
    let mut out = Vec::with_capacity(res.len());
    for row in res.rows() {
        let (Some(t), Some(v)) = (
            row.get("time").and_then(Term::as_date_time),
            row.get("value").and_then(Term::as_f64),
        ) else {
            continue;
        };
        out.push((t, v));
    }
    Ok(out)
}

fn weather_series(
    g: &FrozenGraph,
    station: &Iri,
    code: &str,
    year: i32,
    reg: &TermRegistry,
    datatypes: &DatatypeRegistry,
    par: Parallelism,
) -> Result<DailySeries, StudyError> {
    let dt = datatypes
        .iri(code, reg)
        .map_err(|_| AnalysisError::UnknownDatatype(code.to_string()))?;
    let mut raw = DailySeries::new("raw");
    for (t, v) in series_rows(g, &weather_query(station, &dt, year, reg), reg, par)? {
        if let Some(prev) = raw.points.insert(t.date_naive(), v) {
            if prev != v {
                return Err(StudyError::Conflict(format!(
                    "{station} {code} on {}: {prev} and {v}",
                    t.date_naive()
                )));
            }
        }
    }
    Ok(unit_normalize(&raw, code, datatypes)?)
}

fn device_label(device: &Iri) -> String {
    device.local_name().to_string()
}

/// Correlates each device's daily energy with each requested weather
/// datatype of the station it is linked to, over one calendar year (UTC).
pub fn run_correlation_study(
    g: &FrozenGraph,
    reg: &TermRegistry,
    datatypes: &DatatypeRegistry,
    request: &StudyRequest,
    par: Parallelism,
) -> Result<StudyOutput, StudyError> {
    let year = request.year;
    for code in &request.datatypes {
        if datatypes.get(code).is_none() {
            return Err(AnalysisError::UnknownDatatype(code.clone()).into());
        }
    }
    let mut stations = Vec::with_capacity(request.devices.len());
    for d in &request.devices {
        if g.match_pattern(Some(d), None, None).is_empty() {
            return Err(StudyError::UnknownDevice(d.clone()));
        }
        stations.push(resolve_station(g, d, reg)?);
    }

    let keys: Vec<(Iri, String)> = stations
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .flat_map(|s| request.datatypes.iter().map(move |c| (s.clone(), c.clone())))
        .collect();
    let weather: HashMap<(Iri, String), DailySeries> = keys
        .iter()
        .cloned()
        .zip(par.try_map(&keys, |(s, c)| weather_series(g, s, c, year, reg, datatypes, par))?)
        .collect();

    let per_device = par.try_map(&request.devices, |d| {
        let samples = series_rows(g, &energy_query(d, year, reg), reg, par)?;
        let mut by_instant: BTreeMap<_, f64> = BTreeMap::new();
        for (t, v) in &samples {
            if let Some(prev) = by_instant.insert(*t, *v) {
                if prev != *v {
                    return Err(StudyError::Conflict(format!("{d} at {t}: {prev} and {v}")));
                }
            }
        }
        let samples: Vec<_> = by_instant.into_iter().collect();
        let (mut daily, diag) = cumulative_to_daily(&samples);
        daily.points.retain(|day, _| day.year() == year);
        Ok::<_, StudyError>((samples.len(), daily, diag))
    })?;

    let mut out = StudyOutput::default();
    let mut diagnostics: Vec<DeviceDiagnostics> = request
        .devices
        .iter()
        .zip(&stations)
        .zip(&per_device)
        .map(|((d, s), (n, daily, diag))| DeviceDiagnostics {
            device: device_label(d),
            station: Some(s.clone()),
            samples: *n,
            days: daily.len(),
            resets: diag.resets.iter().filter(|r| r.year() == year).copied().collect(),
            skipped: Vec::new(),
        })
        .collect();

    for code in &request.datatypes {
        for (i, d) in request.devices.iter().enumerate() {
            let w = &weather[&(stations[i].clone(), code.clone())];
            let pairs = align_join(&per_device[i].1, w);
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.iter().map(|(_, e, v)| (*e, *v)).unzip();
            match pearson(&x, &y) {
                Ok(r) => out.table.entries.push(CorrelationEntry {
                    datatype: code.clone(),
                    device: device_label(d),
                    r,
                    n: x.len(),
                }),
                Err(e) => diagnostics[i].skipped.push(format!("{code}: {e}")),
            }
        }
    }

    let lookup = |i: usize, code: &str, day: &NaiveDate| {
        weather
            .get(&(stations[i].clone(), code.to_string()))
            .and_then(|s| s.points.get(day).copied())
    };
    for (i, d) in request.devices.iter().enumerate() {
        for (day, kwh) in &per_device[i].1.points {
            out.scatter.push(ScatterRow {
                device: device_label(d),
                date: *day,
                energy_kwh: *kwh,
                tmax_c: lookup(i, "TMAX", day),
                prcp_mm: lookup(i, "PRCP", day),
            });
        }
    }
    out.diagnostics = diagnostics;
    Ok(out)
}
