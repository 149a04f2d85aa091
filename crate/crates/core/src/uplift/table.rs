use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use chrono::{DateTime, NaiveDate, Utc};

use super::{station_iri, ClimateRecord, EnergyRow, UpliftError};
use crate::rdf::parse_date_time;
use crate::vocab::{Iri, TermRegistry};

/// Columns of the public household tables that carry no readings.
pub const IGNORED_COLUMNS: &[&str] = &["cet_cest_timestamp", "interpolated"];

/// Parsed energy table: reading headings in file order plus the rows.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTable {
    pub headings: Vec<String>,
    pub rows: Vec<EnergyRow>,
    pub ignored_columns: Vec<String>,
}

/// `YYYY-MM-DDThh:mm:ssZ`, or the same with an explicit `+00:00` offset.
pub fn parse_utc_timestamp(text: &str) -> Option<DateTime<Utc>> {
    let text = text.trim();
    if let Some(t) = parse_date_time(text) {
        return Some(t);
    }
    let t = DateTime::parse_from_rfc3339(text).ok()?;
    if t.offset().local_minus_utc() != 0 || t.timestamp_subsec_nanos() != 0 {
        return None;
    }
    Some(t.with_timezone(&Utc))
}

fn csv_error(e: csv::Error) -> UpliftError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    UpliftError::data(format!("line {line}"), e.to_string())
}

/// Reads `utc_timestamp,<heading>,<heading>,...`. Timestamps must strictly
/// increase; empty cells are missing readings.
pub fn read_energy_table<R: Read>(input: R) -> Result<EnergyTable, UpliftError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.get(0) != Some("utc_timestamp") {
        return Err(UpliftError::data(
            "line 1",
            format!("first column must be utc_timestamp, found {:?}", header.get(0).unwrap_or("")),
        ));
    }

    let mut headings = Vec::new();
    let mut columns = Vec::new();
    let mut ignored_columns = Vec::new();
    let mut seen = HashSet::new();
    for (i, name) in header.iter().enumerate().skip(1) {
        if IGNORED_COLUMNS.contains(&name) {
            log::info!("ignoring column {name:?}");
            ignored_columns.push(name.to_string());
            continue;
        }
        if !seen.insert(name.to_string()) {
            return Err(UpliftError::data("line 1", format!("duplicate column {name:?}")));
        }
        headings.push(name.to_string());
        columns.push(i);
    }

    let mut rows = Vec::new();
    let mut previous: Option<DateTime<Utc>> = None;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let locator = |what: &str| format!("line {line}{what}");
        let stamp = record.get(0).unwrap_or("");
        let ts = parse_utc_timestamp(stamp)
            .ok_or_else(|| UpliftError::data(locator(""), format!("unparseable UTC timestamp {stamp:?}")))?;
        if previous.is_some_and(|p| ts <= p) {
            return Err(UpliftError::data(
                locator(""),
                format!("timestamp {stamp} does not increase"),
            ));
        }
        previous = Some(ts);

        let mut readings = BTreeMap::new();
        for (heading, &col) in headings.iter().zip(&columns) {
            let cell = record.get(col).unwrap_or("");
            let value = if cell.is_empty() {
                None
            } else {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| {
                        UpliftError::data(locator(&format!(", column {heading}")), format!("bad number {cell:?}"))
                    })?;
                Some(v)
            };
            readings.insert(heading.clone(), value);
        }
        rows.push(EnergyRow {
            utc_timestamp: ts,
            readings,
        });
    }
    Ok(EnergyTable {
        headings,
        rows,
        ignored_columns,
    })
}

/// Reads `station,date,datatype,value,unit` records.
pub fn read_climate_records<R: Read>(input: R) -> Result<Vec<ClimateRecord>, UpliftError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(csv_error)?;
    let expected = ["station", "date", "datatype", "value", "unit"];
    if header.iter().ne(expected) {
        return Err(UpliftError::data(
            "line 1",
            format!("climate header must be {}", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("");
        let locator = format!("line {line}");
        let station_id = field(0);
        if station_id.is_empty() {
            return Err(UpliftError::data(locator, "empty station id"));
        }
        let date = NaiveDate::parse_from_str(field(1), "%Y-%m-%d")
            .map_err(|_| UpliftError::data(&locator, format!("bad date {:?}", field(1))))?;
        let value: f64 = field(3)
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| UpliftError::data(&locator, format!("bad value {:?}", field(3))))?;
        out.push(ClimateRecord {
            station_id: station_id.to_string(),
            date,
            datatype: field(2).to_string(),
            value,
            unit: field(4).to_string(),
        });
    }
    Ok(out)
}

/// `locality<TAB>station` lines, where the station is an absolute IRI or a
/// bare station id minted under the registry base.
pub fn parse_station_map(text: &str, reg: &TermRegistry) -> Result<Vec<(String, Iri)>, UpliftError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| UpliftError::Config {
            what: "station mapping",
            line: i + 1,
            message,
        };
        let (locality, iri) = raw
            .split_once('\t')
            .ok_or_else(|| err("expected locality<TAB>station".into()))?;
        let iri = iri.trim();
        let iri = if iri.contains(':') {
            Iri::new(iri).map_err(|e| err(e.to_string()))?
        } else {
            station_iri(iri, reg).map_err(|e| err(e.to_string()))?
        };
        out.push((locality.trim().to_string(), iri));
    }
    Ok(out)
}
