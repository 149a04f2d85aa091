use std::collections::{BTreeMap, HashMap};

use super::{ClimateRecord, UpliftError};
use crate::exec::Parallelism;
use crate::rdf::{Graph, Term, Triple};
use crate::vocab::{date_token, IndividualKind, Iri, TermRegistry};

/// Scale from source units to analysis units, and the resulting unit label.
#[derive(Clone, Debug, PartialEq)]
pub struct DatatypeInfo {
    pub scale: f64,
    pub unit: String,
}

/// Known climate datatype codes. Loaded from `code<TAB>scale<TAB>unit` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct DatatypeRegistry {
    entries: BTreeMap<String, DatatypeInfo>,
}

impl Default for DatatypeRegistry {
    /// GHCN-Daily conventions: temperatures and precipitation in tenths.
    fn default() -> Self {
        let entries = [
            ("TMAX", 0.1, "degC"),
            ("TMIN", 0.1, "degC"),
            ("TAVG", 0.1, "degC"),
            ("PRCP", 0.1, "mm"),
            ("SNOW", 1.0, "mm"),
            ("SNWD", 1.0, "mm"),
            ("AWND", 0.1, "m/s"),
        ]
        .into_iter()
        .map(|(c, scale, unit)| {
            (
                c.to_string(),
                DatatypeInfo {
                    scale,
                    unit: unit.to_string(),
                },
            )
        })
        .collect();
        DatatypeRegistry { entries }
    }
}

impl DatatypeRegistry {
    pub fn empty() -> Self {
        DatatypeRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, code: &str) -> Option<&DatatypeInfo> {
        self.entries.get(code)
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn insert(&mut self, code: &str, info: DatatypeInfo) {
        self.entries.insert(code.to_string(), info);
    }

    /// Applies `code<TAB>scale<TAB>unit` lines on top of this registry.
    pub fn extend_from_text(&mut self, text: &str) -> Result<(), UpliftError> {
        for (i, raw) in text.lines().enumerate() {
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| UpliftError::Config {
                what: "datatype registry",
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            let [code, scale, unit] = fields[..] else {
                return Err(err("expected code<TAB>scale<TAB>unit".into()));
            };
            if code.is_empty() || !code.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(format!("invalid datatype code {code:?}")));
            }
            let scale: f64 = scale
                .parse()
                .ok()
                .filter(|s: &f64| s.is_finite() && *s != 0.0)
                .ok_or_else(|| err(format!("invalid scale {scale:?}")))?;
            self.insert(
                code,
                DatatypeInfo {
                    scale,
                    unit: unit.to_string(),
                },
            );
        }
        Ok(())
    }

    /// IRI naming a datatype code in the graph.
    pub fn iri(&self, code: &str, reg: &TermRegistry) -> Result<Iri, UpliftError> {
        if !self.entries.contains_key(code) {
            return Err(UpliftError::UnknownDatatype(code.to_string()));
        }
        Ok(reg.mint_individual(IndividualKind::Datatype, &[code])?)
    }
}

pub fn station_iri(station_id: &str, reg: &TermRegistry) -> Result<Iri, UpliftError> {
    Ok(reg.mint_individual(IndividualKind::Station, &[station_id])?)
}

pub fn uplift_climate(
    records: &[ClimateRecord],
    datatypes: &DatatypeRegistry,
    reg: &TermRegistry,
) -> Result<Graph, UpliftError> {
    uplift_climate_with(records, datatypes, reg, Parallelism::default())
}

/// Five triples per record plus one type triple per station. Records repeating
/// a (station, date, datatype) key must agree on the value.
pub fn uplift_climate_with(
    records: &[ClimateRecord],
    datatypes: &DatatypeRegistry,
    reg: &TermRegistry,
    par: Parallelism,
) -> Result<Graph, UpliftError> {
    let v = reg.terms();
    let per_record = par.try_map(records, |r| {
        let station = station_iri(&r.station_id, reg)?;
        let dt = datatypes.iri(&r.datatype, reg)?;
        let obs = reg.mint_individual(
            IndividualKind::Observation,
            &[&r.station_id, &r.datatype, &date_token(&r.date)],
        )?;
        Ok::<_, UpliftError>([
            Triple::new(&station, &v.rdf_type, &v.station),
            Triple::new(&obs, &v.rdf_type, &v.observation),
            Triple::new(&obs, &v.source_station, &station),
            Triple::new(&obs, &v.with_data_type, &dt),
            Triple::new(&obs, &v.has_result, Term::double(r.value)?),
            Triple::new(&obs, &v.result_time, Term::date_midnight(&r.date)),
        ])
    })?;

    let mut seen: HashMap<(&str, chrono::NaiveDate, &str), f64> = HashMap::new();
    for r in records {
        if let Some(prev) = seen.insert((&r.station_id, r.date, &r.datatype), r.value) {
            if prev.to_bits() != r.value.to_bits() {
                return Err(UpliftError::data(
                    format!("station {} {} {}", r.station_id, r.date, r.datatype),
                    format!("conflicting values {prev} and {}", r.value),
                ));
            }
        }
    }
    Ok(per_record.into_iter().flatten().collect())
}
