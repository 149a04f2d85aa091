//! Tabular energy readings and climate records to RDF.
//!
//! Energy model: every device is a sub-system of its site, every site a
//! sub-system of the distribution network. Readings hang off a per-device
//! property node:
//!
//! ```text
//! device --produced|consumedElectricPower--> property --seas:evaluation--> evaluation
//! evaluation  a seas:ElectricPowerEvaluation ;
//!             seas:evaluatedValue "v"^^xsd:double ;
//!             sosa:resultTime "t"^^xsd:dateTime .
//! ```
//!
//! Climate model: one `cac:Observation` per record, linked to its `cac:Station`
//! and datatype; the network (or any other individual) points at the station
//! through `cap:retrieveWeatherFrom`.

mod audit;
mod climate;
mod rows;
mod table;
mod topology;

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, Utc};
use thiserror::Error;

use crate::heading::HeadingError;
use crate::rdf::TermError;
use crate::vocab::VocabError;

pub use audit::{audit_graph, AuditReport};
pub use climate::{station_iri, uplift_climate, uplift_climate_with, DatatypeInfo, DatatypeRegistry};
pub use rows::{uplift_rows, uplift_rows_with, CellStats};
pub use table::{
    parse_station_map, parse_utc_timestamp, read_climate_records, read_energy_table, EnergyTable,
    IGNORED_COLUMNS,
};
pub use topology::{build_topology, link_weather};

/// One timestamped row of cumulative readings (kWh). `None` is an empty cell.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRow {
    pub utc_timestamp: DateTime<Utc>,
    pub readings: BTreeMap<String, Option<f64>>,
}

/// One daily station observation, in the units delivered by the source.
#[derive(Clone, Debug, PartialEq)]
pub struct ClimateRecord {
    pub station_id: String,
    pub date: NaiveDate,
    pub datatype: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UpliftError {
    #[error("{locator}: {message}")]
    Data { locator: String, message: String },
    #[error("heading {0:?} has no system descriptor")]
    UnknownHeading(String),
    #[error("unknown climate datatype {0:?}")]
    UnknownDatatype(String),
    #[error("topology conflict: {0}")]
    Topology(String),
    #[error("{what} line {line}: {message}")]
    Config {
        what: &'static str,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Heading(#[from] HeadingError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Term(#[from] TermError),
}

impl UpliftError {
    pub(crate) fn data(locator: impl Into<String>, message: impl Into<String>) -> Self {
        UpliftError::Data {
            locator: locator.into(),
            message: message.into(),
        }
    }
}
