//! Ontology terms, prefix handling and the IRI minting scheme.
//!
//! Namespaces live only in the prefix map. The well-known terms in
//! [`Vocabulary`] are resolved from it when the registry is built, so swapping
//! a namespace (for example the provisional climate-analysis one) is a
//! configuration change.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, Utc};
use thiserror::Error;

pub const DEFAULT_BASE: &str = "http://example.org/energykg/";

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const SEAS_NS: &str = "https://w3id.org/seas/";
pub const SOSA_NS: &str = "http://www.w3.org/ns/sosa/";
/// Climate-analysis classes. Provisional: the published namespace is not known.
pub const CA_CLASS_NS: &str = "http://jresearch.ucd.ie/climate-kg/ontology/class/";
/// Climate-analysis properties. Provisional, see [`CA_CLASS_NS`].
pub const CA_PROP_NS: &str = "http://jresearch.ucd.ie/climate-kg/ontology/property/";

pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabError {
    #[error("invalid IRI {iri:?}: {reason}")]
    InvalidIri { iri: String, reason: &'static str },
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("not a prefixed name: {0:?}")]
    NotACurie(String),
    #[error("invalid prefix label {0:?}")]
    InvalidPrefix(String),
    #[error("cannot mint {kind} individual: illegal name part {part:?}")]
    IllegalPart { kind: IndividualKind, part: String },
    #[error("cannot mint {kind} individual: expected {expected} name parts, got {got}")]
    Arity {
        kind: IndividualKind,
        expected: &'static str,
        got: usize,
    },
    #[error("prefix map line {line}: {message}")]
    PrefixFile { line: usize, message: String },
}

/// An absolute IRI. Cheap to clone; equality is byte equality of the text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(text: impl AsRef<str>) -> Result<Self, VocabError> {
        let text = text.as_ref();
        let invalid = |reason| VocabError::InvalidIri {
            iri: text.to_string(),
            reason,
        };
        if text.is_empty() {
            return Err(invalid("empty"));
        }
        let Some(colon) = text.find(':') else {
            return Err(invalid("missing scheme separator"));
        };
        let scheme = &text[..colon];
        let scheme_ok = scheme
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        if !scheme_ok {
            return Err(invalid("malformed scheme"));
        }
        // IRIREF exclusions of the N-Triples grammar; whitespace and angle
        // brackets are the ones that matter most.
        if text
            .chars()
            .any(|c| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
        {
            return Err(invalid("contains whitespace, control or delimiter characters"));
        }
        Ok(Iri(Arc::from(text)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Text after the last `/` or `#`.
    pub fn local_name(&self) -> &str {
        let s = self.as_str();
        match s.rfind(['/', '#']) {
            Some(i) if i + 1 < s.len() => &s[i + 1..],
            _ => s,
        }
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Kinds of individuals the pipeline mints.
///
/// Networks and devices are named directly under the base namespace with their
/// name parts joined by `_` (so the device of heading `DE_KN_industrial1_pv_1`
/// is `{base}DE_KN_industrial1_pv_1`). Underscores inside a part become `-`,
/// and the two kinds differ in arity (3 parts vs 4–5), which keeps the mapping
/// injective. Every other kind lives under its own path segment with parts
/// separated by `/`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndividualKind {
    Network,
    Device,
    Site,
    Locality,
    Property,
    Evaluation,
    Station,
    Observation,
    Datatype,
}

impl IndividualKind {
    pub const ALL: [IndividualKind; 9] = [
        IndividualKind::Network,
        IndividualKind::Device,
        IndividualKind::Site,
        IndividualKind::Locality,
        IndividualKind::Property,
        IndividualKind::Evaluation,
        IndividualKind::Station,
        IndividualKind::Observation,
        IndividualKind::Datatype,
    ];

    fn segment(self) -> Option<&'static str> {
        match self {
            IndividualKind::Network | IndividualKind::Device => None,
            IndividualKind::Site => Some("site"),
            IndividualKind::Locality => Some("locality"),
            IndividualKind::Property => Some("property"),
            IndividualKind::Evaluation => Some("evaluation"),
            IndividualKind::Station => Some("station"),
            IndividualKind::Observation => Some("observation"),
            IndividualKind::Datatype => Some("datatype"),
        }
    }

    fn arity(self) -> Option<(usize, usize, &'static str)> {
        match self {
            IndividualKind::Network => Some((3, 3, "3")),
            IndividualKind::Device => Some((4, 5, "4 or 5")),
            _ => None,
        }
    }
}

impl fmt::Display for IndividualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            IndividualKind::Network => "network",
            IndividualKind::Device => "device",
            IndividualKind::Site => "site",
            IndividualKind::Locality => "locality",
            IndividualKind::Property => "property",
            IndividualKind::Evaluation => "evaluation",
            IndividualKind::Station => "station",
            IndividualKind::Observation => "observation",
            IndividualKind::Datatype => "datatype",
        };
        f.write_str(name)
    }
}

/// Colon-free rendering of a UTC instant usable as a name part: `20160501T000000Z`.
pub fn timestamp_token(t: &DateTime<Utc>) -> String {
    t.format("%Y%m%dT%H%M%SZ").to_string()
}

/// `20160501`
pub fn date_token(d: &NaiveDate) -> String {
    d.format("%Y%m%d").to_string()
}

/// The well-known terms used by the uplift models, resolved against the prefix map.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    pub rdf_type: Iri,
    pub rdfs_label: Iri,
    pub xsd_double: Iri,
    pub xsd_date_time: Iri,

    pub electric_power_distribution_network: Iri,
    pub electric_power_transmission_system: Iri,
    pub system: Iri,
    pub is_powered_by: Iri,
    pub powers: Iri,
    pub produced_electric_power: Iri,
    pub consumed_electric_power: Iri,
    pub sub_system_of: Iri,
    pub electric_power_evaluation: Iri,
    pub evaluation: Iri,
    pub evaluated_value: Iri,

    pub station: Iri,
    pub observation: Iri,
    pub source_station: Iri,
    pub with_data_type: Iri,
    pub retrieve_weather_from: Iri,

    pub has_result: Iri,
    pub result_time: Iri,

    /// Site location; minted under the base namespace.
    pub located_in: Iri,
}

impl Vocabulary {
    /// All terms as `(curie, iri)` pairs, in declaration order.
    pub fn entries(&self) -> Vec<(&'static str, &Iri)> {
        vec![
            ("rdf:type", &self.rdf_type),
            ("rdfs:label", &self.rdfs_label),
            ("xsd:double", &self.xsd_double),
            ("xsd:dateTime", &self.xsd_date_time),
            ("seas:ElectricPowerDistributionNetwork", &self.electric_power_distribution_network),
            ("seas:ElectricPowerTransmissionSystem", &self.electric_power_transmission_system),
            ("seas:System", &self.system),
            ("seas:isPoweredBy", &self.is_powered_by),
            ("seas:powers", &self.powers),
            ("seas:producedElectricPower", &self.produced_electric_power),
            ("seas:consumedElectricPower", &self.consumed_electric_power),
            ("seas:subSystemOf", &self.sub_system_of),
            ("seas:ElectricPowerEvaluation", &self.electric_power_evaluation),
            ("seas:evaluation", &self.evaluation),
            ("seas:evaluatedValue", &self.evaluated_value),
            ("cac:Station", &self.station),
            ("cac:Observation", &self.observation),
            ("cap:sourceStation", &self.source_station),
            ("cap:withDataType", &self.with_data_type),
            ("cap:retrieveWeatherFrom", &self.retrieve_weather_from),
            ("sosa:hasResult", &self.has_result),
            ("sosa:resultTime", &self.result_time),
            (":locatedIn", &self.located_in),
        ]
    }
}

/// Prefix map plus the resolved [`Vocabulary`] and the minting base.
///
/// Immutable once built; share it freely between threads.
#[derive(Clone, Debug)]
pub struct TermRegistry {
    prefixes: BTreeMap<String, String>,
    terms: Vocabulary,
}

impl Default for TermRegistry {
    fn default() -> Self {
        TermRegistry::new(DEFAULT_BASE).expect("default namespaces are valid")
    }
}

fn default_prefixes(base: &str) -> BTreeMap<String, String> {
    [
        ("", base),
        ("rdf", RDF_NS),
        ("rdfs", RDFS_NS),
        ("xsd", XSD_NS),
        ("seas", SEAS_NS),
        ("sosa", SOSA_NS),
        ("cac", CA_CLASS_NS),
        ("cap", CA_PROP_NS),
    ]
    .into_iter()
    .map(|(p, n)| (p.to_string(), n.to_string()))
    .collect()
}

fn valid_prefix_label(p: &str) -> bool {
    p.is_empty()
        || (p.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

/// Local parts we are willing to write as `prefix:local`.
fn valid_local(l: &str) -> bool {
    !l.is_empty()
        && !l.ends_with('.')
        && !l.starts_with(['-', '.'])
        && l.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn normalize_base(base: &str) -> String {
    if base.ends_with('/') || base.ends_with('#') {
        base.to_string()
    } else {
        format!("{base}/")
    }
}

impl TermRegistry {
    /// Registry with the default namespaces and the given minting base.
    pub fn new(base: &str) -> Result<Self, VocabError> {
        Self::with_prefixes(base, std::iter::empty())
    }

    /// Default namespaces, then `overrides` on top. An entry with the empty
    /// prefix replaces the minting base.
    pub fn with_prefixes<I>(base: &str, overrides: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut prefixes = default_prefixes(&normalize_base(base));
        for (prefix, ns) in overrides {
            if !valid_prefix_label(&prefix) {
                return Err(VocabError::InvalidPrefix(prefix));
            }
            let ns = if prefix.is_empty() { normalize_base(&ns) } else { ns };
            prefixes.insert(prefix, ns);
        }
        for ns in prefixes.values() {
            Iri::new(ns)?;
        }
        let lookup = |p: &str, local: &str| -> Result<Iri, VocabError> {
            let ns = prefixes
                .get(p)
                .ok_or_else(|| VocabError::UnknownPrefix(p.to_string()))?;
            Iri::new(format!("{ns}{local}"))
        };
        let terms = Vocabulary {
            rdf_type: lookup("rdf", "type")?,
            rdfs_label: lookup("rdfs", "label")?,
            xsd_double: lookup("xsd", "double")?,
            xsd_date_time: lookup("xsd", "dateTime")?,
            electric_power_distribution_network: lookup("seas", "ElectricPowerDistributionNetwork")?,
            electric_power_transmission_system: lookup("seas", "ElectricPowerTransmissionSystem")?,
            system: lookup("seas", "System")?,
            is_powered_by: lookup("seas", "isPoweredBy")?,
            powers: lookup("seas", "powers")?,
            produced_electric_power: lookup("seas", "producedElectricPower")?,
            consumed_electric_power: lookup("seas", "consumedElectricPower")?,
            sub_system_of: lookup("seas", "subSystemOf")?,
            electric_power_evaluation: lookup("seas", "ElectricPowerEvaluation")?,
            evaluation: lookup("seas", "evaluation")?,
            evaluated_value: lookup("seas", "evaluatedValue")?,
            station: lookup("cac", "Station")?,
            observation: lookup("cac", "Observation")?,
            source_station: lookup("cap", "sourceStation")?,
            with_data_type: lookup("cap", "withDataType")?,
            retrieve_weather_from: lookup("cap", "retrieveWeatherFrom")?,
            has_result: lookup("sosa", "hasResult")?,
            result_time: lookup("sosa", "resultTime")?,
            located_in: lookup("", "locatedIn")?,
        };
        Ok(TermRegistry { prefixes, terms })
    }

    /// Parses `prefix<TAB>namespace` lines. Blank lines and `#` comments are skipped.
    pub fn parse_prefix_map(text: &str) -> Result<Vec<(String, String)>, VocabError> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let Some((prefix, ns)) = trimmed.split_once('\t') else {
                return Err(VocabError::PrefixFile {
                    line: line_no,
                    message: "expected prefix<TAB>namespace".into(),
                });
            };
            let prefix = prefix.trim().trim_end_matches(':').to_string();
            let ns = ns.trim().to_string();
            if !valid_prefix_label(&prefix) {
                return Err(VocabError::PrefixFile {
                    line: line_no,
                    message: format!("invalid prefix {prefix:?}"),
                });
            }
            Iri::new(&ns).map_err(|e| VocabError::PrefixFile {
                line: line_no,
                message: e.to_string(),
            })?;
            if !seen.insert(prefix.clone()) {
                return Err(VocabError::PrefixFile {
                    line: line_no,
                    message: format!("duplicate prefix {prefix:?}"),
                });
            }
            out.push((prefix, ns));
        }
        Ok(out)
    }

    pub fn terms(&self) -> &Vocabulary {
        &self.terms
    }

    /// The minting namespace (the empty prefix).
    pub fn base(&self) -> &str {
        &self.prefixes[""]
    }

    pub fn prefixes(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.prefixes.get(prefix).map(String::as_str)
    }

    /// `seas:subSystemOf` → `<https://w3id.org/seas/subSystemOf>`.
    pub fn expand(&self, curie: &str) -> Result<Iri, VocabError> {
        let (prefix, local) = curie
            .split_once(':')
            .ok_or_else(|| VocabError::NotACurie(curie.to_string()))?;
        let ns = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| VocabError::UnknownPrefix(prefix.to_string()))?;
        Iri::new(format!("{ns}{local}"))
    }

    /// Shortest `prefix:local` form of `iri`, if some namespace covers it.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        let text = iri.as_str();
        self.prefixes
            .iter()
            .filter(|(_, ns)| text.len() > ns.len() && text.starts_with(ns.as_str()))
            .filter(|(_, ns)| valid_local(&text[ns.len()..]))
            // longest namespace wins, then the smallest prefix label
            .max_by(|(pa, a), (pb, b)| a.len().cmp(&b.len()).then(pb.cmp(pa)))
            .map(|(p, ns)| format!("{p}:{}", &text[ns.len()..]))
    }

    /// Deterministic, injective IRI for an individual. Parts must be non-empty
    /// and use only `[A-Za-z0-9_]`.
    pub fn mint_individual(&self, kind: IndividualKind, parts: &[&str]) -> Result<Iri, VocabError> {
        if parts.is_empty() {
            return Err(VocabError::Arity {
                kind,
                expected: "at least 1",
                got: 0,
            });
        }
        if let Some((lo, hi, expected)) = kind.arity() {
            if parts.len() < lo || parts.len() > hi {
                return Err(VocabError::Arity {
                    kind,
                    expected,
                    got: parts.len(),
                });
            }
        }
        for part in parts {
            if part.is_empty() || !part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(VocabError::IllegalPart {
                    kind,
                    part: part.to_string(),
                });
            }
        }
        let local = match kind.segment() {
            None => parts
                .iter()
                .map(|p| p.replace('_', "-"))
                .collect::<Vec<_>>()
                .join("_"),
            Some(seg) => format!("{seg}/{}", parts.join("/")),
        };
        Iri::new(format!("{}{local}", self.base()))
    }

    /// Evaluation node for one reading of `device_heading` at `at`.
    pub fn mint_evaluation(&self, device_heading: &str, at: &DateTime<Utc>) -> Result<Iri, VocabError> {
        self.mint_individual(IndividualKind::Evaluation, &[device_heading, &timestamp_token(at)])
    }
}
