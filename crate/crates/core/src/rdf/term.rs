use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use thiserror::Error;

use crate::vocab::{Iri, XSD_DATE_TIME, XSD_DECIMAL, XSD_DOUBLE, XSD_FLOAT, XSD_INTEGER, XSD_STRING};

const DATE_TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("{lexical:?} is not a valid {datatype} lexical form")]
    InvalidLexical { lexical: String, datatype: &'static str },
    #[error("non-finite value {0} cannot be stored as xsd:double")]
    NonFinite(String),
}

/// RDF term. Literals carry no language tags and there are no blank nodes.
///
/// The derived ordering is structural; output ordering everywhere uses the
/// N-Triples form instead (see [`Term::to_ntriples`]).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Typed { lexical: String, datatype: Iri },
    Plain(String),
}

impl Term {
    pub fn plain(lexical: impl Into<String>) -> Term {
        Term::Plain(lexical.into())
    }

    /// Typed literal; `xsd:double` and `xsd:dateTime` lexical forms are checked.
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Term, TermError> {
        let lexical = lexical.into();
        match datatype.as_str() {
            XSD_DOUBLE if parse_double(&lexical).is_none() => {
                return Err(TermError::InvalidLexical {
                    lexical,
                    datatype: "xsd:double",
                });
            }
            XSD_DATE_TIME if parse_date_time(&lexical).is_none() => {
                return Err(TermError::InvalidLexical {
                    lexical,
                    datatype: "xsd:dateTime",
                });
            }
            _ => {}
        }
        Ok(Term::Typed { lexical, datatype })
    }

    /// `xsd:double` with the shortest lexical form that parses back to `v`.
    pub fn double(v: f64) -> Result<Term, TermError> {
        if !v.is_finite() {
            return Err(TermError::NonFinite(v.to_string()));
        }
        Ok(Term::Typed {
            lexical: format!("{v:?}"),
            datatype: xsd(XSD_DOUBLE),
        })
    }

    /// `xsd:dateTime` in `YYYY-MM-DDThh:mm:ssZ` form (sub-second parts dropped).
    pub fn date_time(t: &DateTime<Utc>) -> Term {
        Term::Typed {
            lexical: t.format(DATE_TIME_FORMAT).to_string(),
            datatype: xsd(XSD_DATE_TIME),
        }
    }

    /// Midnight UTC of `d`.
    pub fn date_midnight(d: &NaiveDate) -> Term {
        Term::date_time(&d.and_hms_opt(0, 0, 0).expect("midnight").and_utc())
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        !matches!(self, Term::Iri(_))
    }

    /// Lexical form of a literal, IRI text otherwise.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(i) => i.as_str(),
            Term::Typed { lexical, .. } => lexical,
            Term::Plain(l) => l,
        }
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match self {
            Term::Typed { datatype, .. } => Some(datatype),
            _ => None,
        }
    }

    /// Numeric value for `xsd:double`, `xsd:float`, `xsd:decimal` and `xsd:integer` literals.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Term::Typed { lexical, datatype }
                if matches!(datatype.as_str(), XSD_DOUBLE | XSD_FLOAT | XSD_DECIMAL | XSD_INTEGER) =>
            {
                parse_double(lexical)
            }
            _ => None,
        }
    }

    pub fn as_date_time(&self) -> Option<DateTime<Utc>> {
        match self {
            Term::Typed { lexical, datatype } if datatype.as_str() == XSD_DATE_TIME => {
                parse_date_time(lexical)
            }
            _ => None,
        }
    }

    /// Lexical text of plain and `xsd:string` literals.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Term::Plain(l) => Some(l),
            Term::Typed { lexical, datatype } if datatype.as_str() == XSD_STRING => Some(lexical),
            _ => None,
        }
    }

    pub fn write_ntriples(&self, out: &mut String) {
        match self {
            Term::Iri(i) => {
                out.push('<');
                out.push_str(i.as_str());
                out.push('>');
            }
            Term::Typed { lexical, datatype } => {
                write_quoted(lexical, out);
                out.push_str("^^<");
                out.push_str(datatype.as_str());
                out.push('>');
            }
            Term::Plain(l) => write_quoted(l, out),
        }
    }

    pub fn to_ntriples(&self) -> String {
        let mut s = String::new();
        self.write_ntriples(&mut s);
        s
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<&Iri> for Term {
    fn from(i: &Iri) -> Self {
        Term::Iri(i.clone())
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

fn xsd(iri: &str) -> Iri {
    Iri::new(iri).expect("xsd datatype IRI")
}

pub(crate) fn write_quoted(lexical: &str, out: &mut String) {
    out.push('"');
    for c in lexical.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Finite decimal or scientific notation; rejects `inf`, `NaN` and friends.
pub fn parse_double(lexical: &str) -> Option<f64> {
    let body = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    let starts_ok = body.starts_with(|c: char| c.is_ascii_digit() || c == '.');
    if !starts_ok || !body.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
        return None;
    }
    lexical.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Strict `YYYY-MM-DDThh:mm:ssZ`.
pub fn parse_date_time(lexical: &str) -> Option<DateTime<Utc>> {
    if lexical.len() != 20 {
        return None;
    }
    NaiveDateTime::parse_from_str(lexical, DATE_TIME_FORMAT)
        .ok()
        .map(|n| n.and_utc())
}
