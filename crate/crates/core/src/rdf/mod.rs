//! RDF data model: terms, triples, the indexed in-memory graph and interchange formats.

mod graph;
mod ntriples;
mod term;
mod turtle;

use std::fmt;

pub use graph::{FrozenGraph, Graph, IndexAuditError, TermId};
pub use ntriples::{parse_ntriples, parse_ntriples_with, serialize_ntriples, NTriplesError};
pub use term::{parse_date_time, parse_double, Term, TermError};
pub use turtle::serialize_turtle;

use crate::vocab::{Iri, TermRegistry};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: &Iri, predicate: &Iri, object: impl Into<Term>) -> Triple {
        Triple {
            subject: subject.clone(),
            predicate: predicate.clone(),
            object: object.into(),
        }
    }

    pub fn to_ntriples(&self) -> String {
        let mut s = String::new();
        ntriples::write_triple(self, &mut s);
        s
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdfFormat {
    NTriples,
    Turtle,
}

impl std::str::FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ntriples" | "nt" => Ok(RdfFormat::NTriples),
            "turtle" | "ttl" => Ok(RdfFormat::Turtle),
            other => Err(format!("unknown format {other:?} (expected ntriples or turtle)")),
        }
    }
}

/// Serializes triples that are already in canonical order.
pub fn serialize(triples: &[Triple], format: RdfFormat, reg: &TermRegistry) -> String {
    match format {
        RdfFormat::NTriples => serialize_ntriples(triples),
        RdfFormat::Turtle => serialize_turtle(triples, reg),
    }
}
