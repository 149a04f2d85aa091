//! Household energy knowledge graph.
//!
//! Converts decentralized household meter tables (CoSSMic-style headings such as
//! `DE_KN_industrial1_pv_1`) into an RDF graph built on the SEAS, SOSA and
//! climate-analysis vocabularies, links the energy network to daily weather
//! observations, evaluates basic graph pattern queries over the result and
//! correlates daily solar generation with the weather.
//!
//! The pipeline is organised bottom-up:
//!
//! * [`vocab`] holds the prefix map, well-known terms and the IRI minting scheme.
//! * [`heading`] parses column headings into typed [`heading::SystemDescriptor`]s.
//! * [`rdf`] is the term model, the indexed in-memory graph and N-Triples/Turtle I/O.
//! * [`uplift`] turns tables and climate records into triples.
//! * [`query`] parses and evaluates the supported SPARQL subset.
//! * [`analysis`] derives daily series and Pearson correlation tables.
//!
//! Data-parallel loops go through [`exec::Parallelism`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

pub mod analysis;
pub mod exec;
pub mod heading;
pub mod query;
pub mod rdf;
pub mod uplift;
pub mod vocab;

pub use exec::Parallelism;
pub use heading::{HeadingError, PowerRole, RoleTable, SiteKind, SystemDescriptor};
pub use rdf::{FrozenGraph, Graph, Term, Triple};
pub use vocab::{IndividualKind, Iri, TermRegistry};
