//! Turtle writer. Emit-only; N-Triples is the interchange format.

use super::term::write_quoted;
use super::{Term, Triple};
use crate::vocab::{Iri, TermRegistry, RDF_NS};

fn write_iri(iri: &Iri, reg: &TermRegistry, out: &mut String) {
    match reg.compact(iri) {
        Some(curie) => out.push_str(&curie),
        None => {
            out.push('<');
            out.push_str(iri.as_str());
            out.push('>');
        }
    }
}

fn write_object(t: &Term, reg: &TermRegistry, out: &mut String) {
    match t {
        Term::Iri(i) => write_iri(i, reg, out),
        Term::Plain(l) => write_quoted(l, out),
        Term::Typed { lexical, datatype } => {
            write_quoted(lexical, out);
            out.push_str("^^");
            write_iri(datatype, reg, out);
        }
    }
}

/// Prefix declarations for every registered namespace, then one block per
/// subject with `;`-separated predicate/object pairs.
pub fn serialize_turtle(triples: &[Triple], reg: &TermRegistry) -> String {
    let mut out = String::new();
    for (prefix, ns) in reg.prefixes() {
        out.push_str(&format!("@prefix {prefix}: <{ns}> .\n"));
    }
    let rdf_type = format!("{RDF_NS}type");
    let mut current: Option<&Iri> = None;
    for t in triples {
        if current == Some(&t.subject) {
            out.push_str(" ;\n    ");
        } else {
            if current.is_some() {
                out.push_str(" .\n");
            }
            out.push('\n');
            write_iri(&t.subject, reg, &mut out);
            out.push(' ');
            current = Some(&t.subject);
        }
        if t.predicate.as_str() == rdf_type {
            out.push('a');
        } else {
            write_iri(&t.predicate, reg, &mut out);
        }
        out.push(' ');
        write_object(&t.object, reg, &mut out);
    }
    if current.is_some() {
        out.push_str(" .\n");
    }
    out
}
