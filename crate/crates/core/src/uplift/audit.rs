use std::collections::BTreeMap;

use crate::rdf::{FrozenGraph, Term};
use crate::vocab::{Iri, TermRegistry};

/// Post-hoc structural checks over an uplifted graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub evaluations: usize,
    pub observations: usize,
    /// Violations of the evaluation/observation shapes.
    pub problems: Vec<String>,
    /// Suspicious but legal content, such as weather self-links.
    pub warnings: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }
}

fn count_by_subject(g: &FrozenGraph, predicate: &Iri) -> BTreeMap<Iri, usize> {
    let mut out = BTreeMap::new();
    for t in g.match_pattern(None, Some(predicate), None) {
        *out.entry(t.subject).or_insert(0) += 1;
    }
    out
}

/// Every evaluation must have exactly one value and one result time; every
/// observation exactly one result, time, station and datatype.
pub fn audit_graph(g: &FrozenGraph, reg: &TermRegistry) -> AuditReport {
    let v = reg.terms();
    let mut report = AuditReport::default();
    let counts: Vec<(&str, BTreeMap<Iri, usize>)> = vec![
        ("seas:evaluatedValue", count_by_subject(g, &v.evaluated_value)),
        ("sosa:resultTime", count_by_subject(g, &v.result_time)),
        ("sosa:hasResult", count_by_subject(g, &v.has_result)),
        ("cap:sourceStation", count_by_subject(g, &v.source_station)),
        ("cap:withDataType", count_by_subject(g, &v.with_data_type)),
    ];
    let count = |name: &str, node: &Iri| {
        counts
            .iter()
            .find(|(n, _)| *n == name)
            .and_then(|(_, m)| m.get(node).copied())
            .unwrap_or(0)
    };

    let typed = |class: &Iri| -> Vec<Iri> {
        g.match_pattern(None, Some(&v.rdf_type), Some(&Term::Iri(class.clone())))
            .into_iter()
            .map(|t| t.subject)
            .collect()
    };

    for e in typed(&v.electric_power_evaluation) {
        report.evaluations += 1;
        for p in ["seas:evaluatedValue", "sosa:resultTime"] {
            let n = count(p, &e);
            if n != 1 {
                report.problems.push(format!("evaluation {e} has {n} {p} values"));
            }
        }
    }
    for o in typed(&v.observation) {
        report.observations += 1;
        for p in ["sosa:hasResult", "sosa:resultTime", "cap:sourceStation", "cap:withDataType"] {
            let n = count(p, &o);
            if n != 1 {
                report.problems.push(format!("observation {o} has {n} {p} values"));
            }
        }
    }
    for t in g.match_pattern(None, Some(&v.retrieve_weather_from), None) {
        if t.object == Term::Iri(t.subject.clone()) {
            report
                .warnings
                .push(format!("{} retrieves weather from itself", t.subject));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Graph, Triple};
    use crate::uplift::link_weather;

    #[test]
    fn detects_missing_and_duplicate_values() {
        let reg = TermRegistry::default();
        let v = reg.terms();
        let e = reg.expand(":evaluation/x/1").unwrap();
        let mut g = Graph::new();
        g.insert(Triple::new(&e, &v.rdf_type, &v.electric_power_evaluation));
        g.insert(Triple::new(&e, &v.evaluated_value, Term::double(1.0).unwrap()));
        g.insert(Triple::new(&e, &v.evaluated_value, Term::double(2.0).unwrap()));
        let r = audit_graph(&g.freeze(), &reg);
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.problems.len(), 2);
        assert!(!r.is_clean());
    }

    #[test]
    fn flags_self_links() {
        let reg = TermRegistry::default();
        let s = reg.expand(":station/S").unwrap();
        let g: Graph = [link_weather(&s, &s, &reg)].into_iter().collect();
        let r = audit_graph(&g.freeze(), &reg);
        assert!(r.is_clean());
        assert_eq!(r.warnings.len(), 1);
    }
}
