//! A SPARQL 1.1 subset: basic graph patterns with `FILTER(?v op constant)`,
//! one `ORDER BY` key and `LIMIT`. Solutions are computed by index nested-loop
//! joins over a [`FrozenGraph`](crate::rdf::FrozenGraph).

mod ast;
mod eval;
mod parser;
mod results;

use thiserror::Error;

pub use ast::{compare, order_terms, CompareOp, Filter, OrderBy, PatternTerm, Query, TriplePattern};
pub use eval::{evaluate, evaluate_with};
pub use parser::parse_query;
pub use results::{QueryResults, ResultsFormat, SolutionRow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("variable ?{0} does not occur in any triple pattern")]
    UnboundVariable(String),
}

impl QueryError {
    pub(crate) fn syntax(src: &str, offset: usize, message: impl Into<String>) -> QueryError {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        QueryError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Graph, Term, Triple};
    use crate::vocab::{Iri, TermRegistry};

    fn reg() -> TermRegistry {
        TermRegistry::default()
    }

    fn iri(s: &str) -> Iri {
        reg().expand(s).unwrap()
    }

    #[test]
    fn three_pattern_query_with_relative_iris() {
        let q = parse_query(
            "SELECT ?t ?v WHERE { <pv> <evaluation> ?e . ?e <evaluatedValue> ?v . ?e <resultTime> ?t }",
            &reg(),
        )
        .unwrap();
        assert_eq!(q.patterns.len(), 3);
        assert_eq!(q.select, vec!["t", "v"]);
        assert_eq!(
            q.patterns[0].subject,
            PatternTerm::Const(Term::Iri(Iri::new("http://example.org/energykg/pv").unwrap()))
        );
    }

    #[test]
    fn syntax_positions() {
        let err = parse_query("SELECT ?x\nWHERE { ?x ?p }", &reg()).unwrap_err();
        assert_eq!(
            err,
            QueryError::Syntax {
                line: 2,
                column: 15,
                message: "expected an RDF term, found '}'".into()
            }
        );
    }

    #[test]
    fn unsupported_keywords_are_named() {
        let r = reg();
        let cases = [
            ("SELECT * WHERE { SERVICE <x> { ?s ?p ?o } }", "SERVICE"),
            ("SELECT * WHERE { ?s ?p ?o OPTIONAL { ?s ?q ?z } }", "OPTIONAL"),
            ("SELECT DISTINCT ?s WHERE { ?s ?p ?o }", "DISTINCT"),
            ("SELECT * WHERE { { ?s ?p ?o } UNION { ?s ?p ?o } }", "nested group"),
            ("SELECT * WHERE { ?s ?p ?o } GROUP BY ?s", "GROUP"),
            ("SELECT * WHERE { ?s ?p ?o FILTER(regex(?o, \"x\")) }", "REGEX"),
            ("SELECT * WHERE { ?s ?p \"x\"@en }", "language-tagged literal"),
        ];
        for (q, kw) in cases {
            assert_eq!(parse_query(q, &r), Err(QueryError::Unsupported(kw.into())), "{q}");
        }
    }

    #[test]
    fn prefixes_and_unknown_prefix() {
        let r = reg();
        let q = parse_query(
            "PREFIX ex: <http://ex.org/>\nSELECT ?s WHERE { ?s a seas:System ; ex:p ex:o , 3 }",
            &r,
        )
        .unwrap();
        assert_eq!(q.patterns.len(), 3);
        assert_eq!(q.patterns[0].predicate, PatternTerm::Const(Term::Iri(r.terms().rdf_type.clone())));
        assert_eq!(
            parse_query("SELECT ?s WHERE { ?s nope:p ?o }", &r),
            Err(QueryError::UnknownPrefix("nope".into()))
        );
    }

    #[test]
    fn variables_must_occur_in_patterns() {
        let r = reg();
        for q in [
            "SELECT ?z WHERE { ?s ?p ?o }",
            "SELECT ?s WHERE { ?s ?p ?o FILTER(?z > 1) }",
            "SELECT ?s WHERE { ?s ?p ?o } ORDER BY ?z",
        ] {
            assert_eq!(parse_query(q, &r), Err(QueryError::UnboundVariable("z".into())));
        }
    }

    #[test]
    fn filters_and_modifiers() {
        let r = reg();
        let q = parse_query(
            "SELECT ?s WHERE { ?s ?p ?o . FILTER(\"2016-01-01T00:00:00Z\"^^xsd:dateTime <= ?o) } ORDER BY DESC(?o) LIMIT 5",
            &r,
        )
        .unwrap();
        assert_eq!(q.filters[0].op, CompareOp::Ge);
        assert_eq!(q.order_by, Some(OrderBy { var: "o".into(), descending: true }));
        assert_eq!(q.limit, Some(5));
        assert!(parse_query("SELECT ?s WHERE { ?s ?p ?o } LIMIT 0", &r).is_err());
        assert!(parse_query("SELECT ?s WHERE { ?s ?p ?o FILTER(?s = ?o) }", &r).is_err());
        assert!(parse_query("SELECT ?s WHERE { ?s ?p \"x\"^^xsd:double }", &r).is_err());
    }

    fn sample() -> Graph {
        let r = reg();
        let v = r.terms();
        let mut g = Graph::new();
        for (i, val) in [3.5, 1.0, 2.25].iter().enumerate() {
            let e = iri(&format!(":evaluation/pv/{i}"));
            g.insert(Triple::new(&iri(":pv"), &v.evaluation, &e));
            g.insert(Triple::new(&e, &v.evaluated_value, Term::double(*val).unwrap()));
            let t = format!("2016-05-0{}T00:00:00Z", 3 - i);
            g.insert(Triple::new(&e, &v.result_time, Term::typed(t, v.xsd_date_time.clone()).unwrap()));
        }
        g
    }

    #[test]
    fn evaluates_filters_order_limit() {
        let g = sample().freeze();
        let r = reg();
        let q = parse_query(
            "SELECT ?t ?v WHERE { :pv seas:evaluation ?e . ?e seas:evaluatedValue ?v . ?e sosa:resultTime ?t FILTER(?v > 1.5) } ORDER BY ?t",
            &r,
        )
        .unwrap();
        let res = evaluate(&g, &q);
        let vals: Vec<f64> = res.rows().iter().map(|r| r.get("v").unwrap().as_f64().unwrap()).collect();
        assert_eq!(vals, vec![2.25, 3.5]);

        let q = parse_query(
            "SELECT ?v WHERE { ?e seas:evaluatedValue ?v ; sosa:resultTime ?t } ORDER BY DESC(?t) LIMIT 1",
            &r,
        )
        .unwrap();
        let res = evaluate(&g, &q);
        assert_eq!(res.len(), 1);
        assert_eq!(res.rows()[0].values(), &[Term::double(3.5).unwrap()]);
    }

    #[test]
    fn empty_graph_and_missing_constants() {
        let r = reg();
        let q = parse_query("SELECT * WHERE { ?s ?p ?o }", &r).unwrap();
        assert!(evaluate(&Graph::new().freeze(), &q).is_empty());
        let q = parse_query("SELECT * WHERE { ?s <nowhere> ?o }", &r).unwrap();
        assert!(evaluate(&sample().freeze(), &q).is_empty());
    }

    #[test]
    fn repeated_variable_in_one_pattern() {
        let r = reg();
        let a = iri(":a");
        let b = iri(":b");
        let g: Graph = [
            Triple::new(&a, &a, &a),
            Triple::new(&a, &a, &b),
            Triple::new(&b, &a, &b),
        ]
        .into_iter()
        .collect();
        let q = parse_query("SELECT ?x WHERE { ?x ?p ?x }", &r).unwrap();
        let res = evaluate(&g.freeze(), &q);
        assert_eq!(res.len(), 2);
    }

    #[test]
    fn filter_semantics() {
        let r = reg();
        let v = r.terms();
        let dt = |s: &str| Term::typed(s, v.xsd_date_time.clone()).unwrap();
        let num = |x: f64| Term::double(x).unwrap();
        assert!(compare(&dt("2016-01-02T00:00:00Z"), CompareOp::Ge, &dt("2016-01-01T23:59:59Z")));
        assert!(compare(&num(10.0), CompareOp::Gt, &Term::typed("9", Iri::new(crate::vocab::XSD_INTEGER).unwrap()).unwrap()));
        assert!(compare(&Term::plain("b"), CompareOp::Gt, &Term::plain("a")));
        assert!(!compare(&num(1.0), CompareOp::Lt, &Term::plain("z")));
        assert!(compare(&num(1.0), CompareOp::Ne, &Term::plain("z")));
        assert!(compare(&Term::Iri(iri(":a")), CompareOp::Eq, &Term::Iri(iri(":a"))));
    }

    #[test]
    fn json_and_tsv_shapes() {
        let g = sample().freeze();
        let r = reg();
        let q = parse_query("SELECT ?e ?v WHERE { ?e seas:evaluatedValue ?v } LIMIT 1", &r).unwrap();
        let res = evaluate(&g, &q);
        assert_eq!(
            res.to_json(),
            concat!(
                r#"{"head":{"vars":["e","v"]},"results":{"bindings":[{"e":{"type":"uri","value":"http://example.org/energykg/evaluation/pv/0"},"#,
                r#""v":{"type":"literal","value":"3.5","datatype":"http://www.w3.org/2001/XMLSchema#double"}}]}}"#,
                "\n"
            )
        );
        assert_eq!(
            res.to_tsv(),
            "?e\t?v\n<http://example.org/energykg/evaluation/pv/0>\t\"3.5\"^^<http://www.w3.org/2001/XMLSchema#double>\n"
        );
    }
}
