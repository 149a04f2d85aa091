use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;

use crate::rdf::Term;

/// One solution, binding exactly the selected variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionRow {
    vars: Arc<[String]>,
    values: Vec<Term>,
}

impl SolutionRow {
    pub(crate) fn new(vars: Arc<[String]>, values: Vec<Term>) -> Self {
        debug_assert_eq!(vars.len(), values.len());
        SolutionRow { vars, values }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.vars.iter().position(|v| v == var).map(|i| &self.values[i])
    }

    pub fn values(&self) -> &[Term] {
        &self.values
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.vars.iter().map(String::as_str).zip(&self.values)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResults {
    vars: Arc<[String]>,
    rows: Vec<SolutionRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResultsFormat {
    Json,
    Tsv,
}

impl FromStr for ResultsFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ResultsFormat::Json),
            "tsv" => Ok(ResultsFormat::Tsv),
            other => Err(format!("unknown results format {other:?} (expected json or tsv)")),
        }
    }
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    head: JsonHead<'a>,
    results: JsonBindings<'a>,
}

#[derive(Serialize)]
struct JsonHead<'a> {
    vars: &'a [String],
}

#[derive(Serialize)]
struct JsonBindings<'a> {
    bindings: Vec<IndexMap<&'a str, JsonTerm<'a>>>,
}

#[derive(Serialize)]
struct JsonTerm<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    value: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    datatype: Option<&'a str>,
}

impl<'a> From<&'a Term> for JsonTerm<'a> {
    fn from(t: &'a Term) -> Self {
        JsonTerm {
            kind: if t.is_literal() { "literal" } else { "uri" },
            value: t.value(),
            datatype: t.datatype().map(|d| d.as_str()),
        }
    }
}

impl QueryResults {
    pub(crate) fn new(vars: Arc<[String]>, rows: Vec<SolutionRow>) -> Self {
        QueryResults { vars, rows }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[SolutionRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// SPARQL 1.1 JSON results document on one line, newline-terminated.
    pub fn to_json(&self) -> String {
        let doc = JsonDoc {
            head: JsonHead { vars: &self.vars },
            results: JsonBindings {
                bindings: self
                    .rows
                    .iter()
                    .map(|r| r.bindings().map(|(v, t)| (v, JsonTerm::from(t))).collect())
                    .collect(),
            },
        };
        let mut s = serde_json::to_string(&doc).expect("results serialize");
        s.push('\n');
        s
    }

    /// SPARQL 1.1 TSV results: `?var` header, N-Triples terms with tabs and
    /// newlines escaped.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.vars.iter().map(|v| format!("?{v}")).collect();
        out.push_str(&header.join("\t"));
        out.push('\n');
        for r in &self.rows {
            for (i, t) in r.values.iter().enumerate() {
                if i > 0 {
                    out.push('\t');
                }
                let nt = t.to_ntriples();
                if nt.contains('\t') {
                    out.push_str(&nt.replace('\t', "\\t"));
                } else {
                    out.push_str(&nt);
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: ResultsFormat) -> String {
        match format {
            ResultsFormat::Json => self.to_json(),
            ResultsFormat::Tsv => self.to_tsv(),
        }
    }
}
