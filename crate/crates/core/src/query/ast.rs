use std::cmp::Ordering;
use std::fmt;

use crate::rdf::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(String),
    Const(Term),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    /// `a op b` ⇔ `b op.flip() a`
    pub fn flip(self) -> CompareOp {
        match self {
            CompareOp::Eq => CompareOp::Eq,
            CompareOp::Ne => CompareOp::Ne,
            CompareOp::Lt => CompareOp::Gt,
            CompareOp::Le => CompareOp::Ge,
            CompareOp::Gt => CompareOp::Lt,
            CompareOp::Ge => CompareOp::Le,
        }
    }

    fn accepts(self, ord: Ordering) -> bool {
        match self {
            CompareOp::Eq => ord == Ordering::Equal,
            CompareOp::Ne => ord != Ordering::Equal,
            CompareOp::Lt => ord == Ordering::Less,
            CompareOp::Le => ord != Ordering::Greater,
            CompareOp::Gt => ord == Ordering::Greater,
            CompareOp::Ge => ord != Ordering::Less,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        })
    }
}

/// `?var op constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Filter {
    pub var: String,
    pub op: CompareOp,
    pub constant: Term,
}

impl Filter {
    pub fn holds(&self, value: &Term) -> bool {
        compare(value, self.op, &self.constant)
    }
}

/// Filter comparison: numeric literals compare by value, `xsd:dateTime` by
/// instant, plain/`xsd:string` literals lexically. Any other pairing supports
/// only `=`/`!=` as term equality; ordering operators are false.
pub fn compare(value: &Term, op: CompareOp, constant: &Term) -> bool {
    if let (Some(a), Some(b)) = (value.as_f64(), constant.as_f64()) {
        return a.partial_cmp(&b).is_some_and(|o| op.accepts(o));
    }
    if let (Some(a), Some(b)) = (value.as_date_time(), constant.as_date_time()) {
        return op.accepts(a.cmp(&b));
    }
    if let (Some(a), Some(b)) = (value.as_text(), constant.as_text()) {
        return op.accepts(a.cmp(b));
    }
    match op {
        CompareOp::Eq => value == constant,
        CompareOp::Ne => value != constant,
        _ => false,
    }
}

/// Total order used by ORDER BY: IRIs, then numbers, then date-times, then
/// other literals; ties inside a class fall back to the N-Triples form.
pub fn order_terms(a: &Term, b: &Term) -> Ordering {
    order_by_value(a, b).then_with(|| a.to_ntriples().cmp(&b.to_ntriples()))
}

/// [`order_terms`] without the final N-Triples tie-break.
pub(crate) fn order_by_value(a: &Term, b: &Term) -> Ordering {
    fn class(t: &Term) -> u8 {
        if !t.is_literal() {
            0
        } else if t.as_f64().is_some() {
            1
        } else if t.as_date_time().is_some() {
            2
        } else {
            3
        }
    }
    let by_class = class(a).cmp(&class(b));
    if by_class != Ordering::Equal {
        return by_class;
    }
    match class(a) {
        1 => a
            .as_f64()
            .unwrap()
            .partial_cmp(&b.as_f64().unwrap())
            .unwrap_or(Ordering::Equal),
        2 => a.as_date_time().cmp(&b.as_date_time()),
        _ => Ordering::Equal,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderBy {
    pub var: String,
    pub descending: bool,
}

/// A parsed query of the supported subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    /// Projected variables without the `?`; `SELECT *` expands to every
    /// pattern variable in order of first appearance.
    pub select: Vec<String>,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
    pub order_by: Option<OrderBy>,
    pub limit: Option<usize>,
}

impl Query {
    /// Pattern variables in order of first appearance.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.patterns {
            for t in p.positions() {
                if let Some(v) = t.var() {
                    if !out.iter().any(|o| o == v) {
                        out.push(v.to_string());
                    }
                }
            }
        }
        out
    }
}
