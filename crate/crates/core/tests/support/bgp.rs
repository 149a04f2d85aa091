//! Random basic-graph-pattern cases and an exhaustive-enumeration oracle.
//!
//! The oracle walks every assignment of graph triples to patterns (pruning
//! only on inconsistency), applies the filter with its own comparison code,
//! and projects. It shares nothing with the engine beyond `Term`.

use chrono::{DateTime, Utc};
use energykg_core::{Term, Triple};
use energykg_core::vocab::Iri;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const BASE: &str = "http://example.org/energykg/";
const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

#[derive(Clone, Debug)]
pub enum Slot {
    Var(&'static str),
    Const(Term),
}

#[derive(Clone, Copy, Debug)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Op {
    const ALL: [Op; 6] = [Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge];

    fn text(self) -> &'static str {
        match self {
            Op::Eq => "=",
            Op::Ne => "!=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub triples: Vec<Triple>,
    pub patterns: Vec<[Slot; 3]>,
    pub filter: Option<(&'static str, Op, Term)>,
    /// `None` is `SELECT *`.
    pub select: Option<Vec<&'static str>>,
    pub text: String,
}

fn node(i: usize) -> Iri {
    Iri::new(format!("{BASE}n{i}")).unwrap()
}

fn pred(i: usize) -> Iri {
    Iri::new(format!("{BASE}p{i}")).unwrap()
}

fn typed(lexical: &str, local: &str) -> Term {
    Term::typed(lexical, Iri::new(format!("{XSD}{local}")).unwrap()).unwrap()
}

fn object_pool() -> Vec<Term> {
    let mut pool: Vec<Term> = (0..6).map(|i| Term::Iri(node(i))).collect();
    for v in [-3.0, 1.0, 2.5, 10.0, 0.1] {
        pool.push(Term::double(v).unwrap());
    }
    for t in ["2016-01-01T00:00:00Z", "2016-01-02T12:00:00Z", "2015-12-31T23:59:59Z"] {
        pool.push(typed(t, "dateTime"));
    }
    for s in ["a", "b", "ba"] {
        pool.push(Term::plain(s));
    }
    pool.push(typed("2", "integer"));
    pool.push(typed("b", "string"));
    pool
}

const NODE_VARS: [&str; 3] = ["a", "b", "c"];
const PRED_VARS: [&str; 2] = ["p", "q"];

fn render(t: &Term, rng: &mut impl Rng) -> String {
    match t {
        Term::Iri(i) if rng.random_bool(0.5) => format!(":{}", &i.as_str()[BASE.len()..]),
        Term::Typed { lexical, datatype } if rng.random_bool(0.5) => {
            match &datatype.as_str()[XSD.len()..] {
                "integer" => lexical.clone(),
                local => format!("\"{lexical}\"^^xsd:{local}"),
            }
        }
        other => other.to_ntriples(),
    }
}

fn slot_text(s: &Slot, rng: &mut impl Rng) -> String {
    match s {
        Slot::Var(v) => format!("?{v}"),
        Slot::Const(t) => render(t, rng),
    }
}

fn vars_of(patterns: &[[Slot; 3]]) -> Vec<&'static str> {
    let mut out = Vec::new();
    for p in patterns {
        for s in p {
            if let Slot::Var(v) = s {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        }
    }
    out
}

/// Graph of at most `max_triples` triples, 1-3 patterns, at most one filter.
pub fn random_case<R: Rng>(rng: &mut R, max_triples: usize) -> Case {
    let objects = object_pool();
    let n_nodes = rng.random_range(2..=8);
    let n_preds = rng.random_range(1..=4);
    let size = rng.random_range(0..=max_triples);
    let mut triples = Vec::with_capacity(size);
    for _ in 0..size {
        let o = if rng.random_bool(0.4) {
            Term::Iri(node(rng.random_range(0..n_nodes)))
        } else {
            objects.choose(rng).unwrap().clone()
        };
        triples.push(Triple::new(&node(rng.random_range(0..n_nodes)), &pred(rng.random_range(0..n_preds)), o));
    }
    triples.sort_by_key(Triple::to_ntriples);
    triples.dedup();

    // Constants mostly come from the graph so that patterns tend to match.
    let existing = |rng: &mut R, pos: usize| -> Option<Term> {
        let t = triples.choose(rng)?;
        Some(match pos {
            0 => Term::Iri(t.subject.clone()),
            1 => Term::Iri(t.predicate.clone()),
            _ => t.object.clone(),
        })
    };
    let k = rng.random_range(1..=3);
    let mut patterns: Vec<[Slot; 3]> = Vec::new();
    for i in 0..k {
        let node_var = |rng: &mut R| Slot::Var(NODE_VARS.choose(rng).unwrap());
        let pred_var = |rng: &mut R| {
            Slot::Var(if rng.random_bool(0.85) { PRED_VARS.choose(rng).unwrap() } else { NODE_VARS.choose(rng).unwrap() })
        };
        let mut p = [
            if rng.random_bool(0.6) {
                node_var(rng)
            } else if rng.random_bool(0.7) {
                Slot::Const(existing(rng, 0).unwrap_or_else(|| Term::Iri(node(0))))
            } else {
                Slot::Const(Term::Iri(node(rng.random_range(0..n_nodes + 1))))
            },
            if rng.random_bool(0.5) {
                pred_var(rng)
            } else {
                Slot::Const(Term::Iri(pred(rng.random_range(0..n_preds))))
            },
            if rng.random_bool(0.6) {
                node_var(rng)
            } else if rng.random_bool(0.7) {
                Slot::Const(existing(rng, 2).unwrap_or_else(|| objects[0].clone()))
            } else {
                Slot::Const(objects.choose(rng).unwrap().clone())
            },
        ];
        // Keep three-pattern cases joined so result sizes stay bounded.
        let earlier = vars_of(&patterns);
        if k == 3 && i > 0 && !earlier.is_empty() && !vars_of(&[p.clone()]).iter().any(|v| earlier.contains(v)) {
            p[0] = Slot::Var(earlier.choose(rng).unwrap());
        }
        patterns.push(p);
    }

    let vars = vars_of(&patterns);
    let filter = (!vars.is_empty() && rng.random_bool(0.5)).then(|| {
        let constant = if rng.random_bool(0.15) {
            Term::Iri(node(rng.random_range(0..n_nodes)))
        } else {
            objects.choose(rng).unwrap().clone()
        };
        (*vars.choose(rng).unwrap(), *Op::ALL.choose(rng).unwrap(), constant)
    });
    let select = if vars.is_empty() || rng.random_bool(0.3) {
        None
    } else {
        let mut s: Vec<&'static str> = vars.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        if s.is_empty() {
            s.push(vars[0]);
        }
        Some(s)
    };

    let mut text = String::new();
    if rng.random_bool(0.3) {
        text.push_str(&format!("PREFIX : <{BASE}>\n"));
    }
    text.push_str("SELECT ");
    match &select {
        None => text.push('*'),
        Some(s) => text.push_str(&s.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")),
    }
    text.push_str(" WHERE {\n");
    for p in &patterns {
        let parts: Vec<String> = p.iter().map(|s| slot_text(s, rng)).collect();
        text.push_str(&format!("  {} .\n", parts.join(" ")));
    }
    if let Some((v, op, c)) = &filter {
        let c = render(c, rng);
        if rng.random_bool(0.5) {
            text.push_str(&format!("  FILTER(?{v} {} {c})\n", op.text()));
        } else {
            // Same comparison with the operands swapped.
            let flipped = match op {
                Op::Lt => Op::Gt,
                Op::Le => Op::Ge,
                Op::Gt => Op::Lt,
                Op::Ge => Op::Le,
                other => *other,
            };
            text.push_str(&format!("  FILTER({c} {} ?{v})\n", flipped.text()));
        }
    }
    text.push('}');
    Case {
        triples,
        patterns,
        filter,
        select,
        text,
    }
}

fn numeric(t: &Term) -> Option<f64> {
    match t {
        Term::Typed { lexical, datatype } => match datatype.as_str().strip_prefix(XSD) {
            Some("double" | "decimal" | "integer" | "float") => lexical.parse().ok(),
            _ => None,
        },
        _ => None,
    }
}

fn instant(t: &Term) -> Option<DateTime<Utc>> {
    match t {
        Term::Typed { lexical, datatype } if datatype.as_str() == format!("{XSD}dateTime") => {
            DateTime::parse_from_rfc3339(lexical).ok().map(|d| d.with_timezone(&Utc))
        }
        _ => None,
    }
}

fn text(t: &Term) -> Option<&str> {
    match t {
        Term::Plain(s) => Some(s),
        Term::Typed { lexical, datatype } if datatype.as_str() == format!("{XSD}string") => Some(lexical),
        _ => None,
    }
}

pub fn filter_holds(v: &Term, op: Op, c: &Term) -> bool {
    use std::cmp::Ordering;
    let ord: Option<Ordering> = if let (Some(a), Some(b)) = (numeric(v), numeric(c)) {
        a.partial_cmp(&b)
    } else if let (Some(a), Some(b)) = (instant(v), instant(c)) {
        Some(a.cmp(&b))
    } else if let (Some(a), Some(b)) = (text(v), text(c)) {
        Some(a.cmp(b))
    } else {
        return match op {
            Op::Eq => v == c,
            Op::Ne => v != c,
            _ => false,
        };
    };
    let Some(ord) = ord else { return false };
    match op {
        Op::Eq => ord.is_eq(),
        Op::Ne => ord.is_ne(),
        Op::Lt => ord.is_lt(),
        Op::Le => ord.is_le(),
        Op::Gt => ord.is_gt(),
        Op::Ge => ord.is_ge(),
    }
}

/// Rows of the projected solutions, each value in N-Triples form, sorted.
pub fn oracle(case: &Case) -> Vec<Vec<String>> {
    let all = vars_of(&case.patterns);
    let select = case.select.clone().unwrap_or(all);
    let mut rows = Vec::new();
    let mut binding: Vec<(&'static str, Term)> = Vec::new();
    enumerate(case, 0, &mut binding, &select, &mut rows);
    rows.sort();
    rows
}

fn enumerate(
    case: &Case,
    depth: usize,
    binding: &mut Vec<(&'static str, Term)>,
    select: &[&'static str],
    rows: &mut Vec<Vec<String>>,
) {
    if depth == case.patterns.len() {
        let get = |v: &str| binding.iter().find(|(n, _)| *n == v).map(|(_, t)| t).unwrap();
        if let Some((v, op, c)) = &case.filter {
            if !filter_holds(get(v), *op, c) {
                return;
            }
        }
        rows.push(select.iter().map(|v| get(v).to_ntriples()).collect());
        return;
    }
    let pattern = &case.patterns[depth];
    for t in &case.triples {
        let values = [Term::Iri(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()];
        let mark = binding.len();
        let mut ok = true;
        for (slot, value) in pattern.iter().zip(values) {
            match slot {
                Slot::Const(c) => ok &= *c == value,
                Slot::Var(v) => match binding.iter().find(|(n, _)| n == v) {
                    Some((_, bound)) => ok &= *bound == value,
                    None => binding.push((v, value)),
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            enumerate(case, depth + 1, binding, select, rows);
        }
        binding.truncate(mark);
    }
}

/// Result rows of the engine in the same shape as [`oracle`].
pub fn engine_rows(results: &energykg_core::query::QueryResults) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = results
        .rows()
        .iter()
        .map(|r| r.values().iter().map(Term::to_ntriples).collect())
        .collect();
    rows.sort();
    rows
}
