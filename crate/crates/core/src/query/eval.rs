use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::ast::{order_by_value, Filter, PatternTerm, Query};
use super::results::{QueryResults, SolutionRow};
use crate::exec::Parallelism;
use crate::rdf::{FrozenGraph, TermId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Const(TermId),
    Var(usize),
}

struct Step {
    slots: [Slot; 3],
    /// Filters (by index into `Plan::filters`) that become checkable after this step.
    filters: Vec<usize>,
}

struct Plan {
    steps: Vec<Step>,
    filters: Vec<(usize, Filter)>,
}

type Binding = Vec<Option<TermId>>;

/// Orders patterns greedily: at each step prefer the pattern with the most
/// positions already fixed (constants or bound variables), then the one with
/// the fewest expected matches per partial solution. That estimate is the
/// number of triples matching the constants divided by the number of distinct
/// values at each bound-variable position.
fn plan(g: &FrozenGraph, q: &Query, vars: &[String]) -> Option<Plan> {
    let var_index = |name: &str| vars.iter().position(|v| v == name).expect("pattern variable");
    let mut pending: Vec<(usize, [Slot; 3])> = Vec::with_capacity(q.patterns.len());
    for (i, p) in q.patterns.iter().enumerate() {
        let mut slots = [Slot::Const(0); 3];
        for (slot, t) in slots.iter_mut().zip(p.positions()) {
            *slot = match t {
                PatternTerm::Var(v) => Slot::Var(var_index(v)),
                // A constant absent from the graph matches nothing.
                PatternTerm::Const(c) => Slot::Const(g.id_of(c)?),
            };
        }
        pending.push((i, slots));
    }

    let filters: Vec<(usize, Filter)> = q
        .filters
        .iter()
        .map(|f| (var_index(&f.var), f.clone()))
        .collect();
    let consts = |slots: &[Slot; 3]| {
        slots.map(|s| match s {
            Slot::Const(id) => Some(id),
            Slot::Var(_) => None,
        })
    };
    let counts: Vec<usize> = pending
        .iter()
        .map(|(_, slots)| {
            let ids = consts(slots);
            g.count_ids(ids[0], ids[1], ids[2])
        })
        .collect();
    // Distinct values per (pattern, position), filled in on first use.
    let mut distinct: HashMap<(usize, usize), usize> = HashMap::new();
    let mut bound = vec![false; vars.len()];
    let mut filter_done = vec![false; filters.len()];
    let mut steps = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let mut best: Option<(usize, usize, f64)> = None;
        for (at, (i, slots)) in pending.iter().enumerate() {
            let mut fixed = 0;
            let mut estimate = counts[*i] as f64;
            for (pos, s) in slots.iter().enumerate() {
                match s {
                    Slot::Const(_) => fixed += 1,
                    Slot::Var(v) if bound[*v] => {
                        fixed += 1;
                        let d = *distinct.entry((*i, pos)).or_insert_with(|| {
                            let ids = consts(slots);
                            g.match_ids(ids[0], ids[1], ids[2])
                                .map(|k| k[pos])
                                .collect::<HashSet<_>>()
                                .len()
                        });
                        estimate /= d.max(1) as f64;
                    }
                    Slot::Var(_) => {}
                }
            }
            let better = match best {
                None => true,
                Some((_, f, e)) => fixed > f || (fixed == f && estimate < e),
            };
            if better {
                best = Some((at, fixed, estimate));
            }
        }
        let (_, slots) = pending.remove(best.expect("non-empty").0);
        for s in slots {
            if let Slot::Var(v) = s {
                bound[v] = true;
            }
        }
        let mut ready = Vec::new();
        for (i, (v, _)) in filters.iter().enumerate() {
            if !filter_done[i] && bound[*v] {
                filter_done[i] = true;
                ready.push(i);
            }
        }
        steps.push(Step { slots, filters: ready });
    }
    Some(Plan { steps, filters })
}

fn extend(g: &FrozenGraph, plan: &Plan, step: &Step, b: &Binding) -> Vec<Binding> {
    let fixed = step.slots.map(|s| match s {
        Slot::Const(id) => Some(id),
        Slot::Var(v) => b[v],
    });
    let mut out = Vec::new();
    'triples: for key in g.match_ids(fixed[0], fixed[1], fixed[2]) {
        let mut next = b.clone();
        for (slot, id) in step.slots.iter().zip(key) {
            if let Slot::Var(v) = slot {
                match next[*v] {
                    Some(prev) if prev != id => continue 'triples,
                    _ => next[*v] = Some(id),
                }
            }
        }
        for &f in &step.filters {
            let (v, filter) = &plan.filters[f];
            if !filter.holds(g.term(next[*v].expect("bound before filtering"))) {
                continue 'triples;
            }
        }
        out.push(next);
    }
    out
}

pub fn evaluate(g: &FrozenGraph, q: &Query) -> QueryResults {
    evaluate_with(g, q, Parallelism::default())
}

/// Evaluates a basic graph pattern with filters over a frozen graph.
///
/// Without ORDER BY, rows come out in N-Triples order of the projected
/// values, so the output does not depend on the join order chosen.
pub fn evaluate_with(g: &FrozenGraph, q: &Query, par: Parallelism) -> QueryResults {
    let vars = q.pattern_vars();
    let select: Arc<[String]> = q.select.iter().cloned().collect();
    let empty = QueryResults::new(select.clone(), Vec::new());
    let Some(plan) = plan(g, q, &vars) else {
        return empty;
    };

    let mut solutions: Vec<Binding> = vec![vec![None; vars.len()]];
    for step in &plan.steps {
        solutions = par.flat_map(&solutions, |b| extend(g, &plan, step, b));
        if solutions.is_empty() {
            return empty;
        }
    }

    let mut cols: Vec<usize> = q
        .select
        .iter()
        .map(|s| vars.iter().position(|v| v == s).expect("validated select variable"))
        .collect();
    let width = cols.len();
    // The ordering variable may be unprojected; carry it as an extra column.
    let order_col = q.order_by.as_ref().map(|o| {
        let v = vars.iter().position(|v| *v == o.var).expect("validated order variable");
        cols.iter().position(|c| *c == v).unwrap_or_else(|| {
            cols.push(v);
            cols.len() - 1
        })
    });
    let mut rows: Vec<Vec<TermId>> = solutions
        .into_iter()
        .map(|b| cols.iter().map(|c| b[*c].expect("all pattern variables bound")).collect())
        .collect();

    // Term ids are ranks in N-Triples order, so comparing id vectors is the
    // serialized full-row comparison.
    match (&q.order_by, order_col) {
        (Some(o), Some(k)) => rows.sort_by(|a, b| {
            let ord = order_by_value(g.term(a[k]), g.term(b[k])).then(a[k].cmp(&b[k]));
            let ord = if o.descending { ord.reverse() } else { ord };
            ord.then_with(|| a[..width].cmp(&b[..width]))
                .then_with(|| a.cmp(b))
        }),
        _ => par.sort_unstable(&mut rows),
    }
    if let Some(n) = q.limit {
        rows.truncate(n);
    }
    let rows = rows
        .into_iter()
        .map(|r| SolutionRow::new(select.clone(), r[..width].iter().map(|id| g.term(*id).clone()).collect()))
        .collect();
    QueryResults::new(select, rows)
}
