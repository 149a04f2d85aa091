use std::collections::BTreeSet;
use std::ops::Bound;

use rustc_hash::FxHashMap as HashMap;
use thiserror::Error;

use super::{Term, Triple};
use crate::exec::Parallelism;
use crate::vocab::Iri;

pub type TermId = u32;

type Key = [TermId; 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("index audit failed: {0}")]
pub struct IndexAuditError(pub String);

/// Which permutation a stored key uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Order {
    Spo,
    Pos,
    Osp,
}

impl Order {
    fn to_spo(self, k: Key) -> Key {
        match self {
            Order::Spo => k,
            Order::Pos => [k[2], k[0], k[1]],
            Order::Osp => [k[1], k[2], k[0]],
        }
    }

    fn permute(self, k: Key) -> Key {
        match self {
            Order::Spo => k,
            Order::Pos => [k[1], k[2], k[0]],
            Order::Osp => [k[2], k[0], k[1]],
        }
    }

    /// Index and key prefix serving a pattern with the given bound positions.
    fn plan(s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> (Order, Vec<TermId>) {
        match (s, p, o) {
            (None, None, None) => (Order::Spo, vec![]),
            (Some(s), None, None) => (Order::Spo, vec![s]),
            (Some(s), Some(p), None) => (Order::Spo, vec![s, p]),
            (Some(s), Some(p), Some(o)) => (Order::Spo, vec![s, p, o]),
            (None, Some(p), None) => (Order::Pos, vec![p]),
            (None, Some(p), Some(o)) => (Order::Pos, vec![p, o]),
            (None, None, Some(o)) => (Order::Osp, vec![o]),
            (Some(s), None, Some(o)) => (Order::Osp, vec![o, s]),
        }
    }
}

fn prefix_bounds(prefix: &[TermId]) -> (Key, Key) {
    let mut lo = [TermId::MIN; 3];
    let mut hi = [TermId::MAX; 3];
    lo[..prefix.len()].copy_from_slice(prefix);
    hi[..prefix.len()].copy_from_slice(prefix);
    (lo, hi)
}

/// Mutable triple set with subject-, predicate- and object-first indexes.
///
/// Terms are interned; ids follow insertion order. Call [`Graph::freeze`] once
/// loading is done to get the read-only [`FrozenGraph`] used by queries.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: BTreeSet<Key>,
    pos: BTreeSet<Key>,
    osp: BTreeSet<Key>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn intern(&mut self, t: Term) -> TermId {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    fn id_of(&self, t: &Term) -> Option<TermId> {
        self.ids.get(t).copied()
    }

    fn id_of_iri(&self, i: &Iri) -> Option<TermId> {
        self.ids.get(&Term::Iri(i.clone())).copied()
    }

    /// Returns true when the triple was not present before.
    pub fn insert(&mut self, t: Triple) -> bool {
        let s = self.intern(Term::Iri(t.subject));
        let p = self.intern(Term::Iri(t.predicate));
        let o = self.intern(t.object);
        let fresh = self.spo.insert([s, p, o]);
        if fresh {
            self.pos.insert([p, o, s]);
            self.osp.insert([o, s, p]);
        }
        fresh
    }

    pub fn contains(&self, t: &Triple) -> bool {
        match (self.id_of_iri(&t.subject), self.id_of_iri(&t.predicate), self.id_of(&t.object)) {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&[s, p, o]),
            _ => false,
        }
    }

    /// Set union; `other` is consumed.
    pub fn merge(&mut self, other: Graph) {
        let Graph { terms, spo, .. } = other;
        let remap: Vec<TermId> = terms.into_iter().map(|t| self.intern(t)).collect();
        for k in spo {
            let [s, p, o] = k.map(|id| remap[id as usize]);
            if self.spo.insert([s, p, o]) {
                self.pos.insert([p, o, s]);
                self.osp.insert([o, s, p]);
            }
        }
    }

    fn decode(&self, k: Key) -> Triple {
        let iri = |id: TermId| match &self.terms[id as usize] {
            Term::Iri(i) => i.clone(),
            other => unreachable!("literal {other:?} in subject or predicate position"),
        };
        Triple {
            subject: iri(k[0]),
            predicate: iri(k[1]),
            object: self.terms[k[2] as usize].clone(),
        }
    }

    /// Sorts spo keys by the N-Triples form of their terms.
    fn sort_canonical(&self, keys: &mut [Key]) {
        let mut rank: HashMap<TermId, usize> = HashMap::default();
        let mut used: Vec<TermId> = keys.iter().flatten().copied().collect();
        used.sort_unstable();
        used.dedup();
        let mut by_text: Vec<(String, TermId)> = used
            .into_iter()
            .map(|id| (self.terms[id as usize].to_ntriples(), id))
            .collect();
        by_text.sort_unstable();
        for (r, (_, id)) in by_text.into_iter().enumerate() {
            rank.insert(id, r);
        }
        keys.sort_unstable_by_key(|k| [rank[&k[0]], rank[&k[1]], rank[&k[2]]]);
    }

    /// Triples agreeing with every bound position, in canonical order.
    pub fn match_pattern(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        let lookup = |bound: Option<Option<TermId>>| match bound {
            None => Ok(None),
            Some(Some(id)) => Ok(Some(id)),
            Some(None) => Err(()),
        };
        let (Ok(s), Ok(p), Ok(o)) = (
            lookup(s.map(|i| self.id_of_iri(i))),
            lookup(p.map(|i| self.id_of_iri(i))),
            lookup(o.map(|t| self.id_of(t))),
        ) else {
            return Vec::new();
        };
        let (order, prefix) = Order::plan(s, p, o);
        let (lo, hi) = prefix_bounds(&prefix);
        let index = match order {
            Order::Spo => &self.spo,
            Order::Pos => &self.pos,
            Order::Osp => &self.osp,
        };
        let mut keys: Vec<Key> = index
            .range((Bound::Included(lo), Bound::Included(hi)))
            .map(|k| order.to_spo(*k))
            .collect();
        self.sort_canonical(&mut keys);
        keys.into_iter().map(|k| self.decode(k)).collect()
    }

    /// All triples in canonical order.
    pub fn triples(&self) -> Vec<Triple> {
        self.match_pattern(None, None, None)
    }

    pub fn into_triples(self) -> Vec<Triple> {
        self.triples()
    }

    /// Full re-scan: each permutation index must hold exactly the triple set.
    pub fn audit_indexes(&self) -> Result<(), IndexAuditError> {
        audit(
            self.spo.iter().copied(),
            self.pos.iter().copied(),
            self.osp.iter().copied(),
            self.spo.len(),
            self.pos.len(),
            self.osp.len(),
            |k| self.spo.contains(&k),
        )
    }

    pub fn freeze(self) -> FrozenGraph {
        self.freeze_with(Parallelism::default())
    }

    /// Renumbers terms in N-Triples order and packs the indexes into sorted vectors.
    pub fn freeze_with(self, par: Parallelism) -> FrozenGraph {
        let Graph { terms, spo, .. } = self;
        let mut order: Vec<(String, TermId)> =
            par.map(&terms.iter().enumerate().collect::<Vec<_>>(), |(i, t)| {
                (t.to_ntriples(), *i as TermId)
            });
        par.sort_unstable(&mut order);
        let mut remap = vec![0 as TermId; terms.len()];
        for (new, (_, old)) in order.iter().enumerate() {
            remap[*old as usize] = new as TermId;
        }
        let mut slots: Vec<Option<Term>> = terms.into_iter().map(Some).collect();
        let sorted_terms: Vec<Term> = order
            .iter()
            .map(|(_, old)| slots[*old as usize].take().expect("each term once"))
            .collect();
        let spo_keys: Vec<Key> = spo
            .into_iter()
            .map(|k| [remap[k[0] as usize], remap[k[1] as usize], remap[k[2] as usize]])
            .collect();
        FrozenGraph::from_parts(sorted_terms, spo_keys, par)
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        for t in iter {
            self.insert(t);
        }
    }
}

fn audit(
    spo: impl Iterator<Item = Key>,
    pos: impl Iterator<Item = Key>,
    osp: impl Iterator<Item = Key>,
    n_spo: usize,
    n_pos: usize,
    n_osp: usize,
    in_set: impl Fn(Key) -> bool,
) -> Result<(), IndexAuditError> {
    if n_spo != n_pos || n_spo != n_osp {
        return Err(IndexAuditError(format!(
            "index sizes differ: spo={n_spo} pos={n_pos} osp={n_osp}"
        )));
    }
    let spo: Vec<Key> = spo.collect();
    let mut from_pos: Vec<Key> = pos.map(|k| Order::Pos.to_spo(k)).collect();
    let mut from_osp: Vec<Key> = osp.map(|k| Order::Osp.to_spo(k)).collect();
    from_pos.sort_unstable();
    from_osp.sort_unstable();
    let mut sorted_spo = spo.clone();
    sorted_spo.sort_unstable();
    if from_pos != sorted_spo {
        return Err(IndexAuditError("predicate-first index disagrees with the triple set".into()));
    }
    if from_osp != sorted_spo {
        return Err(IndexAuditError("object-first index disagrees with the triple set".into()));
    }
    if let Some(k) = spo.into_iter().find(|k| !in_set(*k)) {
        return Err(IndexAuditError(format!("key {k:?} missing from the triple set")));
    }
    Ok(())
}

/// Read-only graph. Term ids are ranks in N-Triples order, so the
/// subject-first index is already in canonical triple order.
#[derive(Clone, Debug, Default)]
pub struct FrozenGraph {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    spo: Vec<Key>,
    pos: Vec<Key>,
    osp: Vec<Key>,
}

impl FrozenGraph {
    fn from_parts(terms: Vec<Term>, mut spo: Vec<Key>, par: Parallelism) -> FrozenGraph {
        par.sort_unstable(&mut spo);
        let mut pos: Vec<Key> = spo.iter().map(|k| Order::Pos.permute(*k)).collect();
        let mut osp: Vec<Key> = spo.iter().map(|k| Order::Osp.permute(*k)).collect();
        par.sort_unstable(&mut pos);
        par.sort_unstable(&mut osp);
        let ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TermId))
            .collect();
        FrozenGraph {
            terms,
            ids,
            spo,
            pos,
            osp,
        }
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn id_of(&self, t: &Term) -> Option<TermId> {
        self.ids.get(t).copied()
    }

    fn slice(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> (Order, &[Key]) {
        let (order, prefix) = Order::plan(s, p, o);
        let keys = match order {
            Order::Spo => &self.spo,
            Order::Pos => &self.pos,
            Order::Osp => &self.osp,
        };
        let n = prefix.len();
        let lo = keys.partition_point(|k| k[..n] < prefix[..]);
        let hi = keys.partition_point(|k| k[..n] <= prefix[..]);
        (order, &keys[lo..hi])
    }

    /// Number of triples matching the bound ids; O(log n).
    pub fn count_ids(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        self.slice(s, p, o).1.len()
    }

    /// Matching triples as `[s, p, o]` id keys, in index order.
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> impl Iterator<Item = [TermId; 3]> + '_ {
        let (order, keys) = self.slice(s, p, o);
        keys.iter().map(move |k| order.to_spo(*k))
    }

    fn decode(&self, k: Key) -> Triple {
        let iri = |id: TermId| match &self.terms[id as usize] {
            Term::Iri(i) => i.clone(),
            other => unreachable!("literal {other:?} in subject or predicate position"),
        };
        Triple {
            subject: iri(k[0]),
            predicate: iri(k[1]),
            object: self.terms[k[2] as usize].clone(),
        }
    }

    pub fn match_pattern(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        let resolve = |t: Option<Term>| match t {
            None => Some(None),
            Some(t) => self.id_of(&t).map(Some),
        };
        let (Some(s), Some(p), Some(o)) = (
            resolve(s.map(|i| Term::Iri(i.clone()))),
            resolve(p.map(|i| Term::Iri(i.clone()))),
            resolve(o.cloned()),
        ) else {
            return Vec::new();
        };
        let mut keys: Vec<Key> = self.match_ids(s, p, o).collect();
        keys.sort_unstable();
        keys.into_iter().map(|k| self.decode(k)).collect()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        !self
            .match_pattern(Some(&t.subject), Some(&t.predicate), Some(&t.object))
            .is_empty()
    }

    /// All triples in canonical order.
    pub fn triples(&self) -> Vec<Triple> {
        self.spo.iter().map(|k| self.decode(*k)).collect()
    }

    pub fn audit_indexes(&self) -> Result<(), IndexAuditError> {
        let mut sorted = self.spo.windows(2).all(|w| w[0] < w[1]);
        sorted &= self.pos.windows(2).all(|w| w[0] < w[1]);
        sorted &= self.osp.windows(2).all(|w| w[0] < w[1]);
        if !sorted {
            return Err(IndexAuditError("index vectors are not strictly sorted".into()));
        }
        audit(
            self.spo.iter().copied(),
            self.pos.iter().copied(),
            self.osp.iter().copied(),
            self.spo.len(),
            self.pos.len(),
            self.osp.len(),
            |k| self.spo.binary_search(&k).is_ok(),
        )
    }

    /// Back to a mutable graph.
    pub fn thaw(&self) -> Graph {
        self.triples().into_iter().collect()
    }
}
