//! In-memory triple store.
//!
//! A [`Graph`] keeps every triple in three nested-map indexes (SPO, POS,
//! OSP). Pattern lookups pick the index whose key order covers the longest
//! prefix of bound positions; results come out in that index's order.

mod closure;
mod iso;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use closure::{instance_of, materialize_subclass_closure, SchemaHierarchy};
pub use iso::isomorphic;
pub use snapshot::{load_snapshot, save_snapshot};

use crate::term::{RdfTerm, Triple};
use crate::vocab::{Iri, PrefixMap};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("malformed triple: {0}")]
    MalformedTriple(String),
    #[error("cyclic class hierarchy through {}", .0.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(", "))]
    CyclicHierarchy(Vec<Iri>),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse failure at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

type Index = BTreeMap<RdfTerm, BTreeMap<RdfTerm, BTreeSet<RdfTerm>>>;

/// Which index serves a lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

impl IndexOrder {
    pub const ALL: [IndexOrder; 3] = [IndexOrder::Spo, IndexOrder::Pos, IndexOrder::Osp];

    /// Index keys as positions into (s, p, o).
    fn positions(self) -> [usize; 3] {
        match self {
            IndexOrder::Spo => [0, 1, 2],
            IndexOrder::Pos => [1, 2, 0],
            IndexOrder::Osp => [2, 0, 1],
        }
    }

    /// Index with the longest bound key prefix for the given pattern.
    fn best_for(bound: [bool; 3]) -> IndexOrder {
        match bound {
            [true, true, _] | [true, false, false] => IndexOrder::Spo,
            [false, true, _] => IndexOrder::Pos,
            [true, false, true] | [false, false, true] => IndexOrder::Osp,
            [false, false, false] => IndexOrder::Spo,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Graph {
    spo: Index,
    pos: Index,
    osp: Index,
    len: usize,
    prefixes: PrefixMap,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.spo == other.spo
    }
}

impl Eq for Graph {}

fn index_insert(index: &mut Index, a: &RdfTerm, b: &RdfTerm, c: &RdfTerm) -> bool {
    index
        .entry(a.clone())
        .or_default()
        .entry(b.clone())
        .or_default()
        .insert(c.clone())
}

fn index_remove(index: &mut Index, a: &RdfTerm, b: &RdfTerm, c: &RdfTerm) -> bool {
    let Some(inner) = index.get_mut(a) else {
        return false;
    };
    let Some(leaf) = inner.get_mut(b) else {
        return false;
    };
    let removed = leaf.remove(c);
    if leaf.is_empty() {
        inner.remove(b);
    }
    if inner.is_empty() {
        index.remove(a);
    }
    removed
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefixes(prefixes: PrefixMap) -> Self {
        Graph {
            prefixes,
            ..Self::default()
        }
    }

    pub fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }

    pub fn prefixes_mut(&mut self) -> &mut PrefixMap {
        &mut self.prefixes
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Adds `t`; returns whether the graph changed.
    pub fn insert(&mut self, t: Triple) -> Result<bool, StoreError> {
        if !t.is_well_formed() {
            return Err(StoreError::MalformedTriple(t.to_string()));
        }
        let Triple {
            subject: s,
            predicate: p,
            object: o,
        } = &t;
        if !index_insert(&mut self.spo, s, p, o) {
            return Ok(false);
        }
        index_insert(&mut self.pos, p, o, s);
        index_insert(&mut self.osp, o, s, p);
        self.len += 1;
        Ok(true)
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> Result<(), StoreError> {
        for t in triples {
            self.insert(t)?;
        }
        Ok(())
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        let (s, p, o) = (&t.subject, &t.predicate, &t.object);
        if !index_remove(&mut self.spo, s, p, o) {
            return false;
        }
        index_remove(&mut self.pos, p, o, s);
        index_remove(&mut self.osp, o, s, p);
        self.len -= 1;
        true
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo
            .get(&t.subject)
            .and_then(|m| m.get(&t.predicate))
            .is_some_and(|leaf| leaf.contains(&t.object))
    }

    /// All triples in SPO order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.scan(IndexOrder::Spo, [None, None, None])
    }

    /// Triples agreeing with every bound position, served by the best index.
    pub fn match_pattern<'a>(
        &'a self,
        s: Option<&'a RdfTerm>,
        p: Option<&'a RdfTerm>,
        o: Option<&'a RdfTerm>,
    ) -> Box<dyn Iterator<Item = Triple> + 'a> {
        let order = IndexOrder::best_for([s.is_some(), p.is_some(), o.is_some()]);
        self.scan(order, [s, p, o])
    }

    /// Same as [`Graph::match_pattern`] but forced through one index.
    pub fn match_with<'a>(
        &'a self,
        order: IndexOrder,
        s: Option<&'a RdfTerm>,
        p: Option<&'a RdfTerm>,
        o: Option<&'a RdfTerm>,
    ) -> Box<dyn Iterator<Item = Triple> + 'a> {
        self.scan(order, [s, p, o])
    }

    fn scan<'a>(
        &'a self,
        order: IndexOrder,
        pattern: [Option<&'a RdfTerm>; 3],
    ) -> Box<dyn Iterator<Item = Triple> + 'a> {
        let index = match order {
            IndexOrder::Spo => &self.spo,
            IndexOrder::Pos => &self.pos,
            IndexOrder::Osp => &self.osp,
        };
        let keys = order.positions();
        let k = [pattern[keys[0]], pattern[keys[1]], pattern[keys[2]]];
        let rebuild = move |a: &RdfTerm, b: &RdfTerm, c: &RdfTerm| {
            let mut spo: [Option<RdfTerm>; 3] = [None, None, None];
            spo[keys[0]] = Some(a.clone());
            spo[keys[1]] = Some(b.clone());
            spo[keys[2]] = Some(c.clone());
            let [s, p, o] = spo;
            Triple {
                subject: s.unwrap(),
                predicate: p.unwrap(),
                object: o.unwrap(),
            }
        };
        let keep = move |term: &RdfTerm, want: Option<&RdfTerm>| want.is_none_or(|w| w == term);
        match (k[0], k[1]) {
            (Some(a), Some(b)) => {
                let leaf = index.get(a).and_then(|m| m.get(b));
                Box::new(
                    leaf.into_iter()
                        .flat_map(|set| set.iter())
                        .filter(move |c| keep(c, k[2]))
                        .map(move |c| rebuild(a, b, c)),
                )
            }
            (Some(a), None) => {
                let inner = index.get(a);
                Box::new(
                    inner
                        .into_iter()
                        .flat_map(|m| m.iter())
                        .flat_map(move |(b, set)| set.iter().map(move |c| (b, c)))
                        .filter(move |(_, c)| keep(c, k[2]))
                        .map(move |(b, c)| rebuild(a, b, c)),
                )
            }
            (None, _) => Box::new(
                index
                    .iter()
                    .flat_map(|(a, m)| m.iter().map(move |(b, set)| (a, b, set)))
                    .filter(move |(_, b, _)| keep(b, k[1]))
                    .flat_map(|(a, b, set)| set.iter().map(move |c| (a, b, c)))
                    .filter(move |(_, _, c)| keep(c, k[2]))
                    .map(move |(a, b, c)| rebuild(a, b, c)),
            ),
        }
    }

    /// Objects of `(subject, predicate, ?)` in index order.
    pub fn objects(&self, subject: &RdfTerm, predicate: &Iri) -> Vec<RdfTerm> {
        let p = RdfTerm::Iri(predicate.clone());
        self.spo
            .get(subject)
            .and_then(|m| m.get(&p))
            .map(|set| set.iter().cloned().collect())
            .unwrap_or_default()
    }

    /// Subjects of `(?, predicate, object)` in index order.
    pub fn subjects(&self, predicate: &Iri, object: &RdfTerm) -> Vec<RdfTerm> {
        let p = RdfTerm::Iri(predicate.clone());
        self.pos
            .get(&p)
            .and_then(|m| m.get(object))
            .map(|set| set.iter().cloned().collect())
            .unwrap_or_default()
    }

    /// All `(subject, object)` pairs for `predicate`.
    pub fn pairs(&self, predicate: &Iri) -> Vec<(RdfTerm, RdfTerm)> {
        let p = RdfTerm::Iri(predicate.clone());
        self.pos
            .get(&p)
            .into_iter()
            .flat_map(|m| m.iter())
            .flat_map(|(o, subjects)| subjects.iter().map(move |s| (s.clone(), o.clone())))
            .collect()
    }

    pub fn has_subject(&self, subject: &RdfTerm) -> bool {
        self.spo.contains_key(subject)
    }

    /// Whether the term occurs in any position.
    pub fn mentions(&self, term: &RdfTerm) -> bool {
        self.spo.contains_key(term) || self.pos.contains_key(term) || self.osp.contains_key(term)
    }

    pub fn blank_labels(&self) -> BTreeSet<String> {
        self.spo
            .keys()
            .chain(self.osp.keys())
            .filter_map(|t| match t {
                RdfTerm::Blank(b) => Some(b.clone()),
                _ => None,
            })
            .collect()
    }

    /// Adds every triple of `other`, renaming its blank nodes where they would
    /// collide with labels already used here. Prefixes not bound here are
    /// copied over.
    pub fn merge(&mut self, other: &Graph) {
        let used = self.blank_labels();
        let mut renames: HashMap<String, String> = HashMap::new();
        let mut counter = 0usize;
        let mut taken: BTreeSet<String> = used.clone();
        taken.extend(other.blank_labels());
        let mut rename = |t: &RdfTerm| -> RdfTerm {
            match t {
                RdfTerm::Blank(b) if used.contains(b) => {
                    let fresh = renames.entry(b.clone()).or_insert_with(|| loop {
                        let candidate = format!("m{counter}");
                        counter += 1;
                        if taken.insert(candidate.clone()) {
                            break candidate;
                        }
                    });
                    RdfTerm::Blank(fresh.clone())
                }
                other => other.clone(),
            }
        };
        for t in other.iter() {
            let renamed = Triple {
                subject: rename(&t.subject),
                predicate: t.predicate,
                object: rename(&t.object),
            };
            // Already well-formed: it came from a graph.
            let _ = self.insert(renamed);
        }
        self.prefixes.extend_missing(&other.prefixes);
    }
}
