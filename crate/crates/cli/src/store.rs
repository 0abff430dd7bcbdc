//! The graph behind `ingest` and `serve`: every mutation is validated as a
//! whole before it replaces the current graph, and the snapshot is written
//! before the new graph becomes visible.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use pk_forge::mapper::cbd;
use pk_forge::model::version_chain;
use pk_forge::store::{instance_of, load_snapshot, save_snapshot, Graph, SchemaHierarchy, StoreError};
use pk_forge::term::{RdfTerm, Triple};
use pk_forge::validate::{builtin_rules, validate, ValidationReport};
use pk_forge::vocab::{pko, Iri};

#[derive(Debug, thiserror::Error)]
pub enum CommitError {
    #[error("the change does not conform")]
    Rejected(ValidationReport),
    #[error("cannot persist snapshot: {0}")]
    Persist(#[from] StoreError),
}

#[derive(Debug)]
pub struct Store {
    graph: Graph,
    path: Option<PathBuf>,
}

impl Store {
    pub fn in_memory(graph: Graph) -> Self {
        Store { graph, path: None }
    }

    /// Opens the snapshot at `path`; a missing file is a fresh, empty store.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let graph = if path.exists() { load_snapshot(&path)? } else { Graph::new() };
        Ok(Store {
            graph,
            path: Some(path),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Replaces the graph with `candidate` if it conforms.
    pub fn commit(&mut self, candidate: Graph) -> Result<ValidationReport, CommitError> {
        let report = validate(&candidate, &builtin_rules());
        if !report.conforms {
            return Err(CommitError::Rejected(report));
        }
        if let Some(path) = &self.path {
            save_snapshot(&candidate, path)?;
        }
        self.graph = candidate;
        Ok(report)
    }

    pub fn is_procedure(&self, id: &Iri) -> bool {
        let mut schema = SchemaHierarchy::pko();
        schema.merge(&SchemaHierarchy::from_graph(&self.graph));
        instance_of(&self.graph, &RdfTerm::Iri(id.clone()), &pko::PROCEDURE.iri(), &schema)
    }

    /// Procedures in IRI order.
    pub fn procedures(&self) -> Vec<Iri> {
        let mut schema = SchemaHierarchy::pko();
        schema.merge(&SchemaHierarchy::from_graph(&self.graph));
        let class = pko::PROCEDURE.iri();
        let subjects: BTreeSet<Iri> = self
            .graph
            .iter()
            .filter_map(|t| t.subject.as_iri().cloned())
            .collect();
        subjects
            .into_iter()
            .filter(|s| instance_of(&self.graph, &RdfTerm::Iri(s.clone()), &class, &schema))
            .collect()
    }

    /// Latest version of `abstract_procedure`, if it has any.
    pub fn latest_version(&self, abstract_procedure: &Iri) -> Option<Iri> {
        version_chain(&self.graph, abstract_procedure).ok()?.pop()
    }
}

/// The triples that make up procedure `id`: its own description and that
/// of every blank node or `{id}/…` IRI reachable from it. Executions point
/// at the procedure rather than the reverse, so they are not included.
pub fn procedure_triples(g: &Graph, id: &Iri) -> BTreeSet<Triple> {
    let owned = format!("{id}/");
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![RdfTerm::Iri(id.clone())];
    while let Some(n) = stack.pop() {
        if !seen.insert(n.clone()) {
            continue;
        }
        for t in cbd(g, &n) {
            if let RdfTerm::Iri(o) = &t.object {
                if o.as_str().starts_with(&owned) {
                    stack.push(t.object.clone());
                }
            }
            out.insert(t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pk_forge::fixtures::{self, ex};

    #[test]
    fn procedure_triples_exclude_executions() {
        let g = fixtures::loto();
        let ts = procedure_triples(&g, &ex(fixtures::loto::PROCEDURE));
        assert!(ts.iter().any(|t| t.subject == RdfTerm::Iri(ex(fixtures::loto::STEP_4))));
        assert!(ts.iter().all(|t| !t.subject.to_string().contains("/execution/")));
        // the padlock is a blank node below Step/4
        assert!(ts.iter().any(|t| t.subject.is_blank()));
    }

    #[test]
    fn rejected_commit_keeps_the_old_graph() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.nt");
        let mut s = Store::open(&path).unwrap();
        assert!(s.graph().is_empty());
        s.commit(fixtures::loto()).unwrap();
        assert!(path.exists());

        let mut bad = fixtures::loto();
        let step = |n| RdfTerm::Iri(ex(&format!("LOTO-condenser-MSK/Step/{n}")));
        bad.insert(Triple::new(step(5), pko::NEXT_STEP.iri(), step(1))).unwrap();
        match s.commit(bad) {
            Err(CommitError::Rejected(r)) => assert_eq!(r.rule_ids(), ["R01"]),
            other => panic!("{other:?}"),
        }
        assert_eq!(Store::open(&path).unwrap().graph(), &fixtures::loto());
        assert_eq!(s.procedures(), [ex(fixtures::loto::PROCEDURE)]);
    }
}
