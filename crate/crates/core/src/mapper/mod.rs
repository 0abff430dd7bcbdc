//! Lowering typed values to triples and lifting them back.
//!
//! Lifting keeps anything it does not map in the entity's `extras`, computed
//! as the node's concise bounded description minus what lowering the lifted
//! value would produce; lowering writes extras back verbatim.

mod agents;
mod execution;
mod procedure;

use std::collections::BTreeSet;

use serde::Serialize;

pub use agents::{lift_machine, lift_roles, lower_machine, lower_role};
pub use execution::{lift_execution, lower_execution};
pub use procedure::{
    lift_all_procedures, lift_procedure, lift_procedure_with, lower_procedure, ProcedureBundle,
};

use crate::model::{parse_timestamp, OrderError, Timestamp};
use crate::store::Graph;
use crate::term::{Node, RdfTerm, Triple};
use crate::vocab::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("{0} is not a pko:Procedure")]
    NotAProcedure(Iri),
    #[error("{0} is not a pko:ProcedureExecution")]
    NotAnExecution(Iri),
    #[error("{node}: malformed timestamp `{value}`")]
    MalformedTimestamp { node: String, value: String },
    #[error("{node}: missing {field}")]
    MissingField { node: String, field: &'static str },
    #[error("{node}: {message}")]
    Malformed { node: String, message: String },
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Outcome of lifting every candidate entity in a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub lifted: Vec<Iri>,
    pub skipped: Vec<(Iri, String)>,
}

/// Triple sink used by the lowering functions.
pub(crate) struct Emitter {
    pub graph: Graph,
}

impl Emitter {
    pub fn new() -> Self {
        Emitter { graph: Graph::new() }
    }

    pub fn add(&mut self, s: impl Into<RdfTerm>, p: Term, o: impl Into<RdfTerm>) {
        self.add_iri(s, p.iri(), o);
    }

    pub fn add_iri(&mut self, s: impl Into<RdfTerm>, p: Iri, o: impl Into<RdfTerm>) {
        self.graph
            .insert(Triple::new(s, p, o))
            .expect("lowering emits node subjects and IRI predicates");
    }

    pub fn add_opt<O: Into<RdfTerm>>(&mut self, s: &RdfTerm, p: Term, o: Option<O>) {
        if let Some(o) = o {
            self.add(s.clone(), p, o);
        }
    }

    pub fn add_all<'a, O>(&mut self, s: &RdfTerm, p: Term, objects: impl IntoIterator<Item = &'a O>)
    where
        O: Clone + Into<RdfTerm> + 'a,
    {
        for o in objects {
            self.add(s.clone(), p, o.clone());
        }
    }

    pub fn extend(&mut self, triples: &BTreeSet<Triple>) {
        for t in triples {
            let _ = self.graph.insert(t.clone());
        }
    }

    /// Links `items` into a chain with `next` and its inverse `prev`.
    pub fn chain(&mut self, items: &[Iri], next: Term, prev: Term) {
        for pair in items.windows(2) {
            self.add(pair[0].clone(), next, pair[1].clone());
            self.add(pair[1].clone(), prev, pair[0].clone());
        }
    }
}

/// Concise bounded description: triples with `node` as subject, recursing
/// through blank-node objects.
pub fn cbd(graph: &Graph, node: &RdfTerm) -> BTreeSet<Triple> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![node.clone()];
    while let Some(n) = stack.pop() {
        if !seen.insert(n.clone()) {
            continue;
        }
        for t in graph.match_pattern(Some(&n), None, None) {
            if t.object.is_blank() {
                stack.push(t.object.clone());
            }
            out.insert(t);
        }
    }
    out
}

pub(crate) fn extras_of(graph: &Graph, node: &RdfTerm, core: &Graph) -> BTreeSet<Triple> {
    cbd(graph, node)
        .into_iter()
        .filter(|t| !core.contains(t))
        .collect()
}

/// Read helpers over one subject. Single-valued fields take the smallest
/// value; surplus values end up in the extras.
pub(crate) struct Reader<'g> {
    pub graph: &'g Graph,
    pub node: RdfTerm,
}

impl<'g> Reader<'g> {
    pub fn new(graph: &'g Graph, node: impl Into<RdfTerm>) -> Self {
        Reader {
            graph,
            node: node.into(),
        }
    }

    fn label(&self) -> String {
        self.node.to_string()
    }

    pub fn all(&self, p: Term) -> Vec<RdfTerm> {
        self.graph.objects(&self.node, &p.iri())
    }

    pub fn iri(&self, p: Term) -> Option<Iri> {
        self.all(p).into_iter().find_map(|o| o.as_iri().cloned())
    }

    pub fn node(&self, p: Term) -> Option<Node> {
        self.all(p).into_iter().find_map(|o| o.as_node())
    }

    pub fn nodes(&self, p: Term) -> BTreeSet<Node> {
        self.all(p).into_iter().filter_map(|o| o.as_node()).collect()
    }

    pub fn iris(&self, p: Term) -> BTreeSet<Iri> {
        self.all(p).into_iter().filter_map(|o| o.as_iri().cloned()).collect()
    }

    pub fn text(&self, p: Term) -> Option<String> {
        self.all(p)
            .into_iter()
            .find_map(|o| o.as_literal().map(|l| l.lexical().to_string()))
    }

    pub fn required_iri(&self, p: Term, field: &'static str) -> Result<Iri, MapError> {
        self.iri(p).ok_or_else(|| MapError::MissingField {
            node: self.label(),
            field,
        })
    }

    pub fn time(&self, p: Term) -> Result<Option<Timestamp>, MapError> {
        match self.all(p).into_iter().find_map(|o| o.as_literal().cloned()) {
            None => Ok(None),
            Some(l) => parse_timestamp(l.lexical())
                .map(Some)
                .ok_or_else(|| MapError::MalformedTimestamp {
                    node: self.label(),
                    value: l.lexical().to_string(),
                }),
        }
    }

    /// First subject of `(?, p, node)` that is an IRI.
    pub fn inverse_iri(&self, p: Term) -> Option<Iri> {
        self.graph
            .subjects(&p.iri(), &self.node)
            .into_iter()
            .find_map(|s| s.as_iri().cloned())
    }

    pub fn has_type(&self, class: Term) -> bool {
        self.all(crate::vocab::rdf::TYPE)
            .iter()
            .any(|t| t.as_iri().is_some_and(|t| class.is(t)))
    }
}
