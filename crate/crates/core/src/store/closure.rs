use std::collections::{BTreeMap, BTreeSet};

use super::{Graph, StoreError};
use crate::term::{RdfTerm, Triple};
use crate::vocab::{dcat, pko, pko_ind, pplan, prov, rdf, rdfs, Iri};

/// Subclass and subproperty edges, `(child, parent)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaHierarchy {
    subclass: BTreeSet<(Iri, Iri)>,
    subproperty: BTreeSet<(Iri, Iri)>,
}

impl SchemaHierarchy {
    pub fn new() -> Self {
        Self::default()
    }

    /// The class axioms PKO and its industry module assert or inherit from
    /// the reused ontologies.
    pub fn pko() -> Self {
        let mut h = Self::new();
        for (child, parent) in [
            (pko::PROCEDURE, pplan::PLAN),
            (pko::PROCEDURE, dcat::RESOURCE),
            (pplan::MULTI_STEP, pplan::STEP),
            (pko::PROCEDURE_EXECUTION, prov::ACTIVITY),
            (pko::STEP_EXECUTION, prov::ACTIVITY),
            (prov::ORGANIZATION, prov::AGENT),
            (pko_ind::STANDARD_PADLOCK, pko_ind::PADLOCK),
            (pko_ind::ELECTRICAL_ENERGY, pko_ind::ENERGY_SOURCE),
            (pko_ind::HYDRAULIC_ENERGY, pko_ind::ENERGY_SOURCE),
            (pko_ind::FACTORY, pko_ind::LOCATION),
        ] {
            h.add_subclass(child.iri(), parent.iri());
        }
        h
    }

    /// Edges declared with `rdfs:subClassOf` between IRIs in `graph`.
    pub fn from_graph(graph: &Graph) -> Self {
        let mut h = Self::new();
        for (s, o) in graph.pairs(&rdfs::SUB_CLASS_OF.iri()) {
            if let (RdfTerm::Iri(c), RdfTerm::Iri(p)) = (s, o) {
                h.add_subclass(c, p);
            }
        }
        h
    }

    pub fn add_subclass(&mut self, child: Iri, parent: Iri) {
        self.subclass.insert((child, parent));
    }

    pub fn add_subproperty(&mut self, child: Iri, parent: Iri) {
        self.subproperty.insert((child, parent));
    }

    pub fn merge(&mut self, other: &SchemaHierarchy) {
        self.subclass.extend(other.subclass.iter().cloned());
        self.subproperty.extend(other.subproperty.iter().cloned());
    }

    pub fn subclass_edges(&self) -> impl Iterator<Item = &(Iri, Iri)> {
        self.subclass.iter()
    }

    /// Strict ancestors of every class with at least one parent.
    pub fn ancestors(&self) -> Result<BTreeMap<Iri, BTreeSet<Iri>>, StoreError> {
        let mut parents: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
        for (c, p) in &self.subclass {
            if c != p {
                parents.entry(c).or_default().push(p);
            }
        }
        let mut out = BTreeMap::new();
        for &class in parents.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&Iri> = parents[class].clone();
            while let Some(next) = stack.pop() {
                if next == class {
                    return Err(StoreError::CyclicHierarchy(cycle_members(&parents, class)));
                }
                if seen.insert(next.clone()) {
                    if let Some(ps) = parents.get(next) {
                        stack.extend(ps.iter().copied());
                    }
                }
            }
            out.insert(class.clone(), seen);
        }
        Ok(out)
    }

    /// Reflexive-transitive subclass test; tolerates cycles.
    pub fn entails(&self, child: &Iri, parent: &Iri) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![child];
        while let Some(c) = stack.pop() {
            if c == parent {
                return true;
            }
            if seen.insert(c) {
                stack.extend(self.subclass.iter().filter(|(x, _)| x == c).map(|(_, p)| p));
            }
        }
        false
    }

    /// The class itself plus all its ancestors.
    pub fn superclasses_of(&self, class: &Iri) -> Result<BTreeSet<Iri>, StoreError> {
        let mut all = self.ancestors()?.remove(class).unwrap_or_default();
        all.insert(class.clone());
        Ok(all)
    }
}

fn cycle_members(parents: &BTreeMap<&Iri, Vec<&Iri>>, start: &Iri) -> Vec<Iri> {
    // classes that are both reachable from `start` and reach it back
    let reach = |from: &Iri| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if let Some(ps) = parents.get(n) {
                for p in ps {
                    if seen.insert((*p).clone()) {
                        stack.push(p);
                    }
                }
            }
        }
        seen
    };
    let forward = reach(start);
    let mut members: Vec<Iri> = forward
        .iter()
        .filter(|c| reach(c).contains(start))
        .cloned()
        .collect();
    if !members.contains(start) {
        members.push(start.clone());
    }
    members.sort();
    members
}

/// Whether `node` has a type that is `class` or one of its subclasses.
pub fn instance_of(graph: &Graph, node: &RdfTerm, class: &Iri, schema: &SchemaHierarchy) -> bool {
    graph
        .objects(node, &rdf::TYPE.iri())
        .iter()
        .filter_map(|t| t.as_iri())
        .any(|t| schema.entails(t, class))
}

/// Returns a copy of `graph` where every `x rdf:type C` is accompanied by
/// `x rdf:type D` for each ancestor `D` of `C`.
pub fn materialize_subclass_closure(
    graph: &Graph,
    schema: &SchemaHierarchy,
) -> Result<Graph, StoreError> {
    let ancestors = schema.ancestors()?;
    let mut out = graph.clone();
    let type_iri = rdf::TYPE.iri();
    let type_term = RdfTerm::Iri(type_iri.clone());
    let mut inferred = Vec::new();
    for (subject, class) in graph.pairs(&type_iri) {
        if let RdfTerm::Iri(c) = &class {
            for parent in ancestors.get(c).into_iter().flatten() {
                inferred.push(Triple {
                    subject: subject.clone(),
                    predicate: type_term.clone(),
                    object: RdfTerm::Iri(parent.clone()),
                });
            }
        }
    }
    out.extend(inferred)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://e/{s}")).unwrap()
    }

    #[test]
    fn procedure_gains_plan_and_resource() {
        let mut g = Graph::new();
        let x = RdfTerm::Iri(iri("x"));
        g.insert(Triple::new(x.clone(), rdf::TYPE.iri(), pko::PROCEDURE.iri()))
            .unwrap();
        let closed = materialize_subclass_closure(&g, &SchemaHierarchy::pko()).unwrap();
        let types = closed.objects(&x, &rdf::TYPE.iri());
        assert!(types.contains(&RdfTerm::Iri(pplan::PLAN.iri())));
        assert!(types.contains(&RdfTerm::Iri(dcat::RESOURCE.iri())));
        assert_eq!(types.len(), 3);
    }

    #[test]
    fn empty_graph_stays_empty() {
        let closed = materialize_subclass_closure(&Graph::new(), &SchemaHierarchy::pko()).unwrap();
        assert!(closed.is_empty());
    }

    #[test]
    fn transitive_chain() {
        let mut h = SchemaHierarchy::new();
        h.add_subclass(iri("a"), iri("b"));
        h.add_subclass(iri("b"), iri("c"));
        h.add_subclass(iri("c"), iri("c"));
        let anc = h.ancestors().unwrap();
        assert_eq!(anc[&iri("a")], [iri("b"), iri("c")].into_iter().collect());
    }

    #[test]
    fn cycle_detected() {
        let mut h = SchemaHierarchy::new();
        h.add_subclass(iri("a"), iri("b"));
        h.add_subclass(iri("b"), iri("c"));
        h.add_subclass(iri("c"), iri("a"));
        h.add_subclass(iri("d"), iri("a"));
        match h.ancestors() {
            Err(StoreError::CyclicHierarchy(members)) => {
                assert_eq!(members, vec![iri("a"), iri("b"), iri("c")]);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }
}
