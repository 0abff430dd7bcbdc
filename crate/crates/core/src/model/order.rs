use std::collections::{BTreeMap, BTreeSet};

use crate::store::Graph;
use crate::term::RdfTerm;
use crate::vocab::{pko, pplan, rdf, Iri};

/// How step order is derived from `nextStep` links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderMode {
    /// Children must form exactly one chain.
    #[default]
    Strict,
    /// Any DAG; ties between ready steps are broken by IRI byte order.
    Partial,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("ordering cycle through {}", join(.0))]
    Cyclic(Vec<Iri>),
    #[error("{0} has more than one successor or predecessor")]
    Branching(Iri),
    #[error("order splits into separate chains starting at {}", join(.0))]
    Disconnected(Vec<Iri>),
    #[error("expertise level {0} does not occur in the graph")]
    UnknownLevel(Iri),
}

fn join(items: &[Iri]) -> String {
    items.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(", ")
}

/// Orders `members` along `edges` (pairs outside `members` are ignored).
pub(crate) fn linear_order(
    members: &BTreeSet<Iri>,
    edges: &BTreeSet<(Iri, Iri)>,
    mode: OrderMode,
) -> Result<Vec<Iri>, OrderError> {
    let mut succ: BTreeMap<&Iri, BTreeSet<&Iri>> = BTreeMap::new();
    let mut pred: BTreeMap<&Iri, BTreeSet<&Iri>> = BTreeMap::new();
    for (a, b) in edges {
        if members.contains(a) && members.contains(b) {
            succ.entry(a).or_default().insert(b);
            pred.entry(b).or_default().insert(a);
        }
    }
    let degree = |m: &BTreeMap<&Iri, BTreeSet<&Iri>>, n: &Iri| m.get(n).map_or(0, |s| s.len());

    match mode {
        OrderMode::Partial => {
            let mut indegree: BTreeMap<&Iri, usize> =
                members.iter().map(|m| (m, degree(&pred, m))).collect();
            let mut ready: BTreeSet<&Iri> = indegree
                .iter()
                .filter(|(_, d)| **d == 0)
                .map(|(m, _)| *m)
                .collect();
            let mut out = Vec::with_capacity(members.len());
            while let Some(next) = ready.pop_first() {
                out.push(next.clone());
                for s in succ.get(next).into_iter().flatten() {
                    let d = indegree.get_mut(s).unwrap();
                    *d -= 1;
                    if *d == 0 {
                        ready.insert(s);
                    }
                }
            }
            if out.len() < members.len() {
                let placed: BTreeSet<&Iri> = out.iter().collect();
                let rest = members.iter().filter(|m| !placed.contains(m)).cloned().collect();
                return Err(OrderError::Cyclic(rest));
            }
            Ok(out)
        }
        OrderMode::Strict => {
            for m in members {
                if degree(&succ, m) > 1 || degree(&pred, m) > 1 {
                    return Err(OrderError::Branching(m.clone()));
                }
            }
            let heads: Vec<&Iri> = members.iter().filter(|m| degree(&pred, m) == 0).collect();
            let mut out = Vec::with_capacity(members.len());
            for head in &heads {
                let mut cur = Some(*head);
                while let Some(n) = cur {
                    out.push(n.clone());
                    cur = succ.get(n).and_then(|s| s.first().copied());
                }
            }
            if out.len() < members.len() {
                // in-/out-degree ≤ 1, so every unplaced member lies on a cycle
                let placed: BTreeSet<&Iri> = out.iter().collect();
                let start = members.iter().find(|m| !placed.contains(m)).unwrap();
                let mut cycle = vec![start.clone()];
                let mut cur = succ[start].first().copied().unwrap();
                while cur != start {
                    cycle.push(cur.clone());
                    cur = succ[cur].first().copied().unwrap();
                }
                cycle.sort();
                return Err(OrderError::Cyclic(cycle));
            }
            if heads.len() > 1 {
                return Err(OrderError::Disconnected(heads.into_iter().cloned().collect()));
            }
            Ok(out)
        }
    }
}

fn iri_objects(graph: &Graph, subject: &Iri, predicate: &Iri) -> BTreeSet<Iri> {
    graph
        .objects(&RdfTerm::Iri(subject.clone()), predicate)
        .into_iter()
        .filter_map(|o| o.as_iri().cloned())
        .collect()
}

/// `forward` links plus reversed `inverse` links between IRIs.
fn chain_edges(graph: &Graph, forward: &Iri, inverse: &Iri) -> BTreeSet<(Iri, Iri)> {
    let mut edges = BTreeSet::new();
    for (s, o) in graph.pairs(forward) {
        if let (RdfTerm::Iri(a), RdfTerm::Iri(b)) = (s, o) {
            edges.insert((a, b));
        }
    }
    for (s, o) in graph.pairs(inverse) {
        if let (RdfTerm::Iri(a), RdfTerm::Iri(b)) = (s, o) {
            edges.insert((b, a));
        }
    }
    edges
}

/// Direct children of a procedure or multistep, in `nextStep` order.
pub fn order_steps(graph: &Graph, container: &Iri, mode: OrderMode) -> Result<Vec<Iri>, OrderError> {
    let children = iri_objects(graph, container, &pko::HAS_STEP.iri());
    let edges = chain_edges(graph, &pko::NEXT_STEP.iri(), &pko::PREVIOUS_STEP.iri());
    linear_order(&children, &edges, mode)
}

/// Versions of an abstract procedure, oldest first.
pub fn version_chain(graph: &Graph, abstract_procedure: &Iri) -> Result<Vec<Iri>, OrderError> {
    let versions = iri_objects(graph, abstract_procedure, &pko::HAS_VERSION.iri());
    let edges = chain_edges(graph, &pko::NEXT_VERSION.iri(), &pko::PREVIOUS_VERSION.iri());
    linear_order(&versions, &edges, OrderMode::Strict)
}

fn is_multistep(graph: &Graph, step: &Iri) -> bool {
    let node = RdfTerm::Iri(step.clone());
    graph
        .objects(&node, &rdf::TYPE.iri())
        .iter()
        .any(|t| t.as_iri().is_some_and(|t| pplan::MULTI_STEP.is(t)))
        || !graph.objects(&node, &pko::HAS_STEP.iri()).is_empty()
}

/// Atomic steps of `procedure` in depth-first order. With a `level`, steps
/// annotated with a different expertise level are skipped along with their
/// substeps; unannotated steps are kept.
pub fn flatten(
    graph: &Graph,
    procedure: &Iri,
    level: Option<&Iri>,
    mode: OrderMode,
) -> Result<Vec<Iri>, OrderError> {
    let level_prop = pko::HAS_EXPERTISE_LEVEL.iri();
    if let Some(l) = level {
        let node = RdfTerm::Iri(l.clone());
        let used = !graph.subjects(&level_prop, &node).is_empty();
        let declared = graph
            .objects(&node, &rdf::TYPE.iri())
            .iter()
            .any(|t| t.as_iri().is_some_and(|t| pko::EXPERTISE_LEVEL.is(t)));
        if !used && !declared {
            return Err(OrderError::UnknownLevel(l.clone()));
        }
    }
    let mut out = Vec::new();
    let mut stack = vec![procedure.clone()];
    walk(graph, procedure, level, mode, &level_prop, &mut stack, &mut out)?;
    Ok(out)
}

fn walk(
    graph: &Graph,
    container: &Iri,
    level: Option<&Iri>,
    mode: OrderMode,
    level_prop: &Iri,
    stack: &mut Vec<Iri>,
    out: &mut Vec<Iri>,
) -> Result<(), OrderError> {
    for child in order_steps(graph, container, mode)? {
        if let Some(l) = level {
            let levels = iri_objects(graph, &child, level_prop);
            if !levels.is_empty() && !levels.contains(l) {
                continue;
            }
        }
        if is_multistep(graph, &child) {
            if stack.contains(&child) {
                return Err(OrderError::Cyclic(vec![child]));
            }
            stack.push(child.clone());
            walk(graph, &child, level, mode, level_prop, stack, out)?;
            stack.pop();
        } else {
            out.push(child);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(n: &str) -> Iri {
        Iri::new(format!("http://e/{n}")).unwrap()
    }

    fn order(members: &[&str], edges: &[(&str, &str)], mode: OrderMode) -> Result<Vec<String>, OrderError> {
        let m = members.iter().map(|n| iri(n)).collect();
        let e = edges.iter().map(|(a, b)| (iri(a), iri(b))).collect();
        linear_order(&m, &e, mode).map(|v| v.iter().map(|i| i.as_str()[9..].to_string()).collect())
    }

    #[test]
    fn strict_chain() {
        assert_eq!(
            order(&["c", "a", "b"], &[("b", "c"), ("a", "b")], OrderMode::Strict).unwrap(),
            ["a", "b", "c"]
        );
        assert_eq!(order(&["x"], &[], OrderMode::Strict).unwrap(), ["x"]);
        assert!(order(&[], &[], OrderMode::Strict).unwrap().is_empty());
    }

    #[test]
    fn strict_errors() {
        assert_eq!(
            order(&["a", "b", "c"], &[("a", "b"), ("a", "c")], OrderMode::Strict),
            Err(OrderError::Branching(iri("a")))
        );
        assert_eq!(
            order(&["a", "b"], &[("a", "b"), ("b", "a")], OrderMode::Strict),
            Err(OrderError::Cyclic(vec![iri("a"), iri("b")]))
        );
        assert_eq!(
            order(&["a", "b"], &[("a", "a")], OrderMode::Strict),
            Err(OrderError::Cyclic(vec![iri("a")]))
        );
        assert_eq!(
            order(&["a", "b"], &[], OrderMode::Strict),
            Err(OrderError::Disconnected(vec![iri("a"), iri("b")]))
        );
    }

    #[test]
    fn partial_topological() {
        assert_eq!(
            order(&["d", "c", "b", "a"], &[("a", "c"), ("b", "c"), ("c", "d")], OrderMode::Partial)
                .unwrap(),
            ["a", "b", "c", "d"]
        );
        assert!(matches!(
            order(&["a", "b"], &[("a", "b"), ("b", "a")], OrderMode::Partial),
            Err(OrderError::Cyclic(_))
        ));
    }
}
