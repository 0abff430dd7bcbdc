use std::collections::BTreeSet;

use super::{Atom, Bindings, CompetencyQuery, PatternTerm, QueryError, ResultTable};
use crate::store::Graph;
use crate::term::RdfTerm;
use crate::vocab::Iri;

/// Evaluates `q` under `bindings`, picking the join order greedily: next is
/// the atom with the most positions already bound.
pub fn run(g: &Graph, q: &CompetencyQuery, bindings: &Bindings) -> Result<ResultTable, QueryError> {
    check_bindings(q, bindings)?;
    let mut bound: BTreeSet<&str> = bindings.keys().map(String::as_str).collect();
    let mut remaining: Vec<usize> = (0..q.pattern.len()).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let score = |i: usize| {
            let a = &q.pattern[i];
            [&a.subject, &a.object]
                .iter()
                .filter(|t| t.var().is_none_or(|v| bound.contains(v)))
                .count()
        };
        let (pos, &best) = remaining
            .iter()
            .enumerate()
            .max_by_key(|&(pos, &i)| (score(i), std::cmp::Reverse(pos)))
            .expect("remaining is non-empty");
        remaining.remove(pos);
        let a = &q.pattern[best];
        bound.extend([a.subject.var(), a.object.var()].into_iter().flatten());
        order.push(best);
    }
    Ok(evaluate(g, q, bindings, &order))
}

/// Evaluates the atoms in exactly the given order. `order` must be a
/// permutation of the atom indices.
pub fn run_in_order(
    g: &Graph,
    q: &CompetencyQuery,
    bindings: &Bindings,
    order: &[usize],
) -> Result<ResultTable, QueryError> {
    check_bindings(q, bindings)?;
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    assert!(
        sorted == (0..q.pattern.len()).collect::<Vec<_>>(),
        "join order must be a permutation of the atoms"
    );
    Ok(evaluate(g, q, bindings, order))
}

fn check_bindings(q: &CompetencyQuery, bindings: &Bindings) -> Result<(), QueryError> {
    if let Some(p) = q.parameters.iter().find(|p| !bindings.contains_key(*p)) {
        return Err(QueryError::UnboundParameter(p.clone()));
    }
    if let Some(k) = bindings.keys().find(|k| !q.parameters.contains(k)) {
        return Err(QueryError::UnknownParameter(k.clone()));
    }
    Ok(())
}

fn evaluate(g: &Graph, q: &CompetencyQuery, bindings: &Bindings, order: &[usize]) -> ResultTable {
    let mut solutions = vec![bindings.clone()];
    for &i in order {
        let atom = &q.pattern[i];
        solutions = solutions.iter().flat_map(|b| extend(g, atom, b)).collect();
        if solutions.is_empty() {
            break;
        }
    }
    let rows: BTreeSet<Vec<RdfTerm>> = solutions
        .into_iter()
        .map(|b| q.select.iter().map(|v| b[v].clone()).collect())
        .collect();
    ResultTable {
        columns: q.select.clone(),
        rows: rows.into_iter().collect(),
    }
}

fn resolve<'a>(t: &'a PatternTerm, b: &'a Bindings) -> Option<&'a RdfTerm> {
    match t {
        PatternTerm::Const(c) => Some(c),
        PatternTerm::Var(v) => b.get(v),
    }
}

/// Binds `t` to `value`, failing on a clash with an earlier binding.
fn bind(b: &mut Bindings, t: &PatternTerm, value: &RdfTerm) -> bool {
    match t {
        PatternTerm::Const(c) => c == value,
        PatternTerm::Var(v) => match b.get(v) {
            Some(old) => old == value,
            None => {
                b.insert(v.clone(), value.clone());
                true
            }
        },
    }
}

fn extend(g: &Graph, atom: &Atom, b: &Bindings) -> Vec<Bindings> {
    let s = resolve(&atom.subject, b);
    let o = resolve(&atom.object, b);
    let pairs: Vec<(RdfTerm, RdfTerm)> = if atom.transitive {
        walk(g, &atom.predicate, s, o)
    } else {
        let p = RdfTerm::Iri(atom.predicate.clone());
        g.match_pattern(s, Some(&p), o)
            .map(|t| (t.subject, t.object))
            .collect()
    };
    pairs
        .into_iter()
        .filter_map(|(x, y)| {
            let mut next = b.clone();
            (bind(&mut next, &atom.subject, &x) && bind(&mut next, &atom.object, &y)).then_some(next)
        })
        .collect()
}

/// Pairs `(x, y)` linked by one or more `p` edges, restricted by whichever
/// ends are bound.
fn walk(g: &Graph, p: &Iri, s: Option<&RdfTerm>, o: Option<&RdfTerm>) -> Vec<(RdfTerm, RdfTerm)> {
    match (s, o) {
        (Some(s), o) => reach(g, p, s, true)
            .into_iter()
            .filter(|y| o.is_none_or(|o| o == y))
            .map(|y| (s.clone(), y))
            .collect(),
        (None, Some(o)) => reach(g, p, o, false)
            .into_iter()
            .map(|x| (x, o.clone()))
            .collect(),
        (None, None) => {
            let starts: BTreeSet<RdfTerm> = g.pairs(p).into_iter().map(|(x, _)| x).collect();
            starts
                .into_iter()
                .flat_map(|x| reach(g, p, &x, true).into_iter().map(move |y| (x.clone(), y)))
                .collect()
        }
    }
}

/// Nodes at distance one or more from `from`, following `p` forwards or
/// backwards. `from` itself is included only if it lies on a cycle.
fn reach(g: &Graph, p: &Iri, from: &RdfTerm, forward: bool) -> BTreeSet<RdfTerm> {
    let step = |n: &RdfTerm| {
        if forward {
            g.objects(n, p)
        } else {
            g.subjects(p, n)
        }
    };
    let mut seen = BTreeSet::new();
    let mut stack = step(from);
    while let Some(n) = stack.pop() {
        if seen.insert(n.clone()) {
            stack.extend(step(&n));
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cq::catalog;
    use crate::io::parse_turtle;

    fn graph(body: &str) -> Graph {
        let text = format!(
            "@prefix ex: <https://example.org/> .\n@prefix pko: <https://w3id.org/pko#> .\n{body}"
        );
        parse_turtle(&text).unwrap().graph
    }

    fn bind(k: &str, v: &str) -> Bindings {
        [(k.to_string(), RdfTerm::Iri(Iri::new(format!("https://example.org/{v}")).unwrap()))].into()
    }

    #[test]
    fn empty_graph_gives_empty_tables() {
        let g = Graph::new();
        for q in catalog().queries() {
            let b: Bindings = q
                .parameters
                .iter()
                .map(|p| (p.clone(), RdfTerm::Iri(Iri::new("https://example.org/x").unwrap())))
                .collect();
            assert!(run(&g, q, &b).unwrap().is_empty(), "{}", q.id);
        }
    }

    #[test]
    fn transitive_steps_include_substeps() {
        let g = graph("ex:p pko:hasStep ex:m . ex:m pko:hasStep ex:a, ex:b .");
        let t = run(&g, catalog().get("CQ10").unwrap(), &bind("procedure", "p")).unwrap();
        assert_eq!(t.len(), 3);
        let direct = run(&g, catalog().get("CQ04").unwrap(), &bind("procedure", "p")).unwrap();
        assert_eq!(direct.len(), 1);
    }

    #[test]
    fn transitive_walk_tolerates_cycles() {
        let g = graph("ex:a pko:hasStep ex:b . ex:b pko:hasStep ex:a .");
        let t = run(&g, catalog().get("CQ10").unwrap(), &bind("procedure", "a")).unwrap();
        // a reaches b, and a again through the cycle
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn binding_errors() {
        let g = Graph::new();
        let q = catalog().get("CQ01").unwrap();
        assert_eq!(
            run(&g, q, &Bindings::new()),
            Err(QueryError::UnboundParameter("procedure".into()))
        );
        let mut b = bind("procedure", "p");
        b.extend(bind("step", "s"));
        assert_eq!(run(&g, q, &b), Err(QueryError::UnknownParameter("step".into())));
    }
}
