use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use super::Graph;
use crate::term::{RdfTerm, Triple};

/// Graph isomorphism up to blank-node renaming.
///
/// Blank nodes are first partitioned by iterated neighbourhood hashing, then
/// a backtracking search maps each class of one graph onto the same class of
/// the other.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ground = |g: &Graph| -> BTreeSet<Triple> {
        g.iter()
            .filter(|t| !t.subject.is_blank() && !t.object.is_blank())
            .collect()
    };
    if ground(a) != ground(b) {
        return false;
    }
    let blank_a = a.blank_labels();
    let blank_b = b.blank_labels();
    if blank_a.len() != blank_b.len() {
        return false;
    }
    if blank_a.is_empty() {
        return true;
    }

    let colors_a = refine(a, &blank_a);
    let colors_b = refine(b, &blank_b);
    let histogram = |c: &HashMap<String, u64>| {
        let mut h: BTreeMap<u64, usize> = BTreeMap::new();
        for v in c.values() {
            *h.entry(*v).or_default() += 1;
        }
        h
    };
    if histogram(&colors_a) != histogram(&colors_b) {
        return false;
    }

    let blank_triples_a: Vec<Triple> = a
        .iter()
        .filter(|t| t.subject.is_blank() || t.object.is_blank())
        .collect();
    let blank_triples_b: BTreeSet<Triple> = b
        .iter()
        .filter(|t| t.subject.is_blank() || t.object.is_blank())
        .collect();

    // most constrained blanks first
    let class_size = histogram(&colors_a);
    let mut order: Vec<String> = blank_a.into_iter().collect();
    order.sort_by_key(|l| (class_size[&colors_a[l]], colors_a[l], l.clone()));

    let mut mapping: HashMap<String, String> = HashMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    search(
        &order,
        0,
        &colors_a,
        &colors_b,
        &blank_b,
        &blank_triples_a,
        &blank_triples_b,
        &mut mapping,
        &mut used,
    )
}

#[allow(clippy::too_many_arguments)]
fn search(
    order: &[String],
    depth: usize,
    colors_a: &HashMap<String, u64>,
    colors_b: &HashMap<String, u64>,
    blank_b: &BTreeSet<String>,
    triples_a: &[Triple],
    triples_b: &BTreeSet<Triple>,
    mapping: &mut HashMap<String, String>,
    used: &mut BTreeSet<String>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let label = &order[depth];
    for candidate in blank_b {
        if used.contains(candidate) || colors_b[candidate] != colors_a[label] {
            continue;
        }
        mapping.insert(label.clone(), candidate.clone());
        used.insert(candidate.clone());
        if consistent(triples_a, triples_b, mapping)
            && search(
                order, depth + 1, colors_a, colors_b, blank_b, triples_a, triples_b, mapping,
                used,
            )
        {
            return true;
        }
        mapping.remove(label);
        used.remove(candidate);
    }
    false
}

fn consistent(
    triples_a: &[Triple],
    triples_b: &BTreeSet<Triple>,
    mapping: &HashMap<String, String>,
) -> bool {
    let map = |t: &RdfTerm| -> Option<RdfTerm> {
        match t {
            RdfTerm::Blank(l) => mapping.get(l).map(|m| RdfTerm::Blank(m.clone())),
            other => Some(other.clone()),
        }
    };
    triples_a.iter().all(|t| match (map(&t.subject), map(&t.object)) {
        (Some(s), Some(o)) => triples_b.contains(&Triple {
            subject: s,
            predicate: t.predicate.clone(),
            object: o,
        }),
        _ => true,
    })
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

fn refine(g: &Graph, blanks: &BTreeSet<String>) -> HashMap<String, u64> {
    let mut colors: HashMap<String, u64> = blanks.iter().map(|b| (b.clone(), 0)).collect();
    let signature = |t: &RdfTerm, colors: &HashMap<String, u64>| -> u64 {
        match t {
            RdfTerm::Blank(l) => hash_of(&("blank", colors[l])),
            other => hash_of(&("ground", other)),
        }
    };
    let mut distinct = 1;
    for _ in 0..=blanks.len() {
        let mut next = HashMap::with_capacity(colors.len());
        for b in blanks {
            let node = RdfTerm::Blank(b.clone());
            let mut edges: Vec<(u8, RdfTerm, u64)> = Vec::new();
            for t in g.match_pattern(Some(&node), None, None) {
                edges.push((0, t.predicate, signature(&t.object, &colors)));
            }
            for t in g.match_pattern(None, None, Some(&node)) {
                edges.push((1, t.predicate, signature(&t.subject, &colors)));
            }
            edges.sort();
            next.insert(b.clone(), hash_of(&(colors[b], edges)));
        }
        let now = next.values().collect::<BTreeSet<_>>().len();
        colors = next;
        if now == distinct {
            break;
        }
        distinct = now;
    }
    colors
}
