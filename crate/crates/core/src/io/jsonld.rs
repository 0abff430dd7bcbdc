//! Flat JSON-LD: a context built from the prefix map and one node object per
//! subject. Keys are sorted (serde_json's default map ordering).

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::store::Graph;
use crate::term::RdfTerm;
use crate::vocab::{rdf, xsd, Iri, PrefixMap};

pub fn write(graph: &Graph, prefixes: &PrefixMap) -> String {
    let mut context = Map::new();
    for (label, ns) in prefixes.iter() {
        if !label.is_empty() {
            context.insert(label.to_string(), Value::String(ns.to_string()));
        }
    }

    let mut nodes: BTreeMap<RdfTerm, BTreeMap<String, Vec<Value>>> = BTreeMap::new();
    let mut types: BTreeMap<RdfTerm, Vec<String>> = BTreeMap::new();
    for t in graph.iter() {
        let p = t.predicate.as_iri().expect("predicates are IRIs");
        nodes.entry(t.subject.clone()).or_default();
        if rdf::TYPE.is(p) {
            if let RdfTerm::Iri(class) = &t.object {
                types.entry(t.subject).or_default().push(compact(class, prefixes));
                continue;
            }
        }
        let value = object_value(&t.object, prefixes);
        nodes
            .get_mut(&t.subject)
            .unwrap()
            .entry(compact(p, prefixes))
            .or_default()
            .push(value);
    }

    let mut graph_nodes = Vec::with_capacity(nodes.len());
    for (subject, properties) in nodes {
        let mut node = Map::new();
        node.insert("@id".into(), Value::String(node_id(&subject, prefixes)));
        if let Some(mut ts) = types.remove(&subject) {
            ts.sort();
            node.insert("@type".into(), collapse(ts.into_iter().map(Value::String).collect()));
        }
        for (key, mut values) in properties {
            values.sort_by_key(|v| v.to_string());
            node.insert(key, collapse(values));
        }
        graph_nodes.push(Value::Object(node));
    }

    let doc = json!({ "@context": Value::Object(context), "@graph": graph_nodes });
    let mut out = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    out.push('\n');
    out
}

fn collapse(mut values: Vec<Value>) -> Value {
    if values.len() == 1 {
        values.pop().unwrap()
    } else {
        Value::Array(values)
    }
}

/// Compact IRI under a non-empty prefix, or the absolute IRI.
fn compact(iri: &Iri, prefixes: &PrefixMap) -> String {
    match prefixes.split(iri) {
        Some((label, local)) if !label.is_empty() && !local.starts_with("//") => {
            format!("{label}:{local}")
        }
        _ => iri.to_string(),
    }
}

fn node_id(term: &RdfTerm, prefixes: &PrefixMap) -> String {
    match term {
        RdfTerm::Iri(i) => compact(i, prefixes),
        RdfTerm::Blank(b) => format!("_:{b}"),
        RdfTerm::Literal(_) => unreachable!("literals are never node ids"),
    }
}

fn object_value(term: &RdfTerm, prefixes: &PrefixMap) -> Value {
    match term {
        RdfTerm::Iri(_) | RdfTerm::Blank(_) => json!({ "@id": node_id(term, prefixes) }),
        RdfTerm::Literal(l) => {
            if let Some(lang) = l.language() {
                json!({ "@value": l.lexical(), "@language": lang })
            } else if xsd::STRING.is(l.datatype()) {
                Value::String(l.lexical().to_string())
            } else {
                json!({ "@value": l.lexical(), "@type": compact(l.datatype(), prefixes) })
            }
        }
    }
}
