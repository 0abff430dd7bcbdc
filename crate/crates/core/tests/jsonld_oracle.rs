//! Reads written JSON-LD back with a small expander that knows only the flat
//! shape the writer emits (context of prefixes, `@graph` of node objects)
//! and compares the triples with the source graph.

mod common;

use std::collections::BTreeSet;

use serde_json::{Map, Value};

use pk_forge::fixtures;
use pk_forge::io::write_jsonld;
use pk_forge::store::{isomorphic, Graph};
use pk_forge::term::{Literal, Node, RdfTerm, Triple};
use pk_forge::vocab::{default_prefixes, Iri, PrefixMap};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

struct Expander<'a> {
    context: &'a Map<String, Value>,
}

impl Expander<'_> {
    fn iri(&self, s: &str) -> String {
        if let Some((prefix, local)) = s.split_once(':') {
            if !local.starts_with("//") {
                if let Some(Value::String(ns)) = self.context.get(prefix) {
                    return format!("{ns}{local}");
                }
            }
        }
        s.to_string()
    }

    fn node(&self, s: &str) -> RdfTerm {
        match s.strip_prefix("_:") {
            Some(label) => RdfTerm::Blank(label.into()),
            None => RdfTerm::Iri(Iri::new(self.iri(s)).unwrap()),
        }
    }

    fn value(&self, v: &Value) -> RdfTerm {
        match v {
            Value::String(s) => RdfTerm::Literal(Literal::typed(s.clone(), Iri::new(XSD_STRING).unwrap())),
            Value::Object(o) => {
                if let Some(Value::String(id)) = o.get("@id") {
                    return self.node(id);
                }
                let lexical = o["@value"].as_str().unwrap().to_string();
                if let Some(Value::String(lang)) = o.get("@language") {
                    RdfTerm::Literal(Literal::lang(lexical, lang.clone()))
                } else {
                    let dt = self.iri(o["@type"].as_str().unwrap());
                    RdfTerm::Literal(Literal::typed(lexical, Iri::new(dt).unwrap()))
                }
            }
            other => panic!("unexpected value {other}"),
        }
    }

    fn triples(&self, graph: &[Value]) -> BTreeSet<Triple> {
        let mut out = BTreeSet::new();
        for node in graph {
            let node = node.as_object().unwrap();
            let subject = self.node(node["@id"].as_str().unwrap());
            for (key, v) in node {
                let values = match v {
                    Value::Array(a) => a.clone(),
                    one => vec![one.clone()],
                };
                match key.as_str() {
                    "@id" => {}
                    "@type" => {
                        for t in values {
                            let class = Iri::new(self.iri(t.as_str().unwrap())).unwrap();
                            out.insert(Triple::new(subject.clone(), Iri::new(RDF_TYPE).unwrap(), class));
                        }
                    }
                    p => {
                        let p = Iri::new(self.iri(p)).unwrap();
                        for v in values {
                            out.insert(Triple::new(subject.clone(), p.clone(), self.value(&v)));
                        }
                    }
                }
            }
        }
        out
    }
}

fn read_back(text: &str) -> Graph {
    let doc: Value = serde_json::from_str(text).unwrap();
    let e = Expander {
        context: doc["@context"].as_object().unwrap(),
    };
    let mut g = Graph::new();
    for t in e.triples(doc["@graph"].as_array().unwrap()) {
        g.insert(t).unwrap();
    }
    g
}

fn check(name: &str, g: &Graph, prefixes: &PrefixMap) {
    let text = write_jsonld(g, prefixes);
    let back = read_back(&text);
    assert!(isomorphic(g, &back), "{name}: JSON-LD lost or invented triples:\n{text}");
}

#[test]
fn fixtures_survive_json_ld() {
    check("combined", &fixtures::combined(), &default_prefixes());
}

#[test]
fn corpus_survives_json_ld() {
    for (name, text) in common::turtle_documents() {
        let mut doc = pk_forge::io::parse_turtle(&text).unwrap();
        doc.prefixes.extend_missing(&default_prefixes());
        check(&name, &doc.graph, &doc.prefixes);
        check(&name, &doc.graph, &PrefixMap::new());
    }
}

#[test]
fn blank_node_ids_are_preserved() {
    let g = fixtures::loto();
    let back = read_back(&write_jsonld(&g, &default_prefixes()));
    let blanks = |g: &Graph| -> BTreeSet<Node> {
        g.iter()
            .filter_map(|t| match t.subject {
                RdfTerm::Blank(b) => Some(Node::Blank(b)),
                _ => None,
            })
            .collect()
    };
    assert_eq!(blanks(&g), blanks(&back));
}
