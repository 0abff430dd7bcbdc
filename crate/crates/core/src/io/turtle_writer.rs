//! Deterministic Turtle output.
//!
//! Subjects are written in term order with `;`/`,` sugar. A blank node used
//! exactly once as an object is inlined as `[ ... ]`; every other blank node
//! gets a fresh `_:bN` label.

use std::collections::{BTreeMap, BTreeSet};

use super::lex::{is_plain_local_name, is_valid_prefix_label};
use crate::store::Graph;
use crate::term::{write_quoted, Literal, RdfTerm};
use crate::vocab::{rdf, xsd, Iri, PrefixMap};

pub fn write(graph: &Graph, prefixes: &PrefixMap) -> String {
    if graph.is_empty() {
        return String::new();
    }
    let mut w = Writer::new(graph, prefixes);
    let body = w.body();
    let mut out = String::new();
    for label in &w.used {
        let ns = prefixes.get(label).expect("used prefixes come from the map");
        out.push_str(&format!("@prefix {label}: <{ns}> .\n"));
    }
    if !w.used.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

struct Writer<'a> {
    graph: &'a Graph,
    prefixes: &'a PrefixMap,
    inline: BTreeSet<String>,
    labels: BTreeMap<String, String>,
    used: BTreeSet<String>,
}

impl<'a> Writer<'a> {
    fn new(graph: &'a Graph, prefixes: &'a PrefixMap) -> Self {
        let mut refs: BTreeMap<String, usize> = BTreeMap::new();
        for t in graph.iter() {
            if let RdfTerm::Blank(b) = &t.object {
                *refs.entry(b.clone()).or_default() += 1;
            }
        }
        let blanks = graph.blank_labels();
        let mut inline: BTreeSet<String> = blanks
            .iter()
            .filter(|b| refs.get(*b).copied() == Some(1))
            .cloned()
            .collect();

        // Inlined blanks must hang off a written root; break any cycle of
        // singly-referenced blanks by demoting its smallest member.
        loop {
            let mut reached = BTreeSet::new();
            let mut stack: Vec<RdfTerm> = graph
                .iter()
                .map(|t| t.subject)
                .filter(|s| match s {
                    RdfTerm::Blank(b) => !inline.contains(b),
                    _ => true,
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            while let Some(node) = stack.pop() {
                for t in graph.match_pattern(Some(&node), None, None) {
                    if let RdfTerm::Blank(b) = &t.object {
                        if inline.contains(b) && reached.insert(b.clone()) {
                            stack.push(t.object.clone());
                        }
                    }
                }
            }
            match inline.iter().find(|b| !reached.contains(*b)).cloned() {
                Some(orphan) => {
                    inline.remove(&orphan);
                }
                None => break,
            }
        }

        let labels = blanks
            .iter()
            .filter(|b| !inline.contains(*b))
            .enumerate()
            .map(|(i, b)| (b.clone(), format!("b{i}")))
            .collect();
        Writer {
            graph,
            prefixes,
            inline,
            labels,
            used: BTreeSet::new(),
        }
    }

    fn body(&mut self) -> String {
        let subjects: BTreeSet<RdfTerm> = self.graph.iter().map(|t| t.subject).collect();
        let mut out = String::new();
        for s in subjects {
            if let RdfTerm::Blank(b) = &s {
                if self.inline.contains(b) {
                    continue;
                }
            }
            let head = self.term(&s);
            out.push_str(&head);
            let groups = self.predicate_groups(&s);
            for (i, (p, objects)) in groups.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { " ;\n    " });
                out.push_str(p);
                out.push(' ');
                out.push_str(&objects.join(", "));
            }
            out.push_str(" .\n");
        }
        out
    }

    fn predicate_groups(&mut self, subject: &RdfTerm) -> Vec<(String, Vec<String>)> {
        let mut by_predicate: BTreeMap<(bool, RdfTerm), Vec<RdfTerm>> = BTreeMap::new();
        for t in self.graph.match_pattern(Some(subject), None, None) {
            let is_type = t.predicate.as_iri().is_some_and(|p| rdf::TYPE.is(p));
            by_predicate
                .entry((!is_type, t.predicate))
                .or_default()
                .push(t.object);
        }
        let mut groups = Vec::new();
        for ((not_type, p), mut objects) in by_predicate {
            objects.sort();
            let p_text = if not_type { self.term(&p) } else { "a".to_string() };
            let rendered = objects.iter().map(|o| self.object(o)).collect();
            groups.push((p_text, rendered));
        }
        groups
    }

    fn object(&mut self, o: &RdfTerm) -> String {
        if let RdfTerm::Blank(b) = o {
            if self.inline.contains(b) {
                let groups = self.predicate_groups(o);
                if groups.is_empty() {
                    return "[]".into();
                }
                let inner: Vec<String> = groups
                    .into_iter()
                    .map(|(p, objs)| format!("{p} {}", objs.join(", ")))
                    .collect();
                return format!("[ {} ]", inner.join(" ; "));
            }
        }
        self.term(o)
    }

    fn term(&mut self, t: &RdfTerm) -> String {
        match t {
            RdfTerm::Iri(i) => self.iri(i),
            RdfTerm::Blank(b) => format!("_:{}", self.labels[b]),
            RdfTerm::Literal(l) => self.literal(l),
        }
    }

    fn iri(&mut self, iri: &Iri) -> String {
        if let Some((label, local)) = self.prefixes.split(iri) {
            if is_valid_prefix_label(label) && is_plain_local_name(local) {
                self.used.insert(label.to_string());
                return format!("{label}:{local}");
            }
        }
        format!("<{iri}>")
    }

    fn literal(&mut self, l: &Literal) -> String {
        let lex = l.lexical();
        let dt = l.datatype();
        if l.language().is_none() {
            let bare = (xsd::INTEGER.is(dt) && is_integer(lex))
                || (xsd::DECIMAL.is(dt) && is_decimal(lex))
                || (xsd::DOUBLE.is(dt) && is_double(lex))
                || (xsd::BOOLEAN.is(dt) && (lex == "true" || lex == "false"));
            if bare {
                return lex.to_string();
            }
        }
        let mut out = String::new();
        write_quoted(&mut out, lex);
        if let Some(lang) = l.language() {
            out.push('@');
            out.push_str(lang);
        } else if !xsd::STRING.is(dt) {
            out.push_str("^^");
            out.push_str(&self.iri(dt));
        }
        out
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn is_integer(s: &str) -> bool {
    all_digits(strip_sign(s))
}

fn is_decimal(s: &str) -> bool {
    match strip_sign(s).split_once('.') {
        Some((int, frac)) => (int.is_empty() || all_digits(int)) && all_digits(frac),
        None => false,
    }
}

fn is_double(s: &str) -> bool {
    let Some(i) = s.find(['e', 'E']) else {
        return false;
    };
    let (mantissa, exp) = (strip_sign(&s[..i]), &s[i + 1..]);
    let mantissa_ok = match mantissa.split_once('.') {
        Some((int, frac)) => {
            (all_digits(int) && (frac.is_empty() || all_digits(frac)))
                || (int.is_empty() && all_digits(frac))
        }
        None => all_digits(mantissa),
    };
    mantissa_ok && all_digits(strip_sign(exp))
}
