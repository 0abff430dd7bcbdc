//! RDF terms and triples.

use std::fmt;

use crate::vocab::{rdf, xsd, Iri, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: xsd::STRING.iri(),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    /// A language-tagged string; the datatype is always `rdf:langString`.
    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: rdf::LANG_STRING.iri(),
            language: Some(language.into()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_numeric(&self) -> bool {
        [xsd::INTEGER, xsd::DECIMAL, xsd::DOUBLE]
            .iter()
            .any(|t| t.is(&self.datatype))
    }

    /// Numeric value for integer, decimal and double literals.
    pub fn as_f64(&self) -> Option<f64> {
        if self.is_numeric() {
            self.lexical.trim().parse().ok()
        } else {
            None
        }
    }
}

/// An IRI, blank node, or literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RdfTerm {
    Iri(Iri),
    Blank(String),
    Literal(Literal),
}

impl RdfTerm {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            RdfTerm::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            RdfTerm::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_node(&self) -> Option<Node> {
        match self {
            RdfTerm::Iri(i) => Some(Node::Iri(i.clone())),
            RdfTerm::Blank(b) => Some(Node::Blank(b.clone())),
            RdfTerm::Literal(_) => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, RdfTerm::Blank(_))
    }

    /// Compact rendering: prefixed name when a namespace matches, N-Triples otherwise.
    pub fn to_compact(&self, prefixes: &PrefixMap) -> String {
        match self {
            RdfTerm::Iri(i) => prefixes.shrink(i),
            RdfTerm::Blank(b) => format!("_:{b}"),
            RdfTerm::Literal(l) => {
                let mut out = String::new();
                write_quoted(&mut out, l.lexical());
                if let Some(lang) = l.language() {
                    out.push('@');
                    out.push_str(lang);
                } else if !xsd::STRING.is(l.datatype()) {
                    out.push_str("^^");
                    out.push_str(&prefixes.shrink(l.datatype()));
                }
                out
            }
        }
    }
}

impl From<Iri> for RdfTerm {
    fn from(i: Iri) -> Self {
        RdfTerm::Iri(i)
    }
}

impl From<Literal> for RdfTerm {
    fn from(l: Literal) -> Self {
        RdfTerm::Literal(l)
    }
}

impl From<Node> for RdfTerm {
    fn from(n: Node) -> Self {
        match n {
            Node::Iri(i) => RdfTerm::Iri(i),
            Node::Blank(b) => RdfTerm::Blank(b),
        }
    }
}

/// N-Triples form.
impl fmt::Display for RdfTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdfTerm::Iri(i) => write!(f, "<{i}>"),
            RdfTerm::Blank(b) => write!(f, "_:{b}"),
            RdfTerm::Literal(l) => {
                let mut out = String::new();
                write_quoted(&mut out, l.lexical());
                if let Some(lang) = l.language() {
                    write!(f, "{out}@{lang}")
                } else if xsd::STRING.is(l.datatype()) {
                    f.write_str(&out)
                } else {
                    write!(f, "{out}^^<{}>", l.datatype())
                }
            }
        }
    }
}

/// Canonical N-Triples string escaping: only `"`, `\`, LF and CR are escaped.
pub(crate) fn write_quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// A resource that can be a triple subject: an IRI or a blank node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Iri(Iri),
    Blank(String),
}

impl Node {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Node::Iri(i) => Some(i),
            Node::Blank(_) => None,
        }
    }
}

impl From<Iri> for Node {
    fn from(i: Iri) -> Self {
        Node::Iri(i)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Iri(i) => write!(f, "<{i}>"),
            Node::Blank(b) => write!(f, "_:{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: RdfTerm,
    pub predicate: RdfTerm,
    pub object: RdfTerm,
}

impl Triple {
    /// Builds a triple without checking well-formedness; the store rejects
    /// malformed triples on insert.
    pub fn new(
        subject: impl Into<RdfTerm>,
        predicate: impl Into<RdfTerm>,
        object: impl Into<RdfTerm>,
    ) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn is_well_formed(&self) -> bool {
        !matches!(self.subject, RdfTerm::Literal(_)) && matches!(self.predicate, RdfTerm::Iri(_))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_datatype_defaults() {
        assert!(xsd::STRING.is(Literal::string("x").datatype()));
        let l = Literal::lang("ciao", "it");
        assert!(rdf::LANG_STRING.is(l.datatype()));
        assert_eq!(l.language(), Some("it"));
    }

    #[test]
    fn ntriples_rendering() {
        let t = Triple::new(
            Iri::new("http://e/s").unwrap(),
            Iri::new("http://e/p").unwrap(),
            Literal::string("a \"q\"\nb\\"),
        );
        assert_eq!(t.to_string(), r#"<http://e/s> <http://e/p> "a \"q\"\nb\\" ."#);
        let typed = RdfTerm::Literal(Literal::typed("120", xsd::INTEGER.iri()));
        assert_eq!(
            typed.to_string(),
            "\"120\"^^<http://www.w3.org/2001/XMLSchema#integer>"
        );
    }

    #[test]
    fn numeric_value() {
        assert_eq!(Literal::typed("120.0", xsd::DECIMAL.iri()).as_f64(), Some(120.0));
        assert_eq!(Literal::string("120").as_f64(), None);
    }
}
