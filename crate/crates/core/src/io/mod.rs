//! Turtle parsing and deterministic Turtle, N-Triples and JSON-LD output.

mod jsonld;
mod lex;
pub mod ntriples;
mod turtle;
mod turtle_writer;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use jsonld::write as write_jsonld;
pub use turtle::parse_turtle;
pub use turtle_writer::write as write_turtle;

use crate::store::Graph;
use crate::vocab::{Iri, PrefixMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Syntax,
    UnknownPrefix,
    UnsupportedCollection,
    InvalidIri,
    PrefixRedefined,
}

/// A positioned parser message. Lines and columns count from 1; columns
/// count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
    pub kind: DiagnosticKind,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// Result of a successful Turtle parse.
#[derive(Debug, Clone)]
pub struct ParsedDocument {
    pub graph: Graph,
    pub prefixes: PrefixMap,
    pub base: Option<Iri>,
    pub warnings: Vec<ParseDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Turtle,
    NTriples,
    JsonLd,
}

impl Format {
    pub fn media_type(self) -> &'static str {
        match self {
            Format::Turtle => "text/turtle",
            Format::NTriples => "application/n-triples",
            Format::JsonLd => "application/ld+json",
        }
    }

    pub fn from_media_type(media: &str) -> Option<Format> {
        let essence = media.split(';').next().unwrap_or("").trim();
        match essence {
            "text/turtle" => Some(Format::Turtle),
            "application/n-triples" => Some(Format::NTriples),
            "application/ld+json" => Some(Format::JsonLd),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "turtle" | "ttl" => Ok(Format::Turtle),
            "ntriples" | "nt" => Ok(Format::NTriples),
            "jsonld" | "json-ld" => Ok(Format::JsonLd),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SerializationOptions {
    pub format: Format,
    pub prefixes: PrefixMap,
}

impl SerializationOptions {
    pub fn new(format: Format, prefixes: PrefixMap) -> Self {
        SerializationOptions { format, prefixes }
    }
}

/// Serializes `graph`. Output is a pure function of the graph and options.
pub fn serialize(graph: &Graph, opts: &SerializationOptions) -> String {
    match opts.format {
        Format::Turtle => turtle_writer::write(graph, &opts.prefixes),
        Format::NTriples => ntriples::write(graph),
        Format::JsonLd => jsonld::write(graph, &opts.prefixes),
    }
}
