//! Canonical N-Triples: one triple per line, lines sorted bytewise, LF
//! terminated. This is also the snapshot format.

use super::lex::{describe, Cursor, Scan};
use super::{DiagnosticKind, ParseDiagnostic};
use crate::store::Graph;
use crate::term::{Literal, RdfTerm, Triple};
use crate::vocab::Iri;

pub fn write(graph: &Graph) -> String {
    let mut lines: Vec<String> = graph.iter().map(|t| t.to_string()).collect();
    lines.sort();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses line-oriented N-Triples. Blank labels are kept verbatim, so a
/// written graph reads back term-for-term equal.
pub fn parse(text: &str) -> Result<Graph, ParseDiagnostic> {
    let mut cur = Cursor::new(text);
    let mut graph = Graph::new();
    loop {
        skip_blank(&mut cur);
        if cur.eof() {
            return Ok(graph);
        }
        if cur.peek() == Some('#') {
            skip_to_eol(&mut cur);
            continue;
        }
        let t = triple(&mut cur)?;
        graph.insert(t).expect("grammar guarantees well-formed triples");
        skip_inline(&mut cur);
        match cur.peek() {
            None => {}
            Some('#') => skip_to_eol(&mut cur),
            Some('\n' | '\r') => {}
            Some(_) => return Err(cur.unexpected("end of line")),
        }
    }
}

fn skip_inline(cur: &mut Cursor) {
    while matches!(cur.peek(), Some(' ' | '\t')) {
        cur.pos += 1;
    }
}

fn skip_blank(cur: &mut Cursor) {
    while matches!(cur.peek(), Some(' ' | '\t' | '\n' | '\r')) {
        cur.pos += 1;
    }
}

fn skip_to_eol(cur: &mut Cursor) {
    while !matches!(cur.peek(), None | Some('\n')) {
        cur.pos += 1;
    }
}

fn triple(cur: &mut Cursor) -> Scan<Triple> {
    let subject = match cur.peek() {
        Some('<') => iri(cur)?,
        Some('_') => blank(cur)?,
        _ => return Err(cur.unexpected("a subject IRI or blank node")),
    };
    skip_inline(cur);
    let predicate = match cur.peek() {
        Some('<') => iri(cur)?,
        _ => return Err(cur.unexpected("a predicate IRI")),
    };
    skip_inline(cur);
    let object = match cur.peek() {
        Some('<') => iri(cur)?,
        Some('_') => blank(cur)?,
        Some('"') => literal(cur)?,
        _ => return Err(cur.unexpected("an object")),
    };
    skip_inline(cur);
    cur.expect('.', "`.` at end of triple")?;
    Ok(Triple {
        subject,
        predicate,
        object,
    })
}

fn iri(cur: &mut Cursor) -> Scan<RdfTerm> {
    let at = cur.pos;
    let raw = cur.read_iriref()?;
    Iri::new(&raw)
        .map(RdfTerm::Iri)
        .map_err(|e| cur.diag(at, DiagnosticKind::InvalidIri, e.to_string()))
}

fn blank(cur: &mut Cursor) -> Scan<RdfTerm> {
    if cur.peek_at(1) != Some(':') {
        return Err(cur.unexpected("`_:`"));
    }
    cur.pos += 2;
    Ok(RdfTerm::Blank(cur.read_blank_label()?))
}

fn literal(cur: &mut Cursor) -> Scan<RdfTerm> {
    let lexical = cur.read_string(false)?;
    match cur.peek() {
        Some('@') => {
            cur.pos += 1;
            Ok(RdfTerm::Literal(Literal::lang(lexical, cur.read_langtag()?)))
        }
        Some('^') => {
            if cur.peek_at(1) != Some('^') {
                return Err(cur.syntax(cur.pos, format!("unexpected {}", describe('^'))));
            }
            cur.pos += 2;
            let at = cur.pos;
            let raw = cur.read_iriref()?;
            let datatype = Iri::new(&raw)
                .map_err(|e| cur.diag(at, DiagnosticKind::InvalidIri, e.to_string()))?;
            Ok(RdfTerm::Literal(Literal::typed(lexical, datatype)))
        }
        _ => Ok(RdfTerm::Literal(Literal::string(lexical))),
    }
}
