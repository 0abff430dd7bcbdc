//! Recursive-descent Turtle parser.
//!
//! Covers the W3C grammar except collections, which are rejected with a
//! dedicated diagnostic. Every blank node (labelled or anonymous) receives a
//! fresh document-scoped label `b0`, `b1`, ...

use std::collections::HashMap;

use super::lex::{
    is_local_escapable, is_pn_chars, is_pn_chars_base, is_pn_chars_u, Cursor, Scan,
};
use super::{DiagnosticKind, ParseDiagnostic, ParsedDocument, Severity};
use crate::store::Graph;
use crate::term::{Literal, RdfTerm, Triple};
use crate::vocab::{rdf, xsd, Iri, PrefixMap};

/// Parses a whole Turtle document. On failure the returned list holds any
/// warnings collected so far followed by the single aborting error.
pub fn parse_turtle(text: &str) -> Result<ParsedDocument, Vec<ParseDiagnostic>> {
    let mut parser = Parser {
        cur: Cursor::new(text),
        prefixes: PrefixMap::new(),
        base: None,
        graph: Graph::new(),
        blanks: HashMap::new(),
        next_blank: 0,
        warnings: Vec::new(),
    };
    match parser.document() {
        Ok(()) => {
            let Parser {
                mut graph,
                prefixes,
                base,
                warnings,
                ..
            } = parser;
            *graph.prefixes_mut() = prefixes.clone();
            Ok(ParsedDocument {
                graph,
                prefixes,
                base,
                warnings,
            })
        }
        Err(e) => {
            let mut all = parser.warnings;
            all.push(e);
            Err(all)
        }
    }
}

struct Parser {
    cur: Cursor,
    prefixes: PrefixMap,
    base: Option<Iri>,
    graph: Graph,
    blanks: HashMap<String, String>,
    next_blank: usize,
    warnings: Vec<ParseDiagnostic>,
}

impl Parser {
    fn document(&mut self) -> Scan<()> {
        loop {
            self.skip_ws();
            if self.cur.eof() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.cur.peek() {
            if c == '#' {
                while let Some(c) = self.cur.peek() {
                    if c == '\n' || c == '\r' {
                        break;
                    }
                    self.cur.pos += 1;
                }
            } else if matches!(c, ' ' | '\t' | '\n' | '\r') {
                self.cur.pos += 1;
            } else {
                break;
            }
        }
    }

    fn statement(&mut self) -> Scan<()> {
        if self.cur.peek() == Some('@') {
            if self.cur.starts_with("@prefix") {
                self.cur.pos += "@prefix".len();
                self.prefix_body()?;
            } else if self.cur.starts_with("@base") {
                self.cur.pos += "@base".len();
                self.base_body()?;
            } else {
                return Err(self.cur.unexpected("`@prefix` or `@base`"));
            }
            self.skip_ws();
            return self.cur.expect('.', "`.` after directive");
        }
        if self.keyword_ahead("prefix") {
            self.cur.pos += "prefix".len();
            return self.prefix_body();
        }
        if self.keyword_ahead("base") {
            self.cur.pos += "base".len();
            return self.base_body();
        }
        self.triples()?;
        self.skip_ws();
        self.cur.expect('.', "`.` at end of statement")
    }

    /// SPARQL-style keyword, case-insensitive, followed by whitespace.
    fn keyword_ahead(&self, kw: &str) -> bool {
        self.cur.starts_with_ignore_case(kw)
            && self
                .cur
                .peek_at(kw.len())
                .is_some_and(|c| c.is_whitespace() || c == '<')
    }

    fn prefix_body(&mut self) -> Scan<()> {
        self.skip_ws();
        let at = self.cur.pos;
        let label = self.read_prefix_label()?;
        self.cur.expect(':', "`:` after prefix label")?;
        self.skip_ws();
        let ns = self.iriref()?;
        if let Some(previous) = self.prefixes.insert(label.clone(), ns.clone()) {
            if previous != ns {
                self.warnings.push(self.cur.diag_with(
                    at,
                    DiagnosticKind::PrefixRedefined,
                    Severity::Warning,
                    format!("prefix `{label}:` redefined from <{previous}> to <{ns}>"),
                ));
            }
        }
        Ok(())
    }

    fn base_body(&mut self) -> Scan<()> {
        self.skip_ws();
        let iri = self.iriref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn read_prefix_label(&mut self) -> Scan<String> {
        let mut out = String::new();
        match self.cur.peek() {
            Some(':') => return Ok(out),
            Some(c) if is_pn_chars_base(c) => {}
            _ => return Err(self.cur.unexpected("a prefix label")),
        }
        let mut last_good = self.cur.pos;
        while let Some(c) = self.cur.peek() {
            if is_pn_chars(c) || c == '.' {
                out.push(c);
                self.cur.pos += 1;
                if c != '.' {
                    last_good = self.cur.pos;
                }
            } else {
                break;
            }
        }
        let trailing = self.cur.pos - last_good;
        out.truncate(out.len() - trailing);
        self.cur.pos = last_good;
        Ok(out)
    }

    fn iriref(&mut self) -> Scan<Iri> {
        let at = self.cur.pos;
        let raw = self.cur.read_iriref()?;
        self.resolve(&raw, at)
    }

    fn resolve(&self, raw: &str, at: usize) -> Scan<Iri> {
        let text = if has_scheme(raw) {
            raw.to_string()
        } else {
            match &self.base {
                Some(base) => resolve_reference(base.as_str(), raw),
                None => {
                    return Err(self.cur.diag(
                        at,
                        DiagnosticKind::InvalidIri,
                        format!("relative IRI <{raw}> with no base"),
                    ))
                }
            }
        };
        Iri::new(&text).map_err(|e| self.cur.diag(at, DiagnosticKind::InvalidIri, e.to_string()))
    }

    fn fresh_blank(&mut self) -> RdfTerm {
        let label = format!("b{}", self.next_blank);
        self.next_blank += 1;
        RdfTerm::Blank(label)
    }

    fn labelled_blank(&mut self, label: String) -> RdfTerm {
        if let Some(mapped) = self.blanks.get(&label) {
            return RdfTerm::Blank(mapped.clone());
        }
        let fresh = self.fresh_blank();
        if let RdfTerm::Blank(l) = &fresh {
            self.blanks.insert(label, l.clone());
        }
        fresh
    }

    fn emit(&mut self, s: &RdfTerm, p: &RdfTerm, o: RdfTerm) {
        // subject and predicate positions are enforced by the grammar
        let _ = self.graph.insert(Triple::new(s.clone(), p.clone(), o));
    }

    fn triples(&mut self) -> Scan<()> {
        match self.cur.peek() {
            Some('[') => {
                let at = self.cur.pos;
                let (node, had_props) = self.blank_property_list()?;
                self.skip_ws();
                if self.cur.peek() == Some('.') {
                    if !had_props {
                        return Err(self.cur.syntax(at, "`[]` subject needs a predicate-object list"));
                    }
                    return Ok(());
                }
                self.predicate_object_list(&node)
            }
            Some('(') => Err(self.collection_error()),
            _ => {
                let subject = self.subject()?;
                self.skip_ws();
                self.predicate_object_list(&subject)
            }
        }
    }

    fn collection_error(&self) -> ParseDiagnostic {
        self.cur.diag(
            self.cur.pos,
            DiagnosticKind::UnsupportedCollection,
            "RDF collections `( ... )` are not supported; link items with explicit properties",
        )
    }

    fn subject(&mut self) -> Scan<RdfTerm> {
        match self.cur.peek() {
            Some('<') => Ok(RdfTerm::Iri(self.iriref()?)),
            Some('_') if self.cur.peek_at(1) == Some(':') => {
                self.cur.pos += 2;
                let label = self.cur.read_blank_label()?;
                Ok(self.labelled_blank(label))
            }
            Some(c) if c == ':' || is_pn_chars_base(c) => {
                let at = self.cur.pos;
                match self.name_or_keyword()? {
                    Name::Prefixed(iri) => Ok(RdfTerm::Iri(iri)),
                    Name::Keyword(_) => Err(self.cur.syntax(at, "expected a subject")),
                }
            }
            _ => Err(self.cur.unexpected("a subject")),
        }
    }

    fn predicate_object_list(&mut self, subject: &RdfTerm) -> Scan<()> {
        loop {
            self.skip_ws();
            let predicate = self.verb()?;
            self.skip_ws();
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.cur.peek() != Some(';') {
                return Ok(());
            }
            while self.cur.peek() == Some(';') {
                self.cur.pos += 1;
                self.skip_ws();
            }
            // a trailing `;` may close the list
            if matches!(self.cur.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Scan<RdfTerm> {
        match self.cur.peek() {
            Some('<') => Ok(RdfTerm::Iri(self.iriref()?)),
            Some(c) if c == ':' || is_pn_chars_base(c) => {
                let at = self.cur.pos;
                match self.name_or_keyword()? {
                    Name::Prefixed(iri) => Ok(RdfTerm::Iri(iri)),
                    Name::Keyword(k) if k == "a" => Ok(RdfTerm::Iri(rdf::TYPE.iri())),
                    Name::Keyword(k) => Err(self.cur.syntax(at, format!("unexpected `{k}` (expected a predicate)"))),
                }
            }
            _ => Err(self.cur.unexpected("a predicate")),
        }
    }

    fn object_list(&mut self, subject: &RdfTerm, predicate: &RdfTerm) -> Scan<()> {
        loop {
            let object = self.object()?;
            self.emit(subject, predicate, object);
            self.skip_ws();
            if self.cur.peek() == Some(',') {
                self.cur.pos += 1;
                self.skip_ws();
            } else {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Scan<RdfTerm> {
        match self.cur.peek() {
            Some('<') => Ok(RdfTerm::Iri(self.iriref()?)),
            Some('_') if self.cur.peek_at(1) == Some(':') => {
                self.cur.pos += 2;
                let label = self.cur.read_blank_label()?;
                Ok(self.labelled_blank(label))
            }
            Some('[') => Ok(self.blank_property_list()?.0),
            Some('(') => Err(self.collection_error()),
            Some('"' | '\'') => self.rdf_literal(),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-') => self.numeric(),
            Some('.') if self.cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.numeric(),
            Some(c) if c == ':' || is_pn_chars_base(c) => {
                let at = self.cur.pos;
                match self.name_or_keyword()? {
                    Name::Prefixed(iri) => Ok(RdfTerm::Iri(iri)),
                    Name::Keyword(k) if k == "true" || k == "false" => {
                        Ok(RdfTerm::Literal(Literal::typed(k, xsd::BOOLEAN.iri())))
                    }
                    Name::Keyword(k) => Err(self.cur.syntax(at, format!("unexpected `{k}` (expected an object)"))),
                }
            }
            _ => Err(self.cur.unexpected("an object")),
        }
    }

    /// `[ ... ]`; returns the node and whether it carried properties.
    fn blank_property_list(&mut self) -> Scan<(RdfTerm, bool)> {
        self.cur.expect('[', "`[`")?;
        let node = self.fresh_blank();
        self.skip_ws();
        if self.cur.peek() == Some(']') {
            self.cur.pos += 1;
            return Ok((node, false));
        }
        self.predicate_object_list(&node)?;
        self.skip_ws();
        self.cur.expect(']', "`]`")?;
        Ok((node, true))
    }

    fn rdf_literal(&mut self) -> Scan<RdfTerm> {
        let lexical = self.cur.read_string(true)?;
        match self.cur.peek() {
            Some('@') => {
                self.cur.pos += 1;
                let tag = self.cur.read_langtag()?;
                Ok(RdfTerm::Literal(Literal::lang(lexical, tag)))
            }
            Some('^') if self.cur.peek_at(1) == Some('^') => {
                self.cur.pos += 2;
                let datatype = match self.cur.peek() {
                    Some('<') => self.iriref()?,
                    Some(c) if c == ':' || is_pn_chars_base(c) => {
                        let at = self.cur.pos;
                        match self.name_or_keyword()? {
                            Name::Prefixed(iri) => iri,
                            Name::Keyword(_) => return Err(self.cur.syntax(at, "expected a datatype IRI")),
                        }
                    }
                    _ => return Err(self.cur.unexpected("a datatype IRI")),
                };
                Ok(RdfTerm::Literal(Literal::typed(lexical, datatype)))
            }
            _ => Ok(RdfTerm::Literal(Literal::string(lexical))),
        }
    }

    fn numeric(&mut self) -> Scan<RdfTerm> {
        let start = self.cur.pos;
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.cur.peek() {
            text.push(sign);
            self.cur.pos += 1;
        }
        let digits = |p: &mut Self, out: &mut String| {
            let mut n = 0;
            while let Some(c) = p.cur.peek().filter(|c| c.is_ascii_digit()) {
                out.push(c);
                p.cur.pos += 1;
                n += 1;
            }
            n
        };
        let int_digits = digits(self, &mut text);
        let mut frac_digits = 0;
        let mut has_dot = false;
        if self.cur.peek() == Some('.') {
            let after = self.cur.peek_at(1);
            let exponent_follows = matches!(after, Some('e' | 'E')) && int_digits > 0;
            if after.is_some_and(|c| c.is_ascii_digit()) || exponent_follows {
                has_dot = true;
                text.push('.');
                self.cur.pos += 1;
                frac_digits = digits(self, &mut text);
            }
        }
        if int_digits == 0 && frac_digits == 0 {
            return Err(self.cur.syntax(start, "malformed number"));
        }
        let mut has_exp = false;
        if let Some(e @ ('e' | 'E')) = self.cur.peek() {
            let mut look = 1;
            if matches!(self.cur.peek_at(1), Some('+' | '-')) {
                look = 2;
            }
            if self.cur.peek_at(look).is_some_and(|c| c.is_ascii_digit()) {
                has_exp = true;
                text.push(e);
                self.cur.pos += 1;
                if look == 2 {
                    text.push(self.cur.bump().unwrap());
                }
                digits(self, &mut text);
            }
        }
        let datatype = if has_exp {
            xsd::DOUBLE
        } else if has_dot {
            xsd::DECIMAL
        } else {
            xsd::INTEGER
        };
        Ok(RdfTerm::Literal(Literal::typed(text, datatype.iri())))
    }

    /// A prefixed name, or a bare word such as `a`, `true` or `false`.
    fn name_or_keyword(&mut self) -> Scan<Name> {
        let start = self.cur.pos;
        let label = self.read_prefix_label()?;
        if self.cur.peek() != Some(':') {
            if label.is_empty() {
                return Err(self.cur.unexpected("a name"));
            }
            return Ok(Name::Keyword(label));
        }
        self.cur.pos += 1;
        let local = self.read_local()?;
        let Some(ns) = self.prefixes.get(&label) else {
            return Err(self.cur.diag(
                start,
                DiagnosticKind::UnknownPrefix,
                format!("undeclared prefix `{label}:`"),
            ));
        };
        let text = format!("{}{}", ns.as_str(), local);
        Iri::new(&text)
            .map(Name::Prefixed)
            .map_err(|e| self.cur.diag(start, DiagnosticKind::InvalidIri, e.to_string()))
    }

    fn read_local(&mut self) -> Scan<String> {
        let mut out = String::new();
        // byte length of `out` and cursor position after the last non-dot character
        let mut good = (0usize, self.cur.pos);
        let mut first = true;
        while let Some(c) = self.cur.peek() {
            let at = self.cur.pos;
            if c == '\\' {
                match self.cur.peek_at(1) {
                    Some(e) if is_local_escapable(e) => {
                        out.push(e);
                        self.cur.pos += 2;
                    }
                    _ => return Err(self.cur.syntax(at, "invalid escape in local name")),
                }
            } else if c == '%' {
                let h1 = self.cur.peek_at(1).filter(|c| c.is_ascii_hexdigit());
                let h2 = self.cur.peek_at(2).filter(|c| c.is_ascii_hexdigit());
                match (h1, h2) {
                    (Some(a), Some(b)) => {
                        out.push('%');
                        out.push(a);
                        out.push(b);
                        self.cur.pos += 3;
                    }
                    _ => return Err(self.cur.syntax(at, "invalid percent escape in local name")),
                }
            } else if (first && (is_pn_chars_u(c) || c == ':' || c.is_ascii_digit()))
                || (!first && (is_pn_chars(c) || c == '.' || c == ':'))
            {
                out.push(c);
                self.cur.pos += 1;
            } else {
                break;
            }
            first = false;
            if c != '.' {
                good = (out.len(), self.cur.pos);
            }
        }
        out.truncate(good.0);
        self.cur.pos = good.1;
        Ok(out)
    }
}

enum Name {
    Prefixed(Iri),
    Keyword(String),
}

fn has_scheme(s: &str) -> bool {
    match s.find(':') {
        Some(i) if i > 0 => {
            let scheme = &s[..i];
            scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        }
        _ => false,
    }
}

struct Parts<'a> {
    scheme: &'a str,
    authority: Option<&'a str>,
    path: &'a str,
    query: Option<&'a str>,
}

fn split_iri(s: &str) -> Parts<'_> {
    let (scheme, rest) = match s.find(':') {
        Some(i) if has_scheme(s) => (&s[..i], &s[i + 1..]),
        _ => ("", s),
    };
    let rest = rest.split('#').next().unwrap_or("");
    let (rest, query) = match rest.find('?') {
        Some(i) => (&rest[..i], Some(&rest[i + 1..])),
        None => (rest, None),
    };
    let (authority, path) = if let Some(after) = rest.strip_prefix("//") {
        match after.find('/') {
            Some(i) => (Some(&after[..i]), &after[i..]),
            None => (Some(after), ""),
        }
    } else {
        (None, rest)
    };
    Parts {
        scheme,
        authority,
        path,
        query,
    }
}

fn remove_dot_segments(path: &str) -> String {
    let mut input = path.to_string();
    let mut output = String::new();
    while !input.is_empty() {
        if input.starts_with("../") {
            input.drain(..3);
        } else if input.starts_with("./") {
            input.drain(..2);
        } else if input.starts_with("/./") {
            input.replace_range(..3, "/");
        } else if input == "/." {
            input = "/".into();
        } else if input.starts_with("/../") || input == "/.." {
            if input == "/.." {
                input = "/".into();
            } else {
                input.replace_range(..4, "/");
            }
            match output.rfind('/') {
                Some(i) => output.truncate(i),
                None => output.clear(),
            }
        } else if input == "." || input == ".." {
            input.clear();
        } else {
            let start = usize::from(input.starts_with('/'));
            let end = input[start..].find('/').map(|i| i + start).unwrap_or(input.len());
            output.push_str(&input[..end]);
            input.drain(..end);
        }
    }
    output
}

/// RFC 3986 reference resolution (non-strict).
pub(crate) fn resolve_reference(base: &str, reference: &str) -> String {
    let (reference, fragment) = match reference.find('#') {
        Some(i) => (&reference[..i], Some(&reference[i + 1..])),
        None => (reference, None),
    };
    let b = split_iri(base);
    let r = split_iri(reference);
    let mut out = String::new();
    out.push_str(b.scheme);
    out.push(':');
    let (authority, path, query) = if let Some(auth) = r.authority {
        (Some(auth), remove_dot_segments(r.path), r.query)
    } else if r.path.is_empty() {
        (b.authority, b.path.to_string(), r.query.or(b.query))
    } else if r.path.starts_with('/') {
        (b.authority, remove_dot_segments(r.path), r.query)
    } else {
        let merged = if b.authority.is_some() && b.path.is_empty() {
            format!("/{}", r.path)
        } else {
            match b.path.rfind('/') {
                Some(i) => format!("{}{}", &b.path[..=i], r.path),
                None => r.path.to_string(),
            }
        };
        (b.authority, remove_dot_segments(&merged), r.query)
    };
    if let Some(auth) = authority {
        out.push_str("//");
        out.push_str(auth);
    }
    out.push_str(&path);
    if let Some(q) = query {
        out.push('?');
        out.push_str(q);
    }
    if let Some(f) = fragment {
        out.push('#');
        out.push_str(f);
    }
    out
}
