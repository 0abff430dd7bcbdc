//! Character-level scanning shared by the Turtle and N-Triples parsers.

use super::{DiagnosticKind, ParseDiagnostic, Severity};

pub(crate) struct Cursor {
    chars: Vec<char>,
    pub pos: usize,
}

pub(crate) type Scan<T> = Result<T, ParseDiagnostic>;

impl Cursor {
    pub fn new(text: &str) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    pub fn eof(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    pub fn starts_with_ignore_case(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| {
            self.peek_at(i)
                .is_some_and(|d| d.eq_ignore_ascii_case(&c))
        })
    }

    pub fn line_col(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    pub fn diag(&self, pos: usize, kind: DiagnosticKind, message: impl Into<String>) -> ParseDiagnostic {
        self.diag_with(pos, kind, Severity::Error, message)
    }

    pub fn diag_with(
        &self,
        pos: usize,
        kind: DiagnosticKind,
        severity: Severity,
        message: impl Into<String>,
    ) -> ParseDiagnostic {
        let (line, column) = self.line_col(pos);
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity,
            kind,
        }
    }

    pub fn syntax(&self, pos: usize, message: impl Into<String>) -> ParseDiagnostic {
        self.diag(pos, DiagnosticKind::Syntax, message)
    }

    /// Error at the current position describing what was expected.
    pub fn unexpected(&self, expected: &str) -> ParseDiagnostic {
        match self.peek() {
            Some(c) => self.syntax(self.pos, format!("unexpected {} (expected {expected})", describe(c))),
            None => self.syntax(self.pos, format!("unexpected end of input (expected {expected})")),
        }
    }

    pub fn expect(&mut self, c: char, what: &str) -> Scan<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    /// `<...>` with UCHAR escapes; returns the raw (unresolved) IRI text.
    pub fn read_iriref(&mut self) -> Scan<String> {
        self.expect('<', "`<`")?;
        let mut out = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(self.syntax(at, "unterminated IRI")),
                Some('>') => return Ok(out),
                Some('\\') => {
                    let c = self.read_uchar(at)?;
                    if !iri_char_allowed(c) {
                        return Err(self.diag(at, DiagnosticKind::InvalidIri, format!("escaped character {} is not allowed in an IRI", describe(c))));
                    }
                    out.push(c);
                }
                Some(c) if iri_char_allowed(c) => out.push(c),
                Some(c) => {
                    return Err(self.diag(
                        at,
                        DiagnosticKind::InvalidIri,
                        format!("{} is not allowed in an IRI", describe(c)),
                    ))
                }
            }
        }
    }

    /// After a backslash: `uXXXX` or `UXXXXXXXX`.
    fn read_uchar(&mut self, start: usize) -> Scan<char> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax(start, "invalid escape sequence")),
        };
        let mut value = 0u32;
        for _ in 0..width {
            let digit = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.syntax(start, "invalid unicode escape"))?;
            value = value * 16 + digit;
        }
        char::from_u32(value).ok_or_else(|| self.syntax(start, "escape is not a valid code point"))
    }

    /// String literal in any of the four quote styles; the opening quote is
    /// at the cursor. `allow_long` is false for N-Triples.
    pub fn read_string(&mut self, allow_long: bool) -> Scan<String> {
        let start = self.pos;
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.unexpected("a string")),
        };
        let long = allow_long && self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        if !allow_long && quote == '\'' {
            return Err(self.unexpected("`\"`"));
        }
        self.pos += if long { 3 } else { 1 };
        let mut out = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(self.syntax(start, "unterminated string literal")),
                Some('\\') => out.push(self.read_escape(at)?),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        // a run of more than three quotes closes on the last three
                        let mut extra = 0;
                        while self.peek_at(2 + extra) == Some(quote) {
                            extra += 1;
                        }
                        for _ in 0..extra {
                            out.push(quote);
                        }
                        self.pos += 2 + extra;
                        return Ok(out);
                    }
                    out.push(c);
                }
                Some(c @ ('\n' | '\r')) if !long => {
                    return Err(self.syntax(at, format!("{} inside a string literal", describe(c))))
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn read_escape(&mut self, start: usize) -> Scan<char> {
        let c = match self.peek() {
            Some('t') => '\t',
            Some('b') => '\u{8}',
            Some('n') => '\n',
            Some('r') => '\r',
            Some('f') => '\u{c}',
            Some('"') => '"',
            Some('\'') => '\'',
            Some('\\') => '\\',
            Some('u' | 'U') => return self.read_uchar(start),
            _ => return Err(self.syntax(start, "invalid escape sequence")),
        };
        self.pos += 1;
        Ok(c)
    }

    /// After `@`: `[a-zA-Z]+ ('-' [a-zA-Z0-9]+)*`.
    pub fn read_langtag(&mut self) -> Scan<String> {
        let start = self.pos;
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphabetic()) {
            out.push(c);
            self.pos += 1;
        }
        if out.is_empty() {
            return Err(self.syntax(start, "empty language tag"));
        }
        while self.peek() == Some('-') && self.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric()) {
            out.push('-');
            self.pos += 1;
            while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric()) {
                out.push(c);
                self.pos += 1;
            }
        }
        Ok(out)
    }

    /// After `_:`: a blank node label.
    pub fn read_blank_label(&mut self) -> Scan<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {}
            _ => return Err(self.unexpected("a blank node label")),
        }
        let mut out = String::new();
        let mut last_good = self.pos;
        while let Some(c) = self.peek() {
            if is_pn_chars(c) || c == '.' {
                out.push(c);
                self.pos += 1;
                if c != '.' {
                    last_good = self.pos;
                }
            } else {
                break;
            }
        }
        let trailing = self.pos - last_good;
        out.truncate(out.len() - trailing);
        self.pos = last_good;
        debug_assert!(self.pos > start);
        Ok(out)
    }
}

pub(crate) fn describe(c: char) -> String {
    match c {
        '\n' => "line break".into(),
        '\r' => "carriage return".into(),
        '\t' => "tab".into(),
        c if c.is_control() => format!("control character U+{:04X}", c as u32),
        c => format!("character `{c}`"),
    }
}

pub(crate) fn iri_char_allowed(c: char) -> bool {
    !(c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}

pub(crate) fn is_pn_chars_base(c: char) -> bool {
    let u = c as u32;
    c.is_ascii_alphabetic()
        || (0xC0..=0xD6).contains(&u)
        || (0xD8..=0xF6).contains(&u)
        || (0xF8..=0x2FF).contains(&u)
        || (0x370..=0x37D).contains(&u)
        || (0x37F..=0x1FFF).contains(&u)
        || (0x200C..=0x200D).contains(&u)
        || (0x2070..=0x218F).contains(&u)
        || (0x2C00..=0x2FEF).contains(&u)
        || (0x3001..=0xD7FF).contains(&u)
        || (0xF900..=0xFDCF).contains(&u)
        || (0xFDF0..=0xFFFD).contains(&u)
        || (0x10000..=0xEFFFF).contains(&u)
}

pub(crate) fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

pub(crate) fn is_pn_chars(c: char) -> bool {
    let u = c as u32;
    is_pn_chars_u(c)
        || c == '-'
        || c.is_ascii_digit()
        || u == 0xB7
        || (0x300..=0x36F).contains(&u)
        || (0x203F..=0x2040).contains(&u)
}

/// Characters a local name may carry after a backslash.
pub(crate) fn is_local_escapable(c: char) -> bool {
    matches!(
        c,
        '_' | '~' | '.' | '-' | '!' | '$' | '&' | '\'' | '(' | ')' | '*' | '+' | ',' | ';' | '='
            | '/' | '?' | '#' | '@' | '%'
    )
}

/// Whether `label` is a valid PN_PREFIX (or empty).
pub(crate) fn is_valid_prefix_label(label: &str) -> bool {
    let chars: Vec<char> = label.chars().collect();
    match chars.as_slice() {
        [] => true,
        [first, rest @ ..] => {
            is_pn_chars_base(*first)
                && rest.iter().all(|&c| is_pn_chars(c) || c == '.')
                && rest.last().is_none_or(|&c| c != '.')
        }
    }
}

/// Whether `local` can be written as a PN_LOCAL without backslash escapes.
pub(crate) fn is_plain_local_name(local: &str) -> bool {
    let chars: Vec<char> = local.chars().collect();
    if chars.is_empty() {
        return true;
    }
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let ok = if c == '%' {
            let hex = chars.get(i + 1).is_some_and(|c| c.is_ascii_hexdigit())
                && chars.get(i + 2).is_some_and(|c| c.is_ascii_hexdigit());
            if hex {
                i += 2;
            }
            hex
        } else if i == 0 {
            is_pn_chars_u(c) || c == ':' || c.is_ascii_digit()
        } else {
            is_pn_chars(c) || c == '.' || c == ':'
        };
        if !ok {
            return false;
        }
        i += 1;
    }
    chars.last() != Some(&'.')
}
