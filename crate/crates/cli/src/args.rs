//! IRIs and terms as typed by people: `<https://…>`, `https://…`,
//! `pko:Procedure` or `_:b0`.

use pk_forge::term::RdfTerm;
use pk_forge::vocab::{default_prefixes, Iri, PrefixMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{input}` is not an IRI or prefixed name: {reason}")]
pub struct TermError {
    pub input: String,
    pub reason: String,
}

fn absolute(s: &str) -> bool {
    s.contains("://") || s.get(..4).is_some_and(|p| p.eq_ignore_ascii_case("urn:"))
}

pub fn parse_iri_with(text: &str, prefixes: &PrefixMap) -> Result<Iri, TermError> {
    let s = text.trim();
    let err = |reason: String| TermError {
        input: text.to_string(),
        reason,
    };
    if let Some(inner) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
        return Iri::new(inner).map_err(|e| err(e.to_string()));
    }
    if absolute(s) {
        return Iri::new(s).map_err(|e| err(e.to_string()));
    }
    prefixes.expand(s).map_err(|e| err(e.to_string()))
}

/// Resolves against the default prefix map.
pub fn parse_iri(text: &str) -> Result<Iri, TermError> {
    parse_iri_with(text, &default_prefixes())
}

/// An IRI as above, or a blank node label.
pub fn parse_term(text: &str) -> Result<RdfTerm, TermError> {
    match text.trim().strip_prefix("_:") {
        Some(label) if !label.is_empty() => Ok(RdfTerm::Blank(label.into())),
        _ => parse_iri(text).map(RdfTerm::Iri),
    }
}

/// Splits `name=value` for query bindings.
pub fn parse_binding(text: &str) -> Result<(String, RdfTerm), String> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| format!("binding `{text}` is not of the form name=value"))?;
    let k = k.trim().trim_start_matches('?');
    if k.is_empty() {
        return Err(format!("binding `{text}` has no name"));
    }
    Ok((k.to_string(), parse_term(v).map_err(|e| e.to_string())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spellings() {
        let want = Iri::new("https://w3id.org/pko#Procedure").unwrap();
        assert_eq!(parse_iri("pko:Procedure").unwrap(), want);
        assert_eq!(parse_iri("<https://w3id.org/pko#Procedure>").unwrap(), want);
        assert_eq!(parse_iri(" https://w3id.org/pko#Procedure ").unwrap(), want);
        assert!(parse_iri("nope:x").is_err());
        assert!(parse_iri("plain").is_err());
        assert_eq!(parse_term("_:b1").unwrap(), RdfTerm::Blank("b1".into()));
    }

    #[test]
    fn bindings() {
        let (k, v) = parse_binding("?step=https://example.org/s").unwrap();
        assert_eq!(k, "step");
        assert_eq!(v, RdfTerm::Iri(Iri::new("https://example.org/s").unwrap()));
        assert!(parse_binding("step").is_err());
        assert!(parse_binding("=x:y").is_err());
    }
}
