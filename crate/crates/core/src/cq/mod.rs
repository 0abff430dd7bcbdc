//! Competency questions as parameterized conjunctive patterns.
//!
//! A query is a list of atoms `s p o` over variables and constants, where an
//! atom may walk one or more `p` links (`p*`). Answers are deduplicated and
//! sorted, so a [`ResultTable`] is a deterministic function of the graph.

mod eval;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde_json::{json, Value};

use crate::term::RdfTerm;
use crate::vocab::{catalog as vocab_catalog, default_prefixes, rdf, Iri, PrefixMap};

pub use eval::{run, run_in_order};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(String),
    Const(RdfTerm),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub subject: PatternTerm,
    pub predicate: Iri,
    /// Walk one or more `predicate` links instead of exactly one.
    pub transitive: bool,
    pub object: PatternTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetencyQuery {
    pub id: String,
    pub question: String,
    pub parameters: Vec<String>,
    pub select: Vec<String>,
    pub pattern: Vec<Atom>,
}

impl CompetencyQuery {
    pub fn variables(&self) -> BTreeSet<&str> {
        self.pattern
            .iter()
            .flat_map(|a| [a.subject.var(), a.object.var()])
            .flatten()
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("unknown query `{0}`")]
    UnknownQuery(String),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("`{0}` is not a parameter of this query")]
    UnknownParameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("query catalog line {line}: {message}")]
pub struct CatalogError {
    pub line: usize,
    pub message: String,
}

pub type Bindings = BTreeMap<String, RdfTerm>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<RdfTerm>>,
}

impl ResultTable {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Values of one column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<&RdfTerm>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    /// Header line of column names, then one line per row with cells in
    /// N-Triples term syntax.
    pub fn to_tsv(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|t| t.to_string().replace('\t', "\\t")).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [{column: term}]}` with terms encoded as
    /// in the SPARQL JSON results format.
    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let cells: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(term_json))
                    .collect();
                Value::Object(cells)
            })
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json_value()).expect("table serializes");
        out.push('\n');
        out
    }
}

pub fn term_json(t: &RdfTerm) -> Value {
    match t {
        RdfTerm::Iri(i) => json!({ "type": "uri", "value": i.as_str() }),
        RdfTerm::Blank(b) => json!({ "type": "bnode", "value": b }),
        RdfTerm::Literal(l) => match l.language() {
            Some(lang) => json!({ "type": "literal", "value": l.lexical(), "xml:lang": lang }),
            None => json!({ "type": "literal", "value": l.lexical(), "datatype": l.datatype().as_str() }),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryCatalog {
    queries: Vec<CompetencyQuery>,
}

const CATALOG_TEXT: &str = include_str!("../../data/cq.txt");

/// The shipped catalog of competency questions.
pub fn catalog() -> &'static QueryCatalog {
    static CATALOG: OnceLock<QueryCatalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        QueryCatalog::parse(CATALOG_TEXT, &default_prefixes()).expect("shipped query catalog is well-formed")
    })
}

pub fn catalog_text() -> &'static str {
    CATALOG_TEXT
}

impl QueryCatalog {
    pub fn queries(&self) -> &[CompetencyQuery] {
        &self.queries
    }

    pub fn get(&self, id: &str) -> Result<&CompetencyQuery, QueryError> {
        self.queries
            .iter()
            .find(|q| q.id.eq_ignore_ascii_case(id))
            .ok_or_else(|| QueryError::UnknownQuery(id.to_string()))
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn parse(text: &str, prefixes: &PrefixMap) -> Result<Self, CatalogError> {
        let mut queries: Vec<CompetencyQuery> = Vec::new();
        let mut block: Vec<(usize, &str)> = Vec::new();
        let lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        for (n, line) in lines.chain(std::iter::once((0, ""))) {
            let trimmed = line.trim();
            if trimmed.starts_with('#') {
                continue;
            }
            if trimmed.is_empty() {
                if !block.is_empty() {
                    let q = parse_block(&block, prefixes)?;
                    if queries.iter().any(|o| o.id == q.id) {
                        return Err(CatalogError {
                            line: block[0].0,
                            message: format!("duplicate query id `{}`", q.id),
                        });
                    }
                    queries.push(q);
                    block.clear();
                }
                continue;
            }
            block.push((n, line));
        }
        Ok(QueryCatalog { queries })
    }
}

fn parse_block(lines: &[(usize, &str)], prefixes: &PrefixMap) -> Result<CompetencyQuery, CatalogError> {
    let err = |line: usize, message: String| CatalogError { line, message };
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut pattern = Vec::new();
    let mut in_pattern = false;
    for &(n, line) in lines {
        if in_pattern && line.starts_with(char::is_whitespace) {
            pattern.push(parse_atom(n, line.trim(), prefixes)?);
            continue;
        }
        in_pattern = false;
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(n, format!("expected `key: value`, found `{}`", line.trim())))?;
        let key = key.trim();
        match key {
            "id" | "question" | "parameters" | "select" => {
                if fields.insert(key, (n, value.trim())).is_some() {
                    return Err(err(n, format!("field `{key}` given twice")));
                }
            }
            "pattern" => {
                if !value.trim().is_empty() {
                    return Err(err(n, "atoms go on the lines after `pattern:`".into()));
                }
                in_pattern = true;
            }
            other => return Err(err(n, format!("unknown field `{other}`"))),
        }
    }
    let first = lines[0].0;
    let field = |k: &str| fields.get(k).copied().ok_or_else(|| err(first, format!("missing field `{k}`")));
    let words = |s: &str| s.split_whitespace().map(|w| w.trim_start_matches('?').to_string()).collect::<Vec<_>>();

    let (_, id) = field("id")?;
    let (_, question) = field("question")?;
    let (pn, params) = fields.get("parameters").copied().unwrap_or((first, ""));
    let (sn, select) = field("select")?;
    if pattern.is_empty() {
        return Err(err(first, format!("query `{id}` has no pattern")));
    }
    let q = CompetencyQuery {
        id: id.to_string(),
        question: question.to_string(),
        parameters: words(params),
        select: words(select),
        pattern,
    };
    let vars = q.variables();
    if let Some(v) = q.select.iter().find(|v| !vars.contains(v.as_str())) {
        return Err(err(sn, format!("selected variable ?{v} does not occur in the pattern")));
    }
    if let Some(v) = q.parameters.iter().find(|v| !vars.contains(v.as_str())) {
        return Err(err(pn, format!("parameter ?{v} does not occur in the pattern")));
    }
    Ok(q)
}

fn parse_atom(n: usize, line: &str, prefixes: &PrefixMap) -> Result<Atom, CatalogError> {
    let err = |message: String| CatalogError { line: n, message };
    let parts: Vec<&str> = line.split_whitespace().collect();
    let [s, p, o] = parts[..] else {
        return Err(err(format!("an atom has three terms, found `{line}`")));
    };
    let iri = |t: &str| -> Result<Iri, CatalogError> {
        if let Some(inner) = t.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            return Iri::new(inner).map_err(|e| err(e.to_string()));
        }
        prefixes.expand(t).map_err(|e| err(e.to_string()))
    };
    let term = |t: &str| -> Result<PatternTerm, CatalogError> {
        if let Some(v) = t.strip_prefix('?') {
            if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(err(format!("bad variable name `{t}`")));
            }
            return Ok(PatternTerm::Var(v.to_string()));
        }
        Ok(PatternTerm::Const(RdfTerm::Iri(iri(t)?)))
    };
    let (p, transitive) = match p.strip_suffix('*') {
        Some(base) => (base, true),
        None => (p, false),
    };
    let predicate = if p == "a" { rdf::TYPE.iri() } else { iri(p)? };
    if !vocab_catalog().contains_iri(&predicate) {
        return Err(err(format!("predicate `{p}` is not a vocabulary term")));
    }
    Ok(Atom {
        subject: term(s)?,
        predicate,
        transitive,
        object: term(o)?,
    })
}
