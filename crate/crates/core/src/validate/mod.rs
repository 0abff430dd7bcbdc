//! Native shape rules over PKO graphs.
//!
//! Each rule is a pure function from the graph to findings. Type tests see
//! through the class hierarchy (PKO's own axioms plus any `rdfs:subClassOf`
//! edges in the data) without materializing it.

mod rules;

use std::fmt::Write as _;

use serde::Serialize;

use crate::model::OrderMode;
use crate::store::{Graph, SchemaHierarchy};
use crate::term::RdfTerm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Violation,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Violation => "violation",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Finding {
    pub rule: String,
    /// IRI of the offending node, or `_:label` for a blank node.
    pub focus: String,
    pub message: String,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    fn from_findings(mut findings: Vec<Finding>) -> Self {
        findings.sort();
        findings.dedup();
        let conforms = findings.iter().all(|f| f.severity != Severity::Violation);
        ValidationReport { conforms, findings }
    }

    pub fn violations(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Violation)
    }

    /// Rule ids with at least one finding, sorted and unique.
    pub fn rule_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.findings.iter().map(|f| f.rule.as_str()).collect();
        ids.dedup();
        ids
    }

    /// Pretty JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }

    /// One line per finding, aligned into columns, then a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = |f: fn(&Finding) -> usize| self.findings.iter().map(f).max().unwrap_or(0);
        let sev_w = width(|f| f.severity.as_str().len());
        let focus_w = width(|f| f.focus.len());
        for f in &self.findings {
            let _ = writeln!(
                out,
                "{}  {:sev_w$}  {:focus_w$}  {}",
                f.rule,
                f.severity.as_str(),
                f.focus,
                f.message
            );
        }
        let violations = self.violations().count();
        let _ = writeln!(
            out,
            "{}: {} violation(s), {} warning(s)",
            if self.conforms { "conforms" } else { "does not conform" },
            violations,
            self.findings.len() - violations
        );
        out
    }
}

pub(crate) struct Context<'g> {
    pub graph: &'g Graph,
    pub schema: SchemaHierarchy,
    pub order: OrderMode,
}

type Check = fn(&Context<'_>, &mut Vec<Finding>);

#[derive(Clone, Copy)]
pub struct Rule {
    pub id: &'static str,
    pub description: &'static str,
    pub severity: Severity,
    check: Check,
}

impl std::fmt::Debug for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Rule")
            .field("id", &self.id)
            .field("severity", &self.severity)
            .finish()
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

pub fn builtin_rules() -> Vec<Rule> {
    rules::CATALOG
        .iter()
        .map(|&(id, description, severity, check)| Rule {
            id,
            description,
            severity,
            check,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule id `{0}`")]
pub struct UnknownRule(pub String);

/// Selects builtin rules from a list of ids, one per line (`#` comments and
/// blank lines ignored).
pub fn rules_from_list(text: &str) -> Result<Vec<Rule>, UnknownRule> {
    let all = builtin_rules();
    let mut out = Vec::new();
    for line in text.lines() {
        let id = line.split('#').next().unwrap_or("").trim();
        if id.is_empty() {
            continue;
        }
        let rule = all
            .iter()
            .find(|r| r.id.eq_ignore_ascii_case(id))
            .ok_or_else(|| UnknownRule(id.to_string()))?;
        if !out.contains(rule) {
            out.push(*rule);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidationOptions {
    /// Under [`OrderMode::Partial`] branching step order (R02) is accepted.
    pub order: OrderMode,
}

pub fn validate(g: &Graph, rules: &[Rule]) -> ValidationReport {
    validate_with(g, rules, ValidationOptions::default())
}

pub fn validate_with(g: &Graph, rules: &[Rule], opts: ValidationOptions) -> ValidationReport {
    let mut schema = SchemaHierarchy::pko();
    schema.merge(&SchemaHierarchy::from_graph(g));
    let ctx = Context {
        graph: g,
        schema,
        order: opts.order,
    };
    let mut findings = Vec::new();
    for rule in rules {
        (rule.check)(&ctx, &mut findings);
    }
    ValidationReport::from_findings(findings)
}

pub(crate) fn focus_of(term: &RdfTerm) -> String {
    match term {
        RdfTerm::Iri(i) => i.to_string(),
        RdfTerm::Blank(b) => format!("_:{b}"),
        RdfTerm::Literal(l) => format!("{:?}", l.lexical()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_fifteen_unique_rules() {
        let rules = builtin_rules();
        assert_eq!(rules.len(), 15);
        let ids: std::collections::BTreeSet<_> = rules.iter().map(|r| r.id).collect();
        assert_eq!(ids.len(), 15);
        assert_eq!(rules[0].id, "R01");
        assert_eq!(rules[14].id, "R15");
    }

    #[test]
    fn empty_graph_conforms() {
        let report = validate(&Graph::new(), &builtin_rules());
        assert!(report.conforms);
        assert!(report.findings.is_empty());
    }

    #[test]
    fn rule_list_parsing() {
        let rules = rules_from_list("R01\n# comment\nr04  # multisteps\n\nR01\n").unwrap();
        assert_eq!(rules.iter().map(|r| r.id).collect::<Vec<_>>(), ["R01", "R04"]);
        assert_eq!(rules_from_list("R99"), Err(UnknownRule("R99".into())));
    }

    #[test]
    fn json_keys_sorted() {
        let report = ValidationReport::from_findings(vec![Finding {
            rule: "R04".into(),
            focus: "https://example.org/m".into(),
            message: "x".into(),
            severity: Severity::Violation,
        }]);
        let json = report.to_json();
        let f = json.find("\"focus\"").unwrap();
        let m = json.find("\"message\"").unwrap();
        let r = json.find("\"rule\"").unwrap();
        let s = json.find("\"severity\"").unwrap();
        assert!(f < m && m < r && r < s);
        assert!(json.find("\"conforms\"").unwrap() < json.find("\"findings\"").unwrap());
    }
}
