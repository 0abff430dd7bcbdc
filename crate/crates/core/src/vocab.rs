//! Identifiers, namespace prefixes and the vocabulary catalog.
//!
//! Every ontology symbol used elsewhere in the crate is declared here as a
//! [`Term`] constant and backed by an entry in the shipped catalog file
//! (`data/terms.txt`). The PKO namespaces default to
//! `https://w3id.org/pko#` and `https://w3id.org/pko/ind#` and can be
//! replaced once per process with [`configure_namespaces`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const DEFAULT_PKO_NS: &str = "https://w3id.org/pko#";
pub const DEFAULT_PKO_IND_NS: &str = "https://w3id.org/pko/ind#";

const CATALOG_TEXT: &str = include_str!("../data/terms.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabError {
    #[error("unknown prefix `{0}`")]
    UnknownPrefix(String),
    #[error("`{0}` is not a prefixed name")]
    MalformedName(String),
    #[error("invalid IRI `{iri}`: {reason}")]
    InvalidIri { iri: String, reason: &'static str },
    #[error("catalog line {line}: {message}")]
    Catalog { line: usize, message: String },
    #[error("namespaces were already configured")]
    AlreadyConfigured,
}

/// An absolute IRI. Equality is byte equality of the string form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, VocabError> {
        let value = value.as_ref();
        if let Some(reason) = iri_defect(value) {
            return Err(VocabError::InvalidIri {
                iri: value.to_string(),
                reason,
            });
        }
        Ok(Iri(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn iri_defect(value: &str) -> Option<&'static str> {
    if value.is_empty() {
        return Some("empty");
    }
    let lower = value.get(..4).map(|s| s.to_ascii_lowercase());
    if !value.contains("://") && lower.as_deref() != Some("urn:") {
        return Some("missing scheme separator");
    }
    let scheme_end = value.find(':').unwrap_or(0);
    let scheme = &value[..scheme_end];
    if scheme.is_empty()
        || !scheme.starts_with(|c: char| c.is_ascii_alphabetic())
        || !scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
    {
        return Some("bad scheme");
    }
    if value
        .chars()
        .any(|c| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Some("forbidden character");
    }
    None
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Iri::new(s).map_err(serde::de::Error::custom)
    }
}

/// Mapping from prefix label (possibly empty) to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, Iri>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `label`, returning the previous namespace if the label was bound.
    pub fn insert(&mut self, label: impl Into<String>, namespace: Iri) -> Option<Iri> {
        self.entries.insert(label.into(), namespace)
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.entries.get(label)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Adds every binding of `other` whose label is not already bound here.
    pub fn extend_missing(&mut self, other: &PrefixMap) {
        for (label, ns) in other.iter() {
            self.entries
                .entry(label.to_string())
                .or_insert_with(|| ns.clone());
        }
    }

    /// Expands `label:local` to the bound namespace followed by `local`.
    pub fn expand(&self, name: &str) -> Result<Iri, VocabError> {
        let (label, local) = name
            .split_once(':')
            .ok_or_else(|| VocabError::MalformedName(name.to_string()))?;
        if local.contains(':') && local.starts_with("//") {
            return Err(VocabError::MalformedName(name.to_string()));
        }
        let ns = self
            .entries
            .get(label)
            .ok_or_else(|| VocabError::UnknownPrefix(label.to_string()))?;
        Iri::new(format!("{}{}", ns.as_str(), local))
    }

    /// Longest matching namespace, as `(label, local part)`. Ties on
    /// namespace length go to the smallest label.
    pub fn split<'a>(&'a self, iri: &'a Iri) -> Option<(&'a str, &'a str)> {
        let mut best: Option<(&str, &Iri)> = None;
        for (label, ns) in &self.entries {
            if iri.as_str().starts_with(ns.as_str())
                && best.is_none_or(|(_, b)| ns.as_str().len() > b.as_str().len())
            {
                best = Some((label, ns));
            }
        }
        best.map(|(label, ns)| (label, &iri.as_str()[ns.as_str().len()..]))
    }

    /// Prefixed name for `iri`, or `<iri>` when no namespace matches.
    pub fn shrink(&self, iri: &Iri) -> String {
        match self.split(iri) {
            Some((label, local)) => format!("{label}:{local}"),
            None => format!("<{iri}>"),
        }
    }
}

/// PKO namespaces in effect for this process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namespaces {
    pub pko: Iri,
    pub pko_ind: Iri,
}

impl Default for Namespaces {
    fn default() -> Self {
        Namespaces {
            pko: Iri::new(DEFAULT_PKO_NS).unwrap(),
            pko_ind: Iri::new(DEFAULT_PKO_IND_NS).unwrap(),
        }
    }
}

static NAMESPACES: OnceLock<Namespaces> = OnceLock::new();

/// Overrides the PKO namespaces. Must run before any term is resolved.
pub fn configure_namespaces(ns: Namespaces) -> Result<(), VocabError> {
    NAMESPACES
        .set(ns)
        .map_err(|_| VocabError::AlreadyConfigured)
}

pub fn namespaces() -> &'static Namespaces {
    NAMESPACES.get_or_init(Namespaces::default)
}

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

/// The standard bindings: pko, pko-ind, the reused ontologies, and rdf/rdfs/xsd.
pub fn default_prefixes() -> PrefixMap {
    let ns = namespaces();
    let mut map = PrefixMap::new();
    map.insert("pko", ns.pko.clone());
    map.insert("pko-ind", ns.pko_ind.clone());
    for (label, iri) in [
        ("pplan", "http://purl.org/net/p-plan#"),
        ("prov", "http://www.w3.org/ns/prov#"),
        ("dcat", "http://www.w3.org/ns/dcat#"),
        ("dct", "http://purl.org/dc/terms/"),
        ("time", "http://www.w3.org/2006/time#"),
        ("adms", "http://www.w3.org/ns/adms#"),
        ("m4ing", "http://w3id.org/nfdi4ing/metadata4ing#"),
        ("pro", "http://purl.org/spar/pro/"),
        ("rdf", RDF_NS),
        ("rdfs", RDFS_NS),
        ("xsd", XSD_NS),
    ] {
        map.insert(label, Iri::new(iri).unwrap());
    }
    map
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    Class,
    ObjectProperty,
    DatatypeProperty,
    Individual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Published,
    Provisional,
    Extension,
    Standard,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabTerm {
    pub curie: String,
    pub iri: Iri,
    pub kind: TermKind,
    pub provenance: Provenance,
    pub vocabulary: Option<String>,
}

/// A named, ordered set of individuals (e.g. procedure statuses).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlledVocab {
    pub name: String,
    pub members: Vec<Iri>,
}

impl ControlledVocab {
    pub fn contains(&self, iri: &Iri) -> bool {
        self.members.contains(iri)
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    terms: Vec<VocabTerm>,
    by_curie: HashMap<String, usize>,
    by_iri: HashMap<Iri, usize>,
}

impl Catalog {
    pub fn parse(text: &str, prefixes: &PrefixMap) -> Result<Self, VocabError> {
        let mut terms = Vec::new();
        let mut by_curie = HashMap::new();
        let mut by_iri = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            // `#` also appears inside curies only when a namespace is inlined,
            // which the catalog never does.
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(VocabError::Catalog {
                    line,
                    message: format!("expected 3 or 4 fields, found {}", fields.len()),
                });
            }
            let err = |message: String| VocabError::Catalog { line, message };
            let iri = prefixes.expand(fields[0]).map_err(|e| err(e.to_string()))?;
            let kind = match fields[1] {
                "class" => TermKind::Class,
                "object-property" => TermKind::ObjectProperty,
                "datatype-property" => TermKind::DatatypeProperty,
                "individual" => TermKind::Individual,
                other => return Err(err(format!("unknown kind `{other}`"))),
            };
            let provenance = match fields[2] {
                "published" => Provenance::Published,
                "provisional" => Provenance::Provisional,
                "extension" => Provenance::Extension,
                "standard" => Provenance::Standard,
                other => return Err(err(format!("unknown provenance `{other}`"))),
            };
            if by_curie.contains_key(fields[0]) {
                return Err(err(format!("duplicate term `{}`", fields[0])));
            }
            by_curie.insert(fields[0].to_string(), terms.len());
            by_iri.insert(iri.clone(), terms.len());
            terms.push(VocabTerm {
                curie: fields[0].to_string(),
                iri,
                kind,
                provenance,
                vocabulary: fields.get(3).map(|s| s.to_string()),
            });
        }
        Ok(Catalog {
            terms,
            by_curie,
            by_iri,
        })
    }

    pub fn terms(&self) -> &[VocabTerm] {
        &self.terms
    }

    pub fn get(&self, curie: &str) -> Option<&VocabTerm> {
        self.by_curie.get(curie).map(|&i| &self.terms[i])
    }

    pub fn by_iri(&self, iri: &Iri) -> Option<&VocabTerm> {
        self.by_iri.get(iri).map(|&i| &self.terms[i])
    }

    pub fn contains_iri(&self, iri: &Iri) -> bool {
        self.by_iri.contains_key(iri)
    }

    pub fn vocabulary(&self, name: &str) -> ControlledVocab {
        ControlledVocab {
            name: name.to_string(),
            members: self
                .terms
                .iter()
                .filter(|t| t.vocabulary.as_deref() == Some(name))
                .map(|t| t.iri.clone())
                .collect(),
        }
    }
}

static CATALOG: OnceLock<Catalog> = OnceLock::new();

/// The shipped term catalog, expanded under the configured namespaces.
pub fn catalog() -> &'static Catalog {
    CATALOG.get_or_init(|| {
        Catalog::parse(CATALOG_TEXT, &default_prefixes()).expect("shipped catalog is well-formed")
    })
}

pub fn catalog_text() -> &'static str {
    CATALOG_TEXT
}

pub fn procedure_statuses() -> ControlledVocab {
    catalog().vocabulary("ProcedureStatus")
}

pub fn execution_statuses() -> ControlledVocab {
    catalog().vocabulary("ProcedureExecutionStatus")
}

/// A vocabulary symbol referenced from code, named by its curie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term(&'static str);

impl Term {
    pub const fn new(curie: &'static str) -> Self {
        Term(curie)
    }

    pub fn curie(&self) -> &'static str {
        self.0
    }

    pub fn iri(&self) -> Iri {
        match catalog().get(self.0) {
            Some(t) => t.iri.clone(),
            None => default_prefixes()
                .expand(self.0)
                .unwrap_or_else(|e| panic!("term {}: {e}", self.0)),
        }
    }

    pub fn is(&self, iri: &Iri) -> bool {
        *iri == self.iri()
    }
}

pub mod pko {
    use super::Term;

    pub const PROCEDURE: Term = Term::new("pko:Procedure");
    pub const PROCEDURE_TYPE: Term = Term::new("pko:ProcedureType");
    pub const PROCEDURE_STATUS: Term = Term::new("pko:ProcedureStatus");
    pub const ACTION: Term = Term::new("pko:Action");
    pub const FUNCTION: Term = Term::new("pko:Function");
    pub const STEP_VERIFICATION: Term = Term::new("pko:StepVerification");
    pub const EXPERTISE_LEVEL: Term = Term::new("pko:ExpertiseLevel");
    pub const PROCEDURE_EXECUTION: Term = Term::new("pko:ProcedureExecution");
    pub const STEP_EXECUTION: Term = Term::new("pko:StepExecution");
    pub const PROCEDURE_EXECUTION_STATUS: Term = Term::new("pko:ProcedureExecutionStatus");
    pub const USER_FEEDBACK_OCCURRENCE: Term = Term::new("pko:UserFeedbackOccurrence");
    pub const USER_QUESTION_OCCURRENCE: Term = Term::new("pko:UserQuestionOccurrence");
    pub const ISSUE_OCCURRENCE: Term = Term::new("pko:IssueOccurrence");
    pub const ERROR: Term = Term::new("pko:Error");

    pub const HAS_STEP: Term = Term::new("pko:hasStep");
    pub const NEXT_STEP: Term = Term::new("pko:nextStep");
    pub const PREVIOUS_STEP: Term = Term::new("pko:previousStep");
    pub const HAS_VERSION: Term = Term::new("pko:hasVersion");
    pub const NEXT_VERSION: Term = Term::new("pko:nextVersion");
    pub const PREVIOUS_VERSION: Term = Term::new("pko:previousVersion");
    pub const HAS_PROCEDURE_STATUS: Term = Term::new("pko:hasProcedureStatus");
    pub const HAS_PROCEDURE_TYPE: Term = Term::new("pko:hasProcedureType");
    pub const HAS_PROCEDURE_TARGET: Term = Term::new("pko:hasProcedureTarget");
    pub const REQUIRES_ACTION: Term = Term::new("pko:requiresAction");
    pub const REQUIRES_FUNCTION: Term = Term::new("pko:requiresFunction");
    pub const REQUIRES_TOOL: Term = Term::new("pko:requiresTool");
    pub const HAS_STEP_VERIFICATION: Term = Term::new("pko:hasStepVerification");
    pub const HAS_EXPERTISE_LEVEL: Term = Term::new("pko:hasExpertiseLevel");
    pub const HAS_EXECUTION_STATUS: Term = Term::new("pko:hasExecutionStatus");
    pub const EXECUTES: Term = Term::new("pko:executes");
    pub const HAS_FALLBACK_STEP: Term = Term::new("pko:hasFallbackStep");
    pub const ADDRESSED_BY: Term = Term::new("pko:addressedBy");
    pub const WAS_EXTRACTED_FROM: Term = Term::new("pko:wasExtractedFrom");
    pub const ADOPTED_BY: Term = Term::new("pko:adoptedBy");
    pub const HAS_EXPECTED_DURATION: Term = Term::new("pko:hasExpectedDuration");
    pub const HAS_STEP_EXECUTION: Term = Term::new("pko:hasStepExecution");
    pub const HAS_OCCURRENCE: Term = Term::new("pko:hasOccurrence");
    pub const FEEDBACK_ON: Term = Term::new("pko:feedbackOn");
    pub const REFERS_TO_ERROR: Term = Term::new("pko:refersToError");
    pub const HAS_POTENTIAL_ERROR: Term = Term::new("pko:hasPotentialError");
    pub const ERROR_CODE: Term = Term::new("pko:errorCode");
    pub const ISSUE_CAUSE: Term = Term::new("pko:issueCause");
    pub const ISSUE_SOLUTION: Term = Term::new("pko:issueSolution");

    pub const DRAFT: Term = Term::new("pko:draft");
    pub const APPROVED: Term = Term::new("pko:approved");
    pub const ARCHIVED: Term = Term::new("pko:archived");
    pub const PUBLISHED: Term = Term::new("pko:published");
    pub const DEPRECATED: Term = Term::new("pko:deprecated");
    pub const IN_PROGRESS: Term = Term::new("pko:inProgress");
    pub const COMPLETED: Term = Term::new("pko:completed");
    pub const SCHEDULED: Term = Term::new("pko:scheduled");
    pub const ABORTED: Term = Term::new("pko:aborted");
    pub const FAILED: Term = Term::new("pko:failed");
}

pub mod pko_ind {
    use super::Term;

    pub const MACHINE: Term = Term::new("pko-ind:Machine");
    pub const DEVICE: Term = Term::new("pko-ind:Device");
    pub const MACHINE_TYPE: Term = Term::new("pko-ind:MachineType");
    pub const LOCATION: Term = Term::new("pko-ind:Location");
    pub const FACTORY: Term = Term::new("pko-ind:Factory");
    pub const PPE: Term = Term::new("pko-ind:PersonalProtectiveEquipment");
    pub const PADLOCK: Term = Term::new("pko-ind:Padlock");
    pub const STANDARD_PADLOCK: Term = Term::new("pko-ind:StandardPadlock");
    pub const ENERGY_SOURCE: Term = Term::new("pko-ind:EnergySource");
    pub const ELECTRICAL_ENERGY: Term = Term::new("pko-ind:ElectricalEnergy");
    pub const HYDRAULIC_ENERGY: Term = Term::new("pko-ind:HydraulicEnergy");

    pub const REQUIRES_PPE: Term = Term::new("pko-ind:requiresPPE");
    pub const REQUIRES_PADLOCK: Term = Term::new("pko-ind:requiresPadlock");
    pub const WAS_MANUFACTURED_BY: Term = Term::new("pko-ind:wasManufacturedBy");
    pub const HAS_MACHINE_TYPE: Term = Term::new("pko-ind:hasMachineType");
    pub const HAS_LOCATION: Term = Term::new("pko-ind:hasLocation");
    pub const ISOLATES_ENERGY_SOURCE: Term = Term::new("pko-ind:isolatesEnergySource");
}

pub mod pplan {
    use super::Term;

    pub const STEP: Term = Term::new("pplan:Step");
    pub const MULTI_STEP: Term = Term::new("pplan:MultiStep");
    pub const PLAN: Term = Term::new("pplan:Plan");
    pub const CORRESPONDS_TO_STEP: Term = Term::new("pplan:correspondsToStep");
}

pub mod prov {
    use super::Term;

    pub const AGENT: Term = Term::new("prov:Agent");
    pub const ORGANIZATION: Term = Term::new("prov:Organization");
    pub const ACTIVITY: Term = Term::new("prov:Activity");
    pub const WAS_ASSOCIATED_WITH: Term = Term::new("prov:wasAssociatedWith");
    pub const STARTED_AT_TIME: Term = Term::new("prov:startedAtTime");
    pub const ENDED_AT_TIME: Term = Term::new("prov:endedAtTime");
    pub const AT_TIME: Term = Term::new("prov:atTime");
}

pub mod dct {
    use super::Term;

    pub const PERIOD_OF_TIME: Term = Term::new("dct:PeriodOfTime");
    pub const REFERENCES: Term = Term::new("dct:references");
    pub const TITLE: Term = Term::new("dct:title");
    pub const DESCRIPTION: Term = Term::new("dct:description");
    pub const TEMPORAL: Term = Term::new("dct:temporal");
}

pub mod dcat {
    use super::Term;

    pub const RESOURCE: Term = Term::new("dcat:Resource");
    pub const START_DATE: Term = Term::new("dcat:startDate");
    pub const END_DATE: Term = Term::new("dcat:endDate");
}

pub mod time {
    use super::Term;

    pub const DURATION: Term = Term::new("time:Duration");
    pub const NUMERIC_DURATION: Term = Term::new("time:numericDuration");
    pub const UNIT_TYPE: Term = Term::new("time:unitType");
    pub const UNIT_SECOND: Term = Term::new("time:unitSecond");
}

pub mod m4ing {
    use super::Term;

    pub const TOOL: Term = Term::new("m4ing:Tool");
}

pub mod pro {
    use super::Term;

    pub const ROLE: Term = Term::new("pro:Role");
    pub const ROLE_IN_TIME: Term = Term::new("pro:RoleInTime");
    pub const WITH_ROLE: Term = Term::new("pro:withRole");
    pub const RELATES_TO_DOCUMENT: Term = Term::new("pro:relatesToDocument");
    pub const HOLDS_ROLE_IN_TIME: Term = Term::new("pro:holdsRoleInTime");
}

pub mod rdf {
    use super::Term;

    pub const TYPE: Term = Term::new("rdf:type");
    pub const LANG_STRING: Term = Term::new("rdf:langString");
}

pub mod rdfs {
    use super::Term;

    pub const SUB_CLASS_OF: Term = Term::new("rdfs:subClassOf");
}

pub mod xsd {
    use super::Term;

    pub const STRING: Term = Term::new("xsd:string");
    pub const BOOLEAN: Term = Term::new("xsd:boolean");
    pub const INTEGER: Term = Term::new("xsd:integer");
    pub const DECIMAL: Term = Term::new("xsd:decimal");
    pub const DOUBLE: Term = Term::new("xsd:double");
    pub const DATE_TIME: Term = Term::new("xsd:dateTime");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_default_namespace() {
        let p = default_prefixes();
        let expected = format!("{}{}", "https://w3id.org/pko#", "Procedure");
        assert_eq!(p.expand("pko:Procedure").unwrap().as_str(), expected);
    }

    #[test]
    fn expand_empty_label() {
        let mut p = PrefixMap::new();
        p.insert("", Iri::new("http://ex.org/").unwrap());
        assert_eq!(p.expand(":x").unwrap().as_str(), "http://ex.org/x");
    }

    #[test]
    fn expand_unknown_prefix() {
        assert_eq!(
            default_prefixes().expand("foo:bar"),
            Err(VocabError::UnknownPrefix("foo".into()))
        );
        assert!(matches!(
            default_prefixes().expand("nocolon"),
            Err(VocabError::MalformedName(_))
        ));
    }

    #[test]
    fn shrink_longest_match() {
        let p = default_prefixes();
        let step = Iri::new("https://w3id.org/pko#Step").unwrap();
        assert_eq!(p.shrink(&step), "pko:Step");
        let padlock = Iri::new("https://w3id.org/pko/ind#Padlock").unwrap();
        assert_eq!(p.shrink(&padlock), "pko-ind:Padlock");
        let z = Iri::new("http://unmapped.example/z").unwrap();
        assert_eq!(p.shrink(&z), "<http://unmapped.example/z>");

        let mut nested = PrefixMap::new();
        nested.insert("a", Iri::new("http://e.org/").unwrap());
        nested.insert("b", Iri::new("http://e.org/deep/").unwrap());
        let x = Iri::new("http://e.org/deep/x").unwrap();
        assert_eq!(nested.shrink(&x), "b:x");
    }

    #[test]
    fn shrink_inverts_expand_over_catalog() {
        let p = default_prefixes();
        for term in catalog().terms() {
            let iri = p.expand(&term.curie).unwrap();
            assert_eq!(iri, term.iri);
            assert_eq!(p.shrink(&iri), term.curie);
        }
    }

    #[test]
    fn default_prefix_lookups() {
        let p = default_prefixes();
        assert_eq!(p.get("pplan").unwrap().as_str(), "http://purl.org/net/p-plan#");
        assert_eq!(
            p.get("m4ing").unwrap().as_str(),
            "http://w3id.org/nfdi4ing/metadata4ing#"
        );
        let listed = [
            "pko", "pko-ind", "pplan", "prov", "dcat", "dct", "time", "adms", "m4ing", "pro",
            "rdf", "rdfs", "xsd",
        ];
        assert_eq!(p.len(), listed.len());
        for label in listed {
            assert!(p.get(label).is_some(), "{label}");
        }
    }

    #[test]
    fn iri_validation() {
        assert!(Iri::new("").is_err());
        assert!(Iri::new("relative/path").is_err());
        assert!(Iri::new("http://a b").is_err());
        assert!(Iri::new("urn:uuid:1234").is_ok());
        assert!(Iri::new("https://w3id.org/pko#x").is_ok());
    }

    #[test]
    fn controlled_vocabularies() {
        let ps = procedure_statuses();
        for t in [pko::DRAFT, pko::APPROVED, pko::ARCHIVED] {
            assert!(ps.contains(&t.iri()));
        }
        let es = execution_statuses();
        for t in [pko::IN_PROGRESS, pko::COMPLETED] {
            assert!(es.contains(&t.iri()));
        }
        assert!(!es.contains(&pko::DRAFT.iri()));
        let ext: Vec<_> = catalog()
            .terms()
            .iter()
            .filter(|t| t.provenance == Provenance::Extension)
            .map(|t| t.curie.as_str())
            .collect();
        assert_eq!(
            ext,
            ["pko:published", "pko:deprecated", "pko:scheduled", "pko:aborted", "pko:failed"]
        );
    }

    #[test]
    fn catalog_rejects_bad_lines() {
        let p = default_prefixes();
        assert!(matches!(
            Catalog::parse("pko:X class", &p),
            Err(VocabError::Catalog { line: 1, .. })
        ));
        assert!(matches!(
            Catalog::parse("pko:X thing published", &p),
            Err(VocabError::Catalog { .. })
        ));
        assert!(matches!(
            Catalog::parse("pko:X class published\npko:X class published", &p),
            Err(VocabError::Catalog { line: 2, .. })
        ));
    }
}
