//! Typed views of procedures, steps, executions, agents and machines.
//!
//! Values here are plain data; [`crate::mapper`] moves them to and from
//! triples. Link collections that carry no order are sets of [`Node`]s so a
//! blank resource such as `[ a pko-ind:StandardPadlock ]` can be referenced.

mod order;

use std::collections::BTreeSet;

use chrono::{DateTime, SecondsFormat, Timelike, Utc};

use crate::term::{Literal, Node, Triple};
use crate::vocab::{xsd, Iri};

pub use order::{flatten, order_steps, version_chain, OrderError, OrderMode};

/// UTC instant at second precision.
pub type Timestamp = DateTime<Utc>;

/// `xsd:dateTime` lexical form, e.g. `2024-10-11T12:33:00Z`.
pub fn format_timestamp(t: &Timestamp) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Parses an `xsd:dateTime` with an explicit offset; sub-second digits are
/// dropped.
pub fn parse_timestamp(text: &str) -> Option<Timestamp> {
    let t = DateTime::parse_from_rfc3339(text.trim()).ok()?.with_timezone(&Utc);
    t.with_nanosecond(0)
}

pub fn timestamp_literal(t: &Timestamp) -> Literal {
    Literal::typed(format_timestamp(t), xsd::DATE_TIME.iri())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Atomic,
    MultiStep,
}

/// An expected duration node (`time:Duration`) in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Duration {
    pub node: Node,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Procedure {
    pub id: Iri,
    pub title: String,
    pub description: Option<String>,
    pub procedure_type: Option<Iri>,
    pub target: Option<Iri>,
    pub status: Iri,
    /// Direct children in execution order.
    pub steps: Vec<Iri>,
    /// The abstract procedure this one is a version of.
    pub version_of: Option<Iri>,
    pub next_version: Option<Iri>,
    pub previous_version: Option<Iri>,
    pub adopted_by: Option<Iri>,
    pub references: BTreeSet<Node>,
    pub extracted_from: Option<Node>,
    /// Triples about this node (and blank nodes below it) outside the
    /// mapped fields; kept so a lift/lower cycle loses nothing.
    pub extras: BTreeSet<Triple>,
}

impl Procedure {
    pub fn new(id: Iri, title: impl Into<String>, status: Iri) -> Self {
        Procedure {
            id,
            title: title.into(),
            description: None,
            procedure_type: None,
            target: None,
            status,
            steps: Vec::new(),
            version_of: None,
            next_version: None,
            previous_version: None,
            adopted_by: None,
            references: BTreeSet::new(),
            extracted_from: None,
            extras: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub id: Iri,
    pub label: String,
    pub description: Option<String>,
    pub kind: StepKind,
    /// Ordered substeps; non-empty exactly for multisteps.
    pub substeps: Vec<Iri>,
    pub actions: BTreeSet<Node>,
    pub functions: BTreeSet<Node>,
    pub tools: BTreeSet<Node>,
    pub verification: Option<Node>,
    pub expertise_level: Option<Iri>,
    pub expected_duration: Option<Duration>,
    /// Errors this step may raise.
    pub errors: BTreeSet<Iri>,
    /// The error this step is the fallback for.
    pub fallback_for: Option<Iri>,
    pub ppe: BTreeSet<Node>,
    pub padlocks: BTreeSet<Node>,
    pub energy_sources: BTreeSet<Node>,
    pub extras: BTreeSet<Triple>,
}

impl Step {
    pub fn atomic(id: Iri, label: impl Into<String>) -> Self {
        Step {
            id,
            label: label.into(),
            description: None,
            kind: StepKind::Atomic,
            substeps: Vec::new(),
            actions: BTreeSet::new(),
            functions: BTreeSet::new(),
            tools: BTreeSet::new(),
            verification: None,
            expertise_level: None,
            expected_duration: None,
            errors: BTreeSet::new(),
            fallback_for: None,
            ppe: BTreeSet::new(),
            padlocks: BTreeSet::new(),
            energy_sources: BTreeSet::new(),
            extras: BTreeSet::new(),
        }
    }

    pub fn multistep(id: Iri, label: impl Into<String>, substeps: Vec<Iri>) -> Self {
        Step {
            kind: StepKind::MultiStep,
            substeps,
            ..Step::atomic(id, label)
        }
    }

    pub fn expected_seconds(&self) -> Option<f64> {
        self.expected_duration.as_ref().map(|d| d.seconds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorDef {
    pub id: Iri,
    pub error_code: Option<String>,
    pub fallback_step: Option<Iri>,
    pub extras: BTreeSet<Triple>,
}

impl ErrorDef {
    pub fn new(id: Iri) -> Self {
        ErrorDef {
            id,
            error_code: None,
            fallback_step: None,
            extras: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepExecution {
    pub id: Iri,
    pub step: Iri,
    pub agent: Iri,
    pub started_at: Option<Timestamp>,
    pub ended_at: Option<Timestamp>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OccurrenceKind {
    /// Feedback on a procedure or on an execution.
    Feedback { text: String, about: Iri },
    Question {
        text: String,
        addressed_by: Option<Iri>,
    },
    Issue {
        error: Iri,
        cause: Option<String>,
        solution: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub id: Iri,
    pub kind: OccurrenceKind,
    pub agent: Iri,
    pub at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub id: Iri,
    pub procedure: Iri,
    pub agent: Iri,
    pub status: Iri,
    pub started_at: Option<Timestamp>,
    pub ended_at: Option<Timestamp>,
    /// Ordered by start time, then IRI.
    pub step_executions: Vec<StepExecution>,
    /// Ordered by time, then IRI.
    pub occurrences: Vec<Occurrence>,
    pub extras: BTreeSet<Triple>,
}

/// Canonical ordering key for execution members: time, then IRI with
/// shorter IRIs first so `/step/2` precedes `/step/10`.
pub(crate) fn member_key(at: Option<&Timestamp>, id: &Iri) -> (Option<Timestamp>, usize, String) {
    (at.copied(), id.as_str().len(), id.as_str().to_string())
}

impl ExecutionTrace {
    pub fn sort_members(&mut self) {
        self.step_executions
            .sort_by_key(|s| member_key(s.started_at.as_ref(), &s.id));
        self.occurrences.sort_by_key(|o| member_key(Some(&o.at), &o.id));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub node: Node,
    pub start: Option<Timestamp>,
    pub end: Option<Timestamp>,
}

/// An agent holding a role, optionally in relation to a document and
/// restricted to a period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentRole {
    pub node: Node,
    pub agent: Iri,
    pub role: Iri,
    pub document: Option<Iri>,
    pub interval: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineInfo {
    pub id: Iri,
    pub machine_type: Option<Iri>,
    pub location: Option<Iri>,
    pub manufacturer: Option<Iri>,
}
