//! Recording procedure executions as they happen.
//!
//! Every call takes an explicit timestamp; the recorder never reads a clock.
//! Timestamps across a session must be non-decreasing.

use std::collections::BTreeSet;

use serde::Serialize;
use uuid::Uuid;

use crate::model::{format_timestamp, ExecutionTrace, Occurrence, OccurrenceKind, StepExecution, Timestamp};
use crate::store::{instance_of, Graph, SchemaHierarchy};
use crate::term::RdfTerm;
use crate::validate::{builtin_rules, validate, Finding};
use crate::vocab::{execution_statuses, pko, time, Iri};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error("<{0}> is not a procedure in the store")]
    UnknownProcedure(Iri),
    #[error("procedure <{procedure}> fails validation ({} finding(s))", findings.len())]
    InvalidProcedure { procedure: Iri, findings: Vec<Finding> },
    #[error("<{0}> is not a step of the executed procedure")]
    UnknownStep(Iri),
    #[error("step <{0}> has no open execution")]
    StepNotOpen(Iri),
    #[error("step <{0}> is already open")]
    StepAlreadyOpen(Iri),
    #[error("{at} is earlier than the previous event at {previous}")]
    NonMonotonicTime { at: String, previous: String },
    #[error("the session is finished")]
    SessionClosed,
    #[error("cannot complete with open step(s): {}", .0.iter().map(|s| format!("<{s}>")).collect::<Vec<_>>().join(", "))]
    OpenSteps(Vec<Iri>),
    #[error("<{0}> is not an execution status")]
    BadStatus(Iri),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SessionOptions {
    /// Allow several steps to be open at once.
    pub parallel_steps: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    trace: ExecutionTrace,
    options: SessionOptions,
    steps: BTreeSet<Iri>,
    /// Indices into `trace.step_executions` that have not ended.
    open: Vec<usize>,
    last_event: Timestamp,
    finished: bool,
}

pub fn start_execution(
    g: &Graph,
    procedure: &Iri,
    agent: &Iri,
    at: Timestamp,
) -> Result<Session, ExecError> {
    start_execution_with(g, procedure, agent, at, SessionOptions::default())
}

pub fn start_execution_with(
    g: &Graph,
    procedure: &Iri,
    agent: &Iri,
    at: Timestamp,
    options: SessionOptions,
) -> Result<Session, ExecError> {
    let node = RdfTerm::Iri(procedure.clone());
    let mut schema = SchemaHierarchy::pko();
    schema.merge(&SchemaHierarchy::from_graph(g));
    if !instance_of(g, &node, &pko::PROCEDURE.iri(), &schema) {
        return Err(ExecError::UnknownProcedure(procedure.clone()));
    }
    let steps = steps_of(g, &node);
    let structural: Vec<_> = builtin_rules()
        .into_iter()
        .filter(|r| matches!(r.id, "R01" | "R02" | "R03" | "R04"))
        .collect();
    let mut ours: BTreeSet<String> = steps.iter().map(|s| s.to_string()).collect();
    ours.insert(procedure.to_string());
    let findings: Vec<Finding> = validate(g, &structural)
        .findings
        .into_iter()
        .filter(|f| ours.contains(&f.focus))
        .collect();
    if !findings.is_empty() {
        return Err(ExecError::InvalidProcedure {
            procedure: procedure.clone(),
            findings,
        });
    }
    let id = Iri::new(format!("{procedure}/execution/{}", Uuid::new_v4())).expect("minted IRI is valid");
    Ok(Session {
        trace: ExecutionTrace {
            id,
            procedure: procedure.clone(),
            agent: agent.clone(),
            status: pko::IN_PROGRESS.iri(),
            started_at: Some(at),
            ended_at: None,
            step_executions: Vec::new(),
            occurrences: Vec::new(),
            extras: Default::default(),
        },
        options,
        steps,
        open: Vec::new(),
        last_event: at,
        finished: false,
    })
}

/// IRIs reachable from `root` by one or more `hasStep` links.
fn steps_of(g: &Graph, root: &RdfTerm) -> BTreeSet<Iri> {
    let has_step = pko::HAS_STEP.iri();
    let mut seen = BTreeSet::new();
    let mut stack = vec![root.clone()];
    while let Some(n) = stack.pop() {
        for c in g.objects(&n, &has_step) {
            if let RdfTerm::Iri(i) = &c {
                if seen.insert(i.clone()) {
                    stack.push(c);
                }
            }
        }
    }
    seen
}

impl Session {
    pub fn id(&self) -> &Iri {
        &self.trace.id
    }

    pub fn trace(&self) -> &ExecutionTrace {
        &self.trace
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Steps currently started and not yet ended.
    pub fn open_steps(&self) -> Vec<Iri> {
        self.open
            .iter()
            .map(|&i| self.trace.step_executions[i].step.clone())
            .collect()
    }

    fn advance(&mut self, at: Timestamp) -> Result<(), ExecError> {
        if self.finished {
            return Err(ExecError::SessionClosed);
        }
        if at < self.last_event {
            return Err(ExecError::NonMonotonicTime {
                at: format_timestamp(&at),
                previous: format_timestamp(&self.last_event),
            });
        }
        Ok(())
    }

    pub fn start_step(&mut self, step: &Iri, at: Timestamp) -> Result<&StepExecution, ExecError> {
        let agent = self.trace.agent.clone();
        self.start_step_as(step, &agent, at)
    }

    pub fn start_step_as(
        &mut self,
        step: &Iri,
        agent: &Iri,
        at: Timestamp,
    ) -> Result<&StepExecution, ExecError> {
        self.advance(at)?;
        if !self.steps.contains(step) {
            return Err(ExecError::UnknownStep(step.clone()));
        }
        let open = self.open_steps();
        if open.contains(step) || (!self.options.parallel_steps && !open.is_empty()) {
            return Err(ExecError::StepAlreadyOpen(open.first().cloned().unwrap_or_else(|| step.clone())));
        }
        let n = self.trace.step_executions.len() + 1;
        self.trace.step_executions.push(StepExecution {
            id: Iri::new(format!("{}/step/{n}", self.trace.id)).expect("minted IRI is valid"),
            step: step.clone(),
            agent: agent.clone(),
            started_at: Some(at),
            ended_at: None,
        });
        self.open.push(n - 1);
        self.last_event = at;
        Ok(&self.trace.step_executions[n - 1])
    }

    pub fn end_step(&mut self, step: &Iri, at: Timestamp) -> Result<&StepExecution, ExecError> {
        self.advance(at)?;
        if !self.steps.contains(step) {
            return Err(ExecError::UnknownStep(step.clone()));
        }
        let pos = self
            .open
            .iter()
            .position(|&i| self.trace.step_executions[i].step == *step)
            .ok_or_else(|| ExecError::StepNotOpen(step.clone()))?;
        let i = self.open.remove(pos);
        self.trace.step_executions[i].ended_at = Some(at);
        self.last_event = at;
        Ok(&self.trace.step_executions[i])
    }

    /// Records an occurrence; `agent` defaults to the executing agent.
    pub fn record_occurrence(
        &mut self,
        kind: OccurrenceKind,
        agent: Option<&Iri>,
        at: Timestamp,
    ) -> Result<&Occurrence, ExecError> {
        self.advance(at)?;
        let n = self.trace.occurrences.len() + 1;
        self.trace.occurrences.push(Occurrence {
            id: Iri::new(format!("{}/occurrence/{n}", self.trace.id)).expect("minted IRI is valid"),
            kind,
            agent: agent.unwrap_or(&self.trace.agent).clone(),
            at,
        });
        self.last_event = at;
        Ok(&self.trace.occurrences[n - 1])
    }

    /// Closes the session. Open steps are allowed only when the execution
    /// was aborted or failed; they keep no end time.
    pub fn finish(&mut self, status: &Iri, at: Timestamp) -> Result<ExecutionTrace, ExecError> {
        self.advance(at)?;
        if !execution_statuses().contains(status) {
            return Err(ExecError::BadStatus(status.clone()));
        }
        let interrupted = pko::ABORTED.is(status) || pko::FAILED.is(status);
        if !self.open.is_empty() && !interrupted {
            return Err(ExecError::OpenSteps(self.open_steps()));
        }
        self.trace.status = status.clone();
        self.trace.ended_at = Some(at);
        self.trace.sort_members();
        self.open.clear();
        self.last_event = at;
        self.finished = true;
        Ok(self.trace.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverrunRow {
    pub step_execution: Iri,
    pub step: Iri,
    pub expected_s: Option<f64>,
    pub actual_s: f64,
    pub delta_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OverrunReport {
    pub rows: Vec<OverrunRow>,
}

impl OverrunReport {
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }

    pub fn to_text(&self) -> String {
        let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v}"));
        let mut out = String::from("step\texpected_s\tactual_s\tdelta_s\n");
        for r in &self.rows {
            let delta = r.delta_s.map_or_else(|| "-".into(), |d| format!("{d:+}"));
            out.push_str(&format!("{}\t{}\t{}\t{}\n", r.step, fmt(r.expected_s), r.actual_s, delta));
        }
        out
    }
}

/// Expected versus actual time, one row per step execution that has both a
/// start and an end. Expected durations are read from `g`; only durations in
/// seconds are used.
pub fn overrun_report(t: &ExecutionTrace, g: &Graph) -> OverrunReport {
    let rows = t
        .step_executions
        .iter()
        .filter_map(|se| {
            let (start, end) = (se.started_at?, se.ended_at?);
            let actual_s = (end - start).num_milliseconds() as f64 / 1000.0;
            let expected_s = expected_seconds(g, &se.step);
            Some(OverrunRow {
                step_execution: se.id.clone(),
                step: se.step.clone(),
                expected_s,
                actual_s,
                delta_s: expected_s.map(|e| actual_s - e),
            })
        })
        .collect();
    OverrunReport { rows }
}

fn expected_seconds(g: &Graph, step: &Iri) -> Option<f64> {
    let second = time::UNIT_SECOND.iri();
    let d = g
        .objects(&RdfTerm::Iri(step.clone()), &pko::HAS_EXPECTED_DURATION.iri())
        .into_iter()
        .next()?;
    if g.objects(&d, &time::UNIT_TYPE.iri()).iter().any(|u| u.as_iri() != Some(&second)) {
        return None;
    }
    g.objects(&d, &time::NUMERIC_DURATION.iri())
        .iter()
        .find_map(|v| v.as_literal()?.as_f64())
}
