use super::{extras_of, Emitter, MapError, Reader};
use crate::model::{
    timestamp_literal, ExecutionTrace, Occurrence, OccurrenceKind, StepExecution,
};
use crate::store::Graph;
use crate::term::{Literal, RdfTerm};
use crate::vocab::{dct, pko, pplan, prov, rdf, Iri};

pub fn lower_execution(t: &ExecutionTrace) -> Graph {
    let mut e = Emitter::new();
    let node = RdfTerm::Iri(t.id.clone());
    e.add(node.clone(), rdf::TYPE, pko::PROCEDURE_EXECUTION.iri());
    e.add(node.clone(), pko::EXECUTES, t.procedure.clone());
    e.add(node.clone(), prov::WAS_ASSOCIATED_WITH, t.agent.clone());
    e.add(node.clone(), pko::HAS_EXECUTION_STATUS, t.status.clone());
    e.add_opt(&node, prov::STARTED_AT_TIME, t.started_at.as_ref().map(timestamp_literal));
    e.add_opt(&node, prov::ENDED_AT_TIME, t.ended_at.as_ref().map(timestamp_literal));

    for se in &t.step_executions {
        let n = RdfTerm::Iri(se.id.clone());
        e.add(node.clone(), pko::HAS_STEP_EXECUTION, n.clone());
        e.add(n.clone(), rdf::TYPE, pko::STEP_EXECUTION.iri());
        e.add(n.clone(), pplan::CORRESPONDS_TO_STEP, se.step.clone());
        e.add(n.clone(), prov::WAS_ASSOCIATED_WITH, se.agent.clone());
        e.add_opt(&n, prov::STARTED_AT_TIME, se.started_at.as_ref().map(timestamp_literal));
        e.add_opt(&n, prov::ENDED_AT_TIME, se.ended_at.as_ref().map(timestamp_literal));
    }

    for o in &t.occurrences {
        let n = RdfTerm::Iri(o.id.clone());
        e.add(node.clone(), pko::HAS_OCCURRENCE, n.clone());
        e.add(n.clone(), prov::WAS_ASSOCIATED_WITH, o.agent.clone());
        e.add(n.clone(), prov::AT_TIME, timestamp_literal(&o.at));
        match &o.kind {
            OccurrenceKind::Feedback { text, about } => {
                e.add(n.clone(), rdf::TYPE, pko::USER_FEEDBACK_OCCURRENCE.iri());
                e.add(n.clone(), dct::DESCRIPTION, Literal::string(text));
                e.add(n, pko::FEEDBACK_ON, about.clone());
            }
            OccurrenceKind::Question { text, addressed_by } => {
                e.add(n.clone(), rdf::TYPE, pko::USER_QUESTION_OCCURRENCE.iri());
                e.add(n.clone(), dct::DESCRIPTION, Literal::string(text));
                e.add_opt(&n, pko::ADDRESSED_BY, addressed_by.clone());
            }
            OccurrenceKind::Issue {
                error,
                cause,
                solution,
            } => {
                e.add(n.clone(), rdf::TYPE, pko::ISSUE_OCCURRENCE.iri());
                e.add(n.clone(), pko::REFERS_TO_ERROR, error.clone());
                e.add_opt(&n, pko::ISSUE_CAUSE, cause.as_deref().map(Literal::string));
                e.add_opt(&n, pko::ISSUE_SOLUTION, solution.as_deref().map(Literal::string));
            }
        }
    }
    e.extend(&t.extras);
    e.graph
}

pub fn lift_execution(g: &Graph, id: &Iri) -> Result<ExecutionTrace, MapError> {
    let r = Reader::new(g, id.clone());
    if !r.has_type(pko::PROCEDURE_EXECUTION) {
        return Err(MapError::NotAnExecution(id.clone()));
    }
    let agent = r.required_iri(prov::WAS_ASSOCIATED_WITH, "agent")?;
    let mut t = ExecutionTrace {
        id: id.clone(),
        procedure: r.required_iri(pko::EXECUTES, "executed procedure")?,
        agent: agent.clone(),
        status: r.required_iri(pko::HAS_EXECUTION_STATUS, "execution status")?,
        started_at: r.time(prov::STARTED_AT_TIME)?,
        ended_at: r.time(prov::ENDED_AT_TIME)?,
        step_executions: Vec::new(),
        occurrences: Vec::new(),
        extras: Default::default(),
    };

    for se in r.iris(pko::HAS_STEP_EXECUTION) {
        let sr = Reader::new(g, se.clone());
        t.step_executions.push(StepExecution {
            step: sr.required_iri(pplan::CORRESPONDS_TO_STEP, "executed step")?,
            agent: sr.iri(prov::WAS_ASSOCIATED_WITH).unwrap_or_else(|| agent.clone()),
            started_at: sr.time(prov::STARTED_AT_TIME)?,
            ended_at: sr.time(prov::ENDED_AT_TIME)?,
            id: se,
        });
    }

    for oid in r.iris(pko::HAS_OCCURRENCE) {
        let or = Reader::new(g, oid.clone());
        let kind = if or.has_type(pko::USER_FEEDBACK_OCCURRENCE) {
            OccurrenceKind::Feedback {
                text: or.text(dct::DESCRIPTION).unwrap_or_default(),
                about: or.required_iri(pko::FEEDBACK_ON, "feedback target")?,
            }
        } else if or.has_type(pko::USER_QUESTION_OCCURRENCE) {
            OccurrenceKind::Question {
                text: or.text(dct::DESCRIPTION).unwrap_or_default(),
                addressed_by: or.iri(pko::ADDRESSED_BY),
            }
        } else if or.has_type(pko::ISSUE_OCCURRENCE) {
            OccurrenceKind::Issue {
                error: or.required_iri(pko::REFERS_TO_ERROR, "error")?,
                cause: or.text(pko::ISSUE_CAUSE),
                solution: or.text(pko::ISSUE_SOLUTION),
            }
        } else {
            return Err(MapError::Malformed {
                node: format!("<{oid}>"),
                message: "occurrence is not typed as feedback, question or issue".into(),
            });
        };
        let at = or.time(prov::AT_TIME)?.ok_or_else(|| MapError::MissingField {
            node: format!("<{oid}>"),
            field: "occurrence time",
        })?;
        t.occurrences.push(Occurrence {
            id: oid,
            kind,
            agent: or.iri(prov::WAS_ASSOCIATED_WITH).unwrap_or_else(|| agent.clone()),
            at,
        });
    }
    t.sort_members();

    let core = lower_execution(&t);
    let mut extras = extras_of(g, &RdfTerm::Iri(t.id.clone()), &core);
    for se in &t.step_executions {
        extras.extend(extras_of(g, &RdfTerm::Iri(se.id.clone()), &core));
    }
    for o in &t.occurrences {
        extras.extend(extras_of(g, &RdfTerm::Iri(o.id.clone()), &core));
    }
    t.extras = extras;
    Ok(t)
}
