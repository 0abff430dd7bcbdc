use std::collections::{BTreeMap, BTreeSet};

use super::{extras_of, Emitter, LiftReport, MapError, Reader};
use crate::model::{order_steps, Duration, ErrorDef, OrderMode, Procedure, Step, StepKind};
use crate::store::{instance_of, Graph, SchemaHierarchy};
use crate::term::{Literal, RdfTerm};
use crate::vocab::{dct, pko, pko_ind, pplan, rdf, time, xsd, Iri};

/// A procedure with its steps (preorder) and the errors they may raise
/// (sorted by IRI).
pub type ProcedureBundle = (Procedure, Vec<Step>, Vec<ErrorDef>);

/// `xsd:decimal` lexical form of a number of seconds.
pub(crate) fn decimal_lexical(seconds: f64) -> String {
    let s = seconds.to_string();
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn lower_procedure(p: &Procedure, steps: &[Step], errors: &[ErrorDef]) -> Graph {
    let mut e = Emitter::new();
    let node = RdfTerm::Iri(p.id.clone());
    e.add(node.clone(), rdf::TYPE, pko::PROCEDURE.iri());
    if !p.title.is_empty() {
        e.add(node.clone(), dct::TITLE, Literal::string(&p.title));
    }
    e.add_opt(&node, dct::DESCRIPTION, p.description.as_deref().map(Literal::string));
    e.add_opt(&node, pko::HAS_PROCEDURE_TYPE, p.procedure_type.clone());
    e.add_opt(&node, pko::HAS_PROCEDURE_TARGET, p.target.clone());
    e.add(node.clone(), pko::HAS_PROCEDURE_STATUS, p.status.clone());
    e.add_all(&node, pko::HAS_STEP, &p.steps);
    e.chain(&p.steps, pko::NEXT_STEP, pko::PREVIOUS_STEP);
    if let Some(a) = &p.version_of {
        e.add(a.clone(), pko::HAS_VERSION, p.id.clone());
    }
    if let Some(n) = &p.next_version {
        e.chain(&[p.id.clone(), n.clone()], pko::NEXT_VERSION, pko::PREVIOUS_VERSION);
    }
    if let Some(prev) = &p.previous_version {
        e.chain(&[prev.clone(), p.id.clone()], pko::NEXT_VERSION, pko::PREVIOUS_VERSION);
    }
    e.add_opt(&node, pko::ADOPTED_BY, p.adopted_by.clone());
    e.add_all(&node, dct::REFERENCES, &p.references);
    e.add_opt(&node, pko::WAS_EXTRACTED_FROM, p.extracted_from.clone());
    e.extend(&p.extras);

    for s in steps {
        lower_step(&mut e, s);
    }
    for err in errors {
        let n = RdfTerm::Iri(err.id.clone());
        e.add(n.clone(), rdf::TYPE, pko::ERROR.iri());
        e.add_opt(&n, pko::ERROR_CODE, err.error_code.as_deref().map(Literal::string));
        e.add_opt(&n, pko::HAS_FALLBACK_STEP, err.fallback_step.clone());
        e.extend(&err.extras);
    }
    e.graph
}

fn lower_step(e: &mut Emitter, s: &Step) {
    let node = RdfTerm::Iri(s.id.clone());
    let class = match s.kind {
        StepKind::Atomic => pplan::STEP,
        StepKind::MultiStep => pplan::MULTI_STEP,
    };
    e.add(node.clone(), rdf::TYPE, class.iri());
    if !s.label.is_empty() {
        e.add(node.clone(), dct::TITLE, Literal::string(&s.label));
    }
    e.add_opt(&node, dct::DESCRIPTION, s.description.as_deref().map(Literal::string));
    e.add_all(&node, pko::HAS_STEP, &s.substeps);
    e.chain(&s.substeps, pko::NEXT_STEP, pko::PREVIOUS_STEP);
    e.add_all(&node, pko::REQUIRES_ACTION, &s.actions);
    e.add_all(&node, pko::REQUIRES_FUNCTION, &s.functions);
    e.add_all(&node, pko::REQUIRES_TOOL, &s.tools);
    e.add_opt(&node, pko::HAS_STEP_VERIFICATION, s.verification.clone());
    e.add_opt(&node, pko::HAS_EXPERTISE_LEVEL, s.expertise_level.clone());
    if let Some(d) = &s.expected_duration {
        let dn = RdfTerm::from(d.node.clone());
        e.add(node.clone(), pko::HAS_EXPECTED_DURATION, dn.clone());
        e.add(dn.clone(), rdf::TYPE, time::DURATION.iri());
        e.add(
            dn.clone(),
            time::NUMERIC_DURATION,
            Literal::typed(decimal_lexical(d.seconds), xsd::DECIMAL.iri()),
        );
        e.add(dn, time::UNIT_TYPE, time::UNIT_SECOND.iri());
    }
    e.add_all(&node, pko::HAS_POTENTIAL_ERROR, &s.errors);
    if let Some(err) = &s.fallback_for {
        e.add(err.clone(), pko::HAS_FALLBACK_STEP, s.id.clone());
    }
    e.add_all(&node, pko_ind::REQUIRES_PPE, &s.ppe);
    e.add_all(&node, pko_ind::REQUIRES_PADLOCK, &s.padlocks);
    e.add_all(&node, pko_ind::ISOLATES_ENERGY_SOURCE, &s.energy_sources);
    e.extend(&s.extras);
}

pub fn lift_procedure(g: &Graph, id: &Iri) -> Result<ProcedureBundle, MapError> {
    lift_procedure_with(g, id, OrderMode::Strict)
}

pub fn lift_procedure_with(g: &Graph, id: &Iri, mode: OrderMode) -> Result<ProcedureBundle, MapError> {
    let node = RdfTerm::Iri(id.clone());
    let schema = hierarchy(g);
    if !instance_of(g, &node, &pko::PROCEDURE.iri(), &schema) {
        return Err(MapError::NotAProcedure(id.clone()));
    }
    let r = Reader::new(g, node.clone());
    let mut p = Procedure::new(
        id.clone(),
        r.text(dct::TITLE).unwrap_or_default(),
        r.required_iri(pko::HAS_PROCEDURE_STATUS, "procedure status")?,
    );
    p.description = r.text(dct::DESCRIPTION);
    p.procedure_type = r.iri(pko::HAS_PROCEDURE_TYPE);
    p.target = r.iri(pko::HAS_PROCEDURE_TARGET);
    p.steps = order_steps(g, id, mode)?;
    p.version_of = r.inverse_iri(pko::HAS_VERSION);
    p.next_version = r
        .iri(pko::NEXT_VERSION)
        .or_else(|| r.inverse_iri(pko::PREVIOUS_VERSION));
    p.previous_version = r
        .iri(pko::PREVIOUS_VERSION)
        .or_else(|| r.inverse_iri(pko::NEXT_VERSION));
    p.adopted_by = r.iri(pko::ADOPTED_BY);
    p.references = r.nodes(dct::REFERENCES);
    p.extracted_from = r.node(pko::WAS_EXTRACTED_FROM);

    let mut steps = Vec::new();
    let mut visiting = vec![id.clone()];
    for child in p.steps.clone() {
        lift_step_tree(g, &child, mode, &mut visiting, &mut steps)?;
    }

    let error_ids: BTreeSet<Iri> = steps.iter().flat_map(|s| s.errors.iter().cloned()).collect();
    let mut errors: Vec<ErrorDef> = error_ids
        .into_iter()
        .map(|eid| {
            let r = Reader::new(g, eid.clone());
            ErrorDef {
                error_code: r.text(pko::ERROR_CODE),
                fallback_step: r.iri(pko::HAS_FALLBACK_STEP),
                ..ErrorDef::new(eid)
            }
        })
        .collect();

    let core = lower_procedure(&p, &steps, &errors);
    p.extras = extras_of(g, &node, &core);
    for s in &mut steps {
        s.extras = extras_of(g, &RdfTerm::Iri(s.id.clone()), &core);
    }
    for err in &mut errors {
        err.extras = extras_of(g, &RdfTerm::Iri(err.id.clone()), &core);
    }
    Ok((p, steps, errors))
}

fn lift_step_tree(
    g: &Graph,
    id: &Iri,
    mode: OrderMode,
    visiting: &mut Vec<Iri>,
    out: &mut Vec<Step>,
) -> Result<(), MapError> {
    if visiting.contains(id) {
        return Err(MapError::Malformed {
            node: format!("<{id}>"),
            message: "step contains itself through hasStep".into(),
        });
    }
    let r = Reader::new(g, id.clone());
    let substeps = order_steps(g, id, mode)?;
    let multistep = r.has_type(pplan::MULTI_STEP) || !substeps.is_empty();
    let mut s = Step::atomic(id.clone(), r.text(dct::TITLE).unwrap_or_default());
    if multistep {
        s.kind = StepKind::MultiStep;
        s.substeps = substeps.clone();
    }
    s.description = r.text(dct::DESCRIPTION);
    s.actions = r.nodes(pko::REQUIRES_ACTION);
    s.functions = r.nodes(pko::REQUIRES_FUNCTION);
    s.tools = r.nodes(pko::REQUIRES_TOOL);
    s.verification = r.node(pko::HAS_STEP_VERIFICATION);
    s.expertise_level = r.iri(pko::HAS_EXPERTISE_LEVEL);
    s.expected_duration = lift_duration(g, &r)?;
    s.errors = r.iris(pko::HAS_POTENTIAL_ERROR);
    s.fallback_for = r.inverse_iri(pko::HAS_FALLBACK_STEP);
    s.ppe = r.nodes(pko_ind::REQUIRES_PPE);
    s.padlocks = r.nodes(pko_ind::REQUIRES_PADLOCK);
    s.energy_sources = r.nodes(pko_ind::ISOLATES_ENERGY_SOURCE);
    out.push(s);

    visiting.push(id.clone());
    for child in substeps {
        lift_step_tree(g, &child, mode, visiting, out)?;
    }
    visiting.pop();
    Ok(())
}

fn lift_duration(g: &Graph, step: &Reader<'_>) -> Result<Option<Duration>, MapError> {
    let Some(node) = step.node(pko::HAS_EXPECTED_DURATION) else {
        return Ok(None);
    };
    let d = Reader::new(g, node.clone());
    let seconds = d
        .all(time::NUMERIC_DURATION)
        .iter()
        .find_map(|o| o.as_literal().and_then(|l| l.as_f64()))
        .ok_or_else(|| MapError::Malformed {
            node: d.node.to_string(),
            message: "duration without a numeric time:numericDuration".into(),
        })?;
    Ok(Some(Duration { node, seconds }))
}

pub(crate) fn hierarchy(g: &Graph) -> SchemaHierarchy {
    let mut h = SchemaHierarchy::pko();
    h.merge(&SchemaHierarchy::from_graph(g));
    h
}

/// Lifts every IRI typed `pko:Procedure` (directly or through a subclass).
pub fn lift_all_procedures(g: &Graph) -> (Vec<ProcedureBundle>, LiftReport) {
    let schema = hierarchy(g);
    let procedure = pko::PROCEDURE.iri();
    let mut candidates: BTreeMap<Iri, ()> = BTreeMap::new();
    for (s, o) in g.pairs(&rdf::TYPE.iri()) {
        if let (RdfTerm::Iri(s), RdfTerm::Iri(class)) = (s, o) {
            if schema.entails(&class, &procedure) {
                candidates.insert(s, ());
            }
        }
    }
    let mut bundles = Vec::new();
    let mut report = LiftReport::default();
    for id in candidates.into_keys() {
        match lift_procedure(g, &id) {
            Ok(b) => {
                report.lifted.push(id);
                bundles.push(b);
            }
            Err(e) => report.skipped.push((id, e.to_string())),
        }
    }
    (bundles, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Node;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("https://example.org/{s}")).unwrap()
    }

    #[test]
    fn minimal_lowering() {
        let p = Procedure::new(iri("p"), "Minimal", pko::DRAFT.iri());
        let g = lower_procedure(&p, &[], &[]);
        assert_eq!(g.len(), 3);
        let (back, steps, errors) = lift_procedure(&g, &iri("p")).unwrap();
        assert_eq!(back, p);
        assert!(steps.is_empty() && errors.is_empty());
    }

    #[test]
    fn nested_round_trip_with_extras() {
        let mut p = Procedure::new(iri("p"), "Nested", pko::APPROVED.iri());
        p.steps = vec![iri("m"), iri("s3")];
        p.references.insert(Node::Blank("img".into()));
        let m = Step::multistep(iri("m"), "Part", vec![iri("s1"), iri("s2")]);
        let mut s1 = Step::atomic(iri("s1"), "one");
        s1.expected_duration = Some(Duration {
            node: Node::Blank("d".into()),
            seconds: 90.5,
        });
        s1.errors.insert(iri("E1"));
        let mut s2 = Step::atomic(iri("s2"), "two");
        s2.fallback_for = Some(iri("E1"));
        let s3 = Step::atomic(iri("s3"), "three");
        let err = ErrorDef {
            error_code: Some("E-041".into()),
            fallback_step: Some(iri("s2")),
            ..ErrorDef::new(iri("E1"))
        };
        let steps = vec![m, s1, s2, s3];
        let mut g = lower_procedure(&p, &steps, std::slice::from_ref(&err));
        let note = crate::term::Triple::new(iri("p"), iri("note"), Literal::string("kept"));
        g.insert(note.clone()).unwrap();

        let (back, back_steps, back_errors) = lift_procedure(&g, &iri("p")).unwrap();
        assert_eq!(back.extras, BTreeSet::from([note]));
        assert_eq!(back_steps, steps);
        assert_eq!(back_errors, vec![err.clone()]);
        assert_eq!(lower_procedure(&back, &back_steps, &back_errors), g);
    }

    #[test]
    fn not_a_procedure() {
        let g = Graph::new();
        assert_eq!(
            lift_procedure(&g, &iri("x")),
            Err(MapError::NotAProcedure(iri("x")))
        );
    }

    #[test]
    fn decimal_forms() {
        assert_eq!(decimal_lexical(120.0), "120.0");
        assert_eq!(decimal_lexical(0.25), "0.25");
    }
}
