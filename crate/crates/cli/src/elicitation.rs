//! Wire format of the elicitation form: a nested procedure document that
//! the service turns into PKO triples and back.
//!
//! Links to resources (tools, padlocks, references, …) are either a bare
//! IRI or prefixed name, or an object that may carry its own `id`, `type`,
//! `title` and `description`. Objects without an `id` get one minted under
//! the step or procedure they belong to.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use pk_forge::mapper::{lift_procedure, lower_procedure, MapError};
use pk_forge::model::{Duration, Procedure, Step, StepKind};
use pk_forge::store::Graph;
use pk_forge::term::{Literal, Node, RdfTerm, Triple};
use pk_forge::vocab::{dcat, dct, m4ing, pko, pko_ind, rdf, Iri, Term};

use crate::args::parse_iri;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElicitationDoc {
    pub procedure: ElicitedProcedure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElicitedProcedure {
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ResourceRef>,
    pub status: String,
    pub steps: Vec<ElicitedStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<ResourceRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_of: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireKind {
    Atomic,
    Multistep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElicitedStep {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Inferred from `substeps` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<WireKind>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub substeps: Vec<ElicitedStep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub actions: Vec<ResourceRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tools: Vec<ResourceRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<ResourceRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub padlocks: Vec<ResourceRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ppe: Vec<ResourceRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResourceRef {
    Iri(String),
    Described(Described),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Described {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A document that parsed but cannot be lowered. `path` locates the field,
/// e.g. `procedure.steps[1].tools[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{path}: {message}")]
pub struct ElicitationError {
    pub path: String,
    pub message: String,
}

fn invalid(path: &str, message: impl Into<String>) -> ElicitationError {
    ElicitationError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn iri_at(path: &str, text: &str) -> Result<Iri, ElicitationError> {
    parse_iri(text).map_err(|e| invalid(path, e.to_string()))
}

fn mint(base: &Iri, suffix: &str) -> Iri {
    Iri::new(format!("{base}/{suffix}")).expect("minted IRI is valid")
}

struct Lowering {
    steps: Vec<Step>,
    extra: Vec<Triple>,
}

impl Lowering {
    /// Resolves a link, minting `{owner}/{slot}` when the object has no id
    /// and typing minted nodes with `default_class`.
    fn resource(
        &mut self,
        path: &str,
        r: &ResourceRef,
        owner: &Iri,
        slot: &str,
        default_class: Option<Term>,
    ) -> Result<Iri, ElicitationError> {
        let d = match r {
            ResourceRef::Iri(s) => return iri_at(path, s),
            ResourceRef::Described(d) => d,
        };
        let id = match &d.id {
            Some(s) => iri_at(&format!("{path}.id"), s)?,
            None => mint(owner, slot),
        };
        let class = match &d.class {
            Some(c) => Some(iri_at(&format!("{path}.type"), c)?),
            None if d.id.is_none() => default_class.map(|t| t.iri()),
            None => None,
        };
        if let Some(c) = class {
            self.extra.push(Triple::new(id.clone(), rdf::TYPE.iri(), c));
        }
        for (p, text) in [(dct::TITLE, &d.title), (dct::DESCRIPTION, &d.description)] {
            if let Some(t) = text {
                self.extra.push(Triple::new(id.clone(), p.iri(), Literal::string(t)));
            }
        }
        Ok(id)
    }

    fn resources(
        &mut self,
        path: &str,
        refs: &[ResourceRef],
        owner: &Iri,
        slot: &str,
        class: Term,
    ) -> Result<BTreeSet<Node>, ElicitationError> {
        let mut out = BTreeSet::new();
        for (i, r) in refs.iter().enumerate() {
            let id = self.resource(&format!("{path}[{i}]"), r, owner, &format!("{slot}/{}", i + 1), Some(class))?;
            out.insert(Node::Iri(id));
        }
        Ok(out)
    }

    /// Lowers `s` and its substeps (preorder) and returns its IRI.
    fn step(&mut self, path: &str, s: &ElicitedStep, procedure: &Iri, number: &str) -> Result<Iri, ElicitationError> {
        if s.label.trim().is_empty() {
            return Err(invalid(&format!("{path}.label"), "a step needs a label"));
        }
        let id = mint(procedure, &format!("Step/{number}"));
        let slot = self.steps.len();
        self.steps.push(Step::atomic(id.clone(), s.label.clone()));

        let kind = match (s.kind, s.substeps.is_empty()) {
            (Some(WireKind::Multistep), _) | (None, false) => StepKind::MultiStep,
            (Some(WireKind::Atomic), _) | (None, true) => StepKind::Atomic,
        };
        let mut substeps = Vec::with_capacity(s.substeps.len());
        for (i, sub) in s.substeps.iter().enumerate() {
            substeps.push(self.step(&format!("{path}.substeps[{i}]"), sub, procedure, &format!("{number}.{}", i + 1))?);
        }
        let actions = self.resources(&format!("{path}.actions"), &s.actions, &id, "action", pko::ACTION)?;
        let tools = self.resources(&format!("{path}.tools"), &s.tools, &id, "tool", m4ing::TOOL)?;
        let padlocks = self.resources(&format!("{path}.padlocks"), &s.padlocks, &id, "padlock", pko_ind::PADLOCK)?;
        let ppe = self.resources(&format!("{path}.ppe"), &s.ppe, &id, "ppe", pko_ind::PPE)?;
        let verification = match &s.verification {
            Some(v) => Some(Node::Iri(self.resource(
                &format!("{path}.verification"),
                v,
                &id,
                "verification",
                Some(pko::STEP_VERIFICATION),
            )?)),
            None => None,
        };
        let expected_duration = match s.expected_duration_s {
            Some(x) if !x.is_finite() => {
                return Err(invalid(&format!("{path}.expected_duration_s"), "not a finite number"))
            }
            Some(seconds) => Some(Duration {
                node: Node::Iri(mint(&id, "duration")),
                seconds,
            }),
            None => None,
        };

        let step = &mut self.steps[slot];
        step.description = s.description.clone();
        step.kind = kind;
        step.substeps = substeps;
        step.actions = actions;
        step.tools = tools;
        step.padlocks = padlocks;
        step.ppe = ppe;
        step.verification = verification;
        step.expected_duration = expected_duration;
        Ok(id)
    }
}

/// Triples for `doc` with the procedure at `id`. Steps are minted as
/// `{id}/Step/1`, `{id}/Step/1.2`, … `previous_version` links the new
/// procedure after the latest version of the same abstract procedure.
pub fn lower(doc: &ElicitationDoc, id: &Iri, previous_version: Option<Iri>) -> Result<Graph, ElicitationError> {
    let p = &doc.procedure;
    if p.title.trim().is_empty() {
        return Err(invalid("procedure.title", "a procedure needs a title"));
    }
    if p.steps.is_empty() {
        return Err(invalid("procedure.steps", "a procedure needs at least one step"));
    }
    let status = iri_at("procedure.status", &p.status)?;
    let mut procedure = Procedure::new(id.clone(), p.title.clone(), status);
    procedure.description = p.description.clone();
    procedure.version_of = p.version_of.as_deref().map(|v| iri_at("procedure.version_of", v)).transpose()?;
    procedure.previous_version = previous_version;

    let mut l = Lowering {
        steps: Vec::new(),
        extra: Vec::new(),
    };
    if let Some(t) = &p.target {
        procedure.target = Some(l.resource("procedure.target", t, id, "target", None)?);
    }
    procedure.references = l.resources("procedure.references", &p.references, id, "reference", dcat::RESOURCE)?;
    for (i, s) in p.steps.iter().enumerate() {
        let step = l.step(&format!("procedure.steps[{i}]"), s, id, &(i + 1).to_string())?;
        procedure.steps.push(step);
    }

    let mut g = lower_procedure(&procedure, &l.steps, &[]);
    for t in l.extra {
        g.insert(t).expect("subjects are IRIs");
    }
    Ok(g)
}

/// Reads a stored procedure back into the wire format. Linked resources
/// with a type, title or description in `g` come back as objects.
pub fn lift(g: &Graph, id: &Iri) -> Result<ElicitationDoc, MapError> {
    let (p, steps, _) = lift_procedure(g, id)?;
    let by_id: BTreeMap<&Iri, &Step> = steps.iter().map(|s| (&s.id, s)).collect();
    let refs = |nodes: &BTreeSet<Node>| nodes.iter().map(|n| describe(g, n)).collect::<Vec<_>>();

    fn step_doc(
        s: &Step,
        by_id: &BTreeMap<&Iri, &Step>,
        refs: &dyn Fn(&BTreeSet<Node>) -> Vec<ResourceRef>,
        g: &Graph,
    ) -> ElicitedStep {
        ElicitedStep {
            label: s.label.clone(),
            description: s.description.clone(),
            kind: Some(match s.kind {
                StepKind::Atomic => WireKind::Atomic,
                StepKind::MultiStep => WireKind::Multistep,
            }),
            substeps: s
                .substeps
                .iter()
                .filter_map(|c| by_id.get(c))
                .map(|c| step_doc(c, by_id, refs, g))
                .collect(),
            actions: refs(&s.actions),
            tools: refs(&s.tools),
            verification: s.verification.as_ref().map(|v| describe(g, v)),
            expected_duration_s: s.expected_seconds(),
            padlocks: refs(&s.padlocks),
            ppe: refs(&s.ppe),
        }
    }

    Ok(ElicitationDoc {
        procedure: ElicitedProcedure {
            title: p.title.clone(),
            description: p.description.clone(),
            target: p.target.as_ref().map(|t| describe(g, &Node::Iri(t.clone()))),
            status: p.status.to_string(),
            steps: p
                .steps
                .iter()
                .filter_map(|s| by_id.get(s))
                .map(|s| step_doc(s, &by_id, &refs, g))
                .collect(),
            references: refs(&p.references),
            version_of: p.version_of.as_ref().map(Iri::to_string),
        },
    })
}

fn describe(g: &Graph, node: &Node) -> ResourceRef {
    let term = RdfTerm::from(node.clone());
    let text = |p: Term| {
        g.objects(&term, &p.iri())
            .iter()
            .find_map(|o| o.as_literal().map(|l| l.lexical().to_string()))
    };
    let d = Described {
        id: node_id(node),
        class: g
            .objects(&term, &rdf::TYPE.iri())
            .iter()
            .find_map(|o| o.as_iri().map(Iri::to_string)),
        title: text(dct::TITLE),
        description: text(dct::DESCRIPTION),
    };
    match d {
        Described {
            id: Some(id),
            class: None,
            title: None,
            description: None,
        } => ResourceRef::Iri(id),
        d => ResourceRef::Described(d),
    }
}

/// Blank nodes have no stable name; they come back without an id.
fn node_id(node: &Node) -> Option<String> {
    match node {
        Node::Iri(i) => Some(i.to_string()),
        Node::Blank(_) => None,
    }
}
