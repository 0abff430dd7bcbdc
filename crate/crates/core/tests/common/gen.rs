//! Seeded random procedures, traces and graphs.

use std::collections::BTreeSet;

use chrono::TimeZone;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use pk_forge::mapper::ProcedureBundle;
use pk_forge::model::{
    Duration, ErrorDef, ExecutionTrace, Occurrence, OccurrenceKind, Procedure, Step, StepExecution, Timestamp,
};
use pk_forge::store::Graph;
use pk_forge::term::{Literal, Node, RdfTerm, Triple};
use pk_forge::vocab::{execution_statuses, procedure_statuses, xsd, Iri};

const TEXTS: &[&str] = &[
    "",
    "Lock the valve",
    "Check \"zero energy\" state",
    "line one\nline two",
    "tab\there",
    "Karotten schälen 🥕",
    "back\\slash",
];

fn text(rng: &mut StdRng) -> String {
    TEXTS.choose(rng).unwrap().to_string()
}

fn maybe<T>(rng: &mut StdRng, p: f64, f: impl FnOnce(&mut StdRng) -> T) -> Option<T> {
    if rng.gen_bool(p) {
        Some(f(rng))
    } else {
        None
    }
}

/// Mints IRIs and blank labels unique within one generated value.
struct Names {
    base: String,
    n: usize,
}

impl Names {
    fn iri(&mut self, kind: &str) -> Iri {
        self.n += 1;
        Iri::new(format!("{}{kind}/{}", self.base, self.n)).unwrap()
    }

    fn node(&mut self, rng: &mut StdRng, kind: &str) -> Node {
        if rng.gen_bool(0.3) {
            self.n += 1;
            Node::Blank(format!("{kind}{}", self.n))
        } else {
            Node::Iri(self.iri(kind))
        }
    }

    fn nodes(&mut self, rng: &mut StdRng, kind: &str, max: usize) -> BTreeSet<Node> {
        let k = rng.gen_range(0..=max);
        (0..k).map(|_| self.node(rng, kind)).collect()
    }

    fn extras(&mut self, rng: &mut StdRng, subject: &Iri) -> BTreeSet<Triple> {
        let k = rng.gen_range(0..=2);
        (0..k)
            .map(|i| {
                let p = Iri::new(format!("{}note/{i}", self.base)).unwrap();
                let o: RdfTerm = if rng.gen_bool(0.5) {
                    Literal::string(text(rng)).into()
                } else {
                    Literal::typed(rng.gen_range(-5..500).to_string(), xsd::INTEGER.iri()).into()
                };
                Triple::new(subject.clone(), p, o)
            })
            .collect()
    }
}

fn pick(rng: &mut StdRng, members: &[Iri]) -> Iri {
    members.choose(rng).unwrap().clone()
}

/// A random procedure bundle in the canonical shape `lift_procedure`
/// returns: steps in preorder, errors sorted and all raised by some step.
pub fn procedure(rng: &mut StdRng, index: usize) -> ProcedureBundle {
    let mut names = Names {
        base: format!("https://example.org/gen/{index}/"),
        n: 0,
    };
    let statuses = procedure_statuses().members;
    let mut p = Procedure::new(names.iri("procedure"), text(rng), pick(rng, &statuses));
    p.description = maybe(rng, 0.5, text);
    p.procedure_type = maybe(rng, 0.5, |_| names.iri("type"));
    p.target = maybe(rng, 0.5, |_| names.iri("target"));
    p.version_of = maybe(rng, 0.3, |_| names.iri("abstract"));
    p.next_version = maybe(rng, 0.3, |_| names.iri("next"));
    p.previous_version = maybe(rng, 0.3, |_| names.iri("previous"));
    p.adopted_by = maybe(rng, 0.5, |_| names.iri("org"));
    p.references = names.nodes(rng, "resource", 3);
    p.extracted_from = if rng.gen_bool(0.5) { Some(names.node(rng, "source")) } else { None };
    p.extras = names.extras(rng, &p.id);

    let error_pool: Vec<Iri> = (0..3).map(|_| names.iri("error")).collect();
    let mut steps = Vec::new();
    let top = rng.gen_range(0..=4);
    p.steps = (0..top).map(|_| step_tree(rng, &mut names, &error_pool, 0, &mut steps)).collect();

    let raised: BTreeSet<Iri> = steps.iter().flat_map(|s: &Step| s.errors.iter().cloned()).collect();
    let mut errors = Vec::new();
    let mut taken = BTreeSet::new();
    for id in raised {
        let mut e = ErrorDef::new(id.clone());
        e.error_code = maybe(rng, 0.6, |r| format!("E-{:03}", r.gen_range(0..1000)));
        e.extras = names.extras(rng, &id);
        if rng.gen_bool(0.5) && !steps.is_empty() {
            let i = rng.gen_range(0..steps.len());
            if taken.insert(i) {
                steps[i].fallback_for = Some(id.clone());
                e.fallback_step = Some(steps[i].id.clone());
            }
        } else if rng.gen_bool(0.3) {
            e.fallback_step = Some(names.iri("foreign-step"));
        }
        errors.push(e);
    }
    (p, steps, errors)
}

fn step_tree(rng: &mut StdRng, names: &mut Names, errors: &[Iri], depth: usize, out: &mut Vec<Step>) -> Iri {
    let id = names.iri("step");
    let mut s = Step::atomic(id.clone(), text(rng));
    s.description = maybe(rng, 0.4, text);
    s.actions = names.nodes(rng, "action", 2);
    s.functions = names.nodes(rng, "function", 1);
    s.tools = names.nodes(rng, "tool", 2);
    s.verification = if rng.gen_bool(0.3) { Some(names.node(rng, "verification")) } else { None };
    s.expertise_level = maybe(rng, 0.3, |_| names.iri("level"));
    if rng.gen_bool(0.4) {
        let node = names.node(rng, "duration");
        s.expected_duration = Some(Duration {
            node,
            seconds: rng.gen_range(0..4000) as f64 * 0.25,
        });
    }
    let k = rng.gen_range(0..=2);
    s.errors = (0..k).map(|_| pick(rng, errors)).collect();
    s.ppe = names.nodes(rng, "ppe", 2);
    s.padlocks = names.nodes(rng, "padlock", 1);
    s.energy_sources = names.nodes(rng, "energy", 1);
    s.extras = names.extras(rng, &id);

    let at = out.len();
    out.push(s);
    if depth < 3 && rng.gen_bool(0.3) {
        let n = rng.gen_range(1..=3);
        let children: Vec<Iri> = (0..n).map(|_| step_tree(rng, names, errors, depth + 1, out)).collect();
        out[at] = Step {
            kind: pk_forge::model::StepKind::MultiStep,
            substeps: children,
            ..out[at].clone()
        };
    }
    id
}

fn instant(rng: &mut StdRng) -> Timestamp {
    chrono::Utc.timestamp_opt(1_700_000_000 + rng.gen_range(0..10_000_000), 0).unwrap()
}

/// A random execution trace with members in canonical order.
pub fn trace(rng: &mut StdRng, index: usize) -> ExecutionTrace {
    let mut names = Names {
        base: format!("https://example.org/run/{index}/"),
        n: 0,
    };
    let id = names.iri("execution");
    let agents: Vec<Iri> = (0..3).map(|_| names.iri("agent")).collect();
    let steps: Vec<Iri> = (0..4).map(|_| names.iri("step")).collect();
    let mut t = ExecutionTrace {
        id: id.clone(),
        procedure: names.iri("procedure"),
        agent: pick(rng, &agents),
        status: pick(rng, &execution_statuses().members),
        started_at: maybe(rng, 0.8, instant),
        ended_at: maybe(rng, 0.5, instant),
        step_executions: Vec::new(),
        occurrences: Vec::new(),
        extras: names.extras(rng, &id),
    };
    for n in 1..=rng.gen_range(0..6) {
        t.step_executions.push(StepExecution {
            id: Iri::new(format!("{id}/step/{n}")).unwrap(),
            step: pick(rng, &steps),
            agent: pick(rng, &agents),
            started_at: maybe(rng, 0.9, instant),
            ended_at: maybe(rng, 0.6, instant),
        });
    }
    for n in 1..=rng.gen_range(0..5) {
        let kind = match rng.gen_range(0..3) {
            0 => OccurrenceKind::Feedback {
                text: text(rng),
                about: if rng.gen_bool(0.5) { t.procedure.clone() } else { id.clone() },
            },
            1 => OccurrenceKind::Question {
                text: text(rng),
                addressed_by: maybe(rng, 0.4, |_| names.iri("faq")),
            },
            _ => OccurrenceKind::Issue {
                error: names.iri("error"),
                cause: maybe(rng, 0.5, text),
                solution: maybe(rng, 0.5, text),
            },
        };
        t.occurrences.push(Occurrence {
            id: Iri::new(format!("{id}/occurrence/{n}")).unwrap(),
            kind,
            agent: pick(rng, &agents),
            at: instant(rng),
        });
    }
    t.sort_members();
    t
}

/// Terms drawn from a small vocabulary so random patterns hit often.
pub fn term_pool(rng: &mut StdRng) -> (Vec<RdfTerm>, Vec<RdfTerm>, Vec<RdfTerm>) {
    let _ = rng;
    let iri = |s: String| RdfTerm::Iri(Iri::new(format!("https://example.org/{s}")).unwrap());
    let subjects: Vec<RdfTerm> = (0..40)
        .map(|i| if i % 8 == 0 { RdfTerm::Blank(format!("b{i}")) } else { iri(format!("s{i}")) })
        .collect();
    let predicates: Vec<RdfTerm> = (0..8).map(|i| iri(format!("p{i}"))).collect();
    let mut objects = subjects.clone();
    objects.extend((0..15).map(|i| RdfTerm::Literal(Literal::string(format!("v{i}")))));
    objects.extend((0..5).map(|i| RdfTerm::Literal(Literal::lang(format!("v{i}"), "en"))));
    (subjects, predicates, objects)
}

pub fn graph(rng: &mut StdRng, size: usize) -> Graph {
    let (s, p, o) = term_pool(rng);
    let mut g = Graph::new();
    while g.len() < size {
        let t = Triple::new(
            s.choose(rng).unwrap().clone(),
            p.choose(rng).unwrap().clone(),
            o.choose(rng).unwrap().clone(),
        );
        g.insert(t).unwrap();
    }
    g
}

/// A pattern position: unbound, or bound to a pool term (which may or may
/// not occur in the graph).
pub fn pattern(rng: &mut StdRng) -> [Option<RdfTerm>; 3] {
    let (s, p, o) = term_pool(rng);
    let slot = |pool: &[RdfTerm], rng: &mut StdRng| {
        if rng.gen_bool(0.5) {
            Some(pool.choose(rng).unwrap().clone())
        } else {
            None
        }
    };
    [slot(&s, rng), slot(&p, rng), slot(&o, rng)]
}
