use std::collections::{BTreeMap, BTreeSet};

use super::{focus_of, Check, Context, Finding, Severity};
use crate::model::{parse_timestamp, OrderMode};
use crate::store::instance_of;
use crate::term::RdfTerm;
use crate::vocab::{
    dcat, dct, execution_statuses, pko, pko_ind, pplan, pro, procedure_statuses, prov, rdf, time,
    ControlledVocab, Term,
};

pub(super) const CATALOG: &[(&str, &str, Severity, Check)] = &[
    ("R01", "nextStep links among the steps of one container are acyclic", Severity::Violation, r01),
    ("R02", "nextStep links among the steps of one container do not branch", Severity::Violation, r02),
    ("R03", "every hasStep object is a pplan:Step or pplan:MultiStep", Severity::Violation, r03),
    ("R04", "a multistep has at least one substep; an atomic step has none", Severity::Violation, r04),
    ("R05", "procedure status is a ProcedureStatus individual", Severity::Warning, r05),
    ("R06", "execution status is a ProcedureExecutionStatus individual", Severity::Warning, r06),
    ("R07", "nextVersion links form acyclic, non-branching chains", Severity::Violation, r07),
    ("R08", "hasVersion membership agrees with the nextVersion chain", Severity::Violation, r08),
    ("R09", "an executed step belongs to the executed procedure", Severity::Violation, r09),
    ("R10", "activities do not end before they start", Severity::Violation, r10),
    ("R11", "expected durations are non-negative numbers of seconds", Severity::Violation, r11),
    ("R12", "role periods do not end before they start", Severity::Violation, r12),
    ("R13", "an error's fallback step belongs to every procedure that can raise it", Severity::Violation, r13),
    ("R14", "padlocks and PPE are required by steps only", Severity::Violation, r14),
    ("R15", "isolated energy sources are typed pko-ind:EnergySource", Severity::Violation, r15),
];

fn push(out: &mut Vec<Finding>, rule: &str, focus: &RdfTerm, severity: Severity, message: String) {
    out.push(Finding {
        rule: rule.to_string(),
        focus: focus_of(focus),
        message,
        severity,
    });
}

fn violation(out: &mut Vec<Finding>, rule: &str, focus: &RdfTerm, message: String) {
    push(out, rule, focus, Severity::Violation, message);
}

/// `hasStep` children of every container, keyed by container.
fn containers(ctx: &Context<'_>) -> BTreeMap<RdfTerm, BTreeSet<RdfTerm>> {
    let mut out: BTreeMap<RdfTerm, BTreeSet<RdfTerm>> = BTreeMap::new();
    for (s, o) in ctx.graph.pairs(&pko::HAS_STEP.iri()) {
        if !matches!(o, RdfTerm::Literal(_)) {
            out.entry(s).or_default().insert(o);
        }
    }
    out
}

/// `nextStep` edges whose ends are both in `children`.
fn step_edges(ctx: &Context<'_>, children: &BTreeSet<RdfTerm>) -> Vec<(RdfTerm, RdfTerm)> {
    ctx.graph
        .pairs(&pko::NEXT_STEP.iri())
        .into_iter()
        .filter(|(a, b)| children.contains(a) && children.contains(b))
        .collect()
}

/// Nodes lying on a directed cycle.
fn on_cycle(edges: &[(RdfTerm, RdfTerm)]) -> BTreeSet<RdfTerm> {
    let mut succ: BTreeMap<&RdfTerm, Vec<&RdfTerm>> = BTreeMap::new();
    for (a, b) in edges {
        succ.entry(a).or_default().push(b);
    }
    let mut out = BTreeSet::new();
    for &start in succ.keys() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&RdfTerm> = succ[start].clone();
        while let Some(n) = stack.pop() {
            if n == start {
                out.insert(start.clone());
                break;
            }
            if seen.insert(n) {
                if let Some(next) = succ.get(n) {
                    stack.extend(next.iter().copied());
                }
            }
        }
    }
    out
}

/// Nodes with more than one successor or predecessor; self-loops are left
/// to the cycle rules.
fn branching(edges: &[(RdfTerm, RdfTerm)]) -> BTreeSet<RdfTerm> {
    let mut out_deg: BTreeMap<&RdfTerm, usize> = BTreeMap::new();
    let mut in_deg: BTreeMap<&RdfTerm, usize> = BTreeMap::new();
    for (a, b) in edges.iter().filter(|(a, b)| a != b) {
        *out_deg.entry(a).or_default() += 1;
        *in_deg.entry(b).or_default() += 1;
    }
    out_deg
        .into_iter()
        .chain(in_deg)
        .filter(|(_, d)| *d > 1)
        .map(|(n, _)| n.clone())
        .collect()
}

fn r01(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    for (container, children) in containers(ctx) {
        for n in on_cycle(&step_edges(ctx, &children)) {
            let msg = format!("nextStep cycle among the steps of {}", container);
            violation(out, "R01", &n, msg);
        }
    }
}

fn r02(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    if ctx.order == OrderMode::Partial {
        return;
    }
    for (container, children) in containers(ctx) {
        for n in branching(&step_edges(ctx, &children)) {
            let msg = format!(
                "more than one nextStep successor or predecessor among the steps of {}",
                container
            );
            violation(out, "R02", &n, msg);
        }
    }
}

fn r03(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let step = pplan::STEP.iri();
    for (s, o) in ctx.graph.pairs(&pko::HAS_STEP.iri()) {
        if let RdfTerm::Literal(_) = o {
            violation(out, "R03", &s, "hasStep points to a literal".into());
        } else if !instance_of(ctx.graph, &o, &step, &ctx.schema) {
            let msg = format!("step of {} is not typed pplan:Step or pplan:MultiStep", s);
            violation(out, "R03", &o, msg);
        }
    }
}

fn typed(ctx: &Context<'_>, class: Term) -> BTreeSet<RdfTerm> {
    let class = class.iri();
    let mut out = BTreeSet::new();
    for (s, o) in ctx.graph.pairs(&rdf::TYPE.iri()) {
        if o.as_iri().is_some_and(|c| ctx.schema.entails(c, &class)) {
            out.insert(s);
        }
    }
    out
}

fn r04(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let multi = typed(ctx, pplan::MULTI_STEP);
    let has_step = pko::HAS_STEP.iri();
    for s in typed(ctx, pplan::STEP) {
        let substeps = ctx.graph.objects(&s, &has_step).len();
        if multi.contains(&s) && substeps == 0 {
            violation(out, "R04", &s, "multistep has no substeps".into());
        } else if !multi.contains(&s) && substeps > 0 {
            violation(out, "R04", &s, format!("atomic step has {substeps} substep(s)"));
        }
    }
}

fn membership(
    ctx: &Context<'_>,
    out: &mut Vec<Finding>,
    rule: &str,
    property: Term,
    vocab: ControlledVocab,
) {
    for (s, o) in ctx.graph.pairs(&property.iri()) {
        match &o {
            RdfTerm::Literal(l) => {
                let msg = format!("{} is a literal ({:?}), not a {} individual", property.curie(), l.lexical(), vocab.name);
                violation(out, rule, &s, msg);
            }
            RdfTerm::Iri(i) if vocab.contains(i) => {}
            other => {
                let msg = format!("{} {} is outside the {} vocabulary", property.curie(), other, vocab.name);
                push(out, rule, &s, Severity::Warning, msg);
            }
        }
    }
}

fn r05(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    membership(ctx, out, "R05", pko::HAS_PROCEDURE_STATUS, procedure_statuses());
}

fn r06(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    membership(ctx, out, "R06", pko::HAS_EXECUTION_STATUS, execution_statuses());
}

fn r07(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let edges = ctx.graph.pairs(&pko::NEXT_VERSION.iri());
    for n in on_cycle(&edges) {
        violation(out, "R07", &n, "nextVersion cycle".into());
    }
    for n in branching(&edges) {
        violation(out, "R07", &n, "more than one next or previous version".into());
    }
}

fn r08(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let next = pko::NEXT_VERSION.iri();
    let mut groups: BTreeMap<RdfTerm, BTreeSet<RdfTerm>> = BTreeMap::new();
    for (a, v) in ctx.graph.pairs(&pko::HAS_VERSION.iri()) {
        groups.entry(a).or_default().insert(v);
    }
    for (a, members) in &groups {
        for v in members {
            for w in ctx.graph.objects(v, &next) {
                if !members.contains(&w) {
                    let msg = format!(
                        "next version {} is not a version of {}",
                        w,
                        a
                    );
                    violation(out, "R08", v, msg);
                }
            }
            for u in ctx.graph.subjects(&next, v) {
                if !members.contains(&u) {
                    let msg = format!(
                        "previous version {} is not a version of {}",
                        u,
                        a
                    );
                    violation(out, "R08", v, msg);
                }
            }
        }
    }
    for (x, y) in ctx.graph.pairs(&pko::PREVIOUS_VERSION.iri()) {
        if !ctx.graph.objects(&y, &next).contains(&x) {
            let msg = format!("previousVersion {} has no matching nextVersion", y);
            violation(out, "R08", &x, msg);
        }
    }
}

/// Nodes reachable from `root` through one or more `hasStep` links.
fn step_closure(ctx: &Context<'_>, root: &RdfTerm) -> BTreeSet<RdfTerm> {
    let has_step = pko::HAS_STEP.iri();
    let mut seen = BTreeSet::new();
    let mut stack = vec![root.clone()];
    while let Some(n) = stack.pop() {
        for c in ctx.graph.objects(&n, &has_step) {
            if seen.insert(c.clone()) {
                stack.push(c);
            }
        }
    }
    seen
}

fn r09(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let corresponds = pplan::CORRESPONDS_TO_STEP.iri();
    let executes = pko::EXECUTES.iri();
    for (exec, se) in ctx.graph.pairs(&pko::HAS_STEP_EXECUTION.iri()) {
        let procedures = ctx.graph.objects(&exec, &executes);
        if procedures.is_empty() {
            continue;
        }
        let reachable: BTreeSet<RdfTerm> =
            procedures.iter().flat_map(|p| step_closure(ctx, p)).collect();
        for step in ctx.graph.objects(&se, &corresponds) {
            if !reachable.contains(&step) {
                let msg = format!(
                    "step {} is not part of the executed procedure",
                    step
                );
                violation(out, "R09", &se, msg);
            }
        }
    }
}

/// Checks `start ≤ end` over two dateTime properties of every subject.
fn ordered_times(ctx: &Context<'_>, out: &mut Vec<Finding>, rule: &str, start: Term, end: Term) {
    let mut subjects: BTreeMap<RdfTerm, (Vec<RdfTerm>, Vec<RdfTerm>)> = BTreeMap::new();
    for (s, o) in ctx.graph.pairs(&start.iri()) {
        subjects.entry(s).or_default().0.push(o);
    }
    for (s, o) in ctx.graph.pairs(&end.iri()) {
        subjects.entry(s).or_default().1.push(o);
    }
    for (s, (starts, ends)) in subjects {
        let mut parse = |values: &[RdfTerm], prop: Term| -> Vec<_> {
            let mut times = Vec::new();
            for v in values {
                match v.as_literal().and_then(|l| parse_timestamp(l.lexical())) {
                    Some(t) => times.push(t),
                    None => {
                        let msg = format!("{} value {} is not an xsd:dateTime", prop.curie(), v);
                        violation(out, rule, &s, msg);
                    }
                }
            }
            times
        };
        let starts = parse(&starts, start);
        let ends = parse(&ends, end);
        if let (Some(latest_start), Some(earliest_end)) = (starts.iter().max(), ends.iter().min()) {
            if earliest_end < latest_start {
                let msg = format!(
                    "ends ({}) before it starts ({})",
                    crate::model::format_timestamp(earliest_end),
                    crate::model::format_timestamp(latest_start)
                );
                violation(out, rule, &s, msg);
            }
        }
    }
}

fn r10(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    ordered_times(ctx, out, "R10", prov::STARTED_AT_TIME, prov::ENDED_AT_TIME);
}

fn r11(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let second = time::UNIT_SECOND.iri();
    for (s, d) in ctx.graph.pairs(&pko::HAS_EXPECTED_DURATION.iri()) {
        if let RdfTerm::Literal(_) = d {
            violation(out, "R11", &s, "expected duration must be a time:Duration node".into());
            continue;
        }
        let values = ctx.graph.objects(&d, &time::NUMERIC_DURATION.iri());
        let numbers: Vec<Option<f64>> = values
            .iter()
            .map(|v| v.as_literal().and_then(|l| l.as_f64()))
            .collect();
        if numbers.is_empty() {
            violation(out, "R11", &s, "expected duration has no time:numericDuration".into());
        }
        for (v, n) in values.iter().zip(&numbers) {
            match n {
                None => violation(out, "R11", &s, format!("duration value {v} is not a number")),
                Some(x) if !x.is_finite() || *x < 0.0 => {
                    violation(out, "R11", &s, format!("duration value {x} is negative or not finite"))
                }
                Some(_) => {}
            }
        }
        let units = ctx.graph.objects(&d, &time::UNIT_TYPE.iri());
        if units.is_empty() {
            violation(out, "R11", &s, "expected duration has no time:unitType".into());
        }
        for u in units {
            if u.as_iri() != Some(&second) {
                violation(out, "R11", &s, format!("duration unit {} is not time:unitSecond", u));
            }
        }
    }
}

fn r12(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let role_in_time = pro::ROLE_IN_TIME.iri();
    let with_role = pro::WITH_ROLE.iri();
    let mut findings = Vec::new();
    ordered_times(ctx, &mut findings, "R12", dcat::START_DATE, dcat::END_DATE);
    // report on the role node that owns the period
    let owners: BTreeMap<String, Vec<RdfTerm>> = ctx
        .graph
        .pairs(&dct::TEMPORAL.iri())
        .into_iter()
        .filter(|(r, _)| {
            instance_of(ctx.graph, r, &role_in_time, &ctx.schema)
                || !ctx.graph.objects(r, &with_role).is_empty()
        })
        .fold(BTreeMap::new(), |mut m, (r, p)| {
            m.entry(focus_of(&p)).or_insert_with(Vec::new).push(r);
            m
        });
    for f in findings {
        if let Some(roles) = owners.get(&f.focus) {
            for r in roles {
                violation(out, "R12", r, format!("role period {}", f.message));
            }
        }
    }
}

fn r13(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let potential = pko::HAS_POTENTIAL_ERROR.iri();
    let procedures = typed(ctx, pko::PROCEDURE);
    let closures: Vec<(RdfTerm, BTreeSet<RdfTerm>)> = procedures
        .into_iter()
        .map(|p| {
            let c = step_closure(ctx, &p);
            (p, c)
        })
        .collect();
    for (err, fallback) in ctx.graph.pairs(&pko::HAS_FALLBACK_STEP.iri()) {
        let raisers = ctx.graph.subjects(&potential, &err);
        for (p, steps) in &closures {
            let raises = raisers.iter().any(|s| steps.contains(s));
            if raises && !steps.contains(&fallback) {
                let msg = format!(
                    "fallback step {} is not a step of {}, which can raise this error",
                    fallback,
                    p
                );
                violation(out, "R13", &err, msg);
            }
        }
    }
}

fn r14(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let step = pplan::STEP.iri();
    for property in [pko_ind::REQUIRES_PADLOCK, pko_ind::REQUIRES_PPE] {
        let subjects: BTreeSet<RdfTerm> =
            ctx.graph.pairs(&property.iri()).into_iter().map(|(s, _)| s).collect();
        for s in subjects {
            if !instance_of(ctx.graph, &s, &step, &ctx.schema) {
                violation(out, "R14", &s, format!("{} used on a node that is not a step", property.curie()));
            }
        }
    }
}

fn r15(ctx: &Context<'_>, out: &mut Vec<Finding>) {
    let source = pko_ind::ENERGY_SOURCE.iri();
    for (s, o) in ctx.graph.pairs(&pko_ind::ISOLATES_ENERGY_SOURCE.iri()) {
        if !instance_of(ctx.graph, &o, &source, &ctx.schema) {
            let msg = format!("energy source isolated by {} is not typed pko-ind:EnergySource", s);
            violation(out, "R15", &o, msg);
        }
    }
}
