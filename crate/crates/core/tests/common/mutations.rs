//! One or more targeted corruptions of the combined fixture per rule.

use std::time::{Duration, Instant};

use pk_forge::fixtures;
use pk_forge::io::{ntriples, parse_turtle};
use pk_forge::store::Graph;
use pk_forge::validate::{builtin_rules, validate, Severity};

const HEADER: &str = "@base <https://example.org/> .
@prefix ex: <https://example.org/> .
@prefix pko: <https://w3id.org/pko#> .
@prefix pko-ind: <https://w3id.org/pko/ind#> .
@prefix pplan: <http://purl.org/net/p-plan#> .
@prefix prov: <http://www.w3.org/ns/prov#> .
@prefix dcat: <http://www.w3.org/ns/dcat#> .
@prefix dct: <http://purl.org/dc/terms/> .
@prefix time: <http://www.w3.org/2006/time#> .
@prefix pro: <http://purl.org/spar/pro/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
";

pub struct Mutation {
    pub rule: &'static str,
    pub name: &'static str,
    /// N-Triples lines removed from the fixture.
    pub remove: &'static str,
    /// Turtle added to the fixture (prefixes above are in scope).
    pub add: &'static str,
}

impl Mutation {
    pub fn apply(&self, g: &mut Graph) {
        let gone = ntriples::parse(self.remove).expect("removal lines parse");
        for t in gone.iter() {
            assert!(g.remove(&t), "{}: fixture lacks {t}", self.name);
        }
        let extra = parse_turtle(&format!("{HEADER}{}", self.add)).expect("mutation parses").graph;
        g.merge(&extra);
    }
}

const EXEC: &str = "https://example.org/LOTO-condenser-MSK/execution/2024-10-11";

pub fn catalog() -> Vec<Mutation> {
    vec![
        Mutation {
            rule: "R01",
            name: "last LOTO step loops back to the first",
            remove: "",
            add: "<LOTO-condenser-MSK/Step/5> pko:nextStep <LOTO-condenser-MSK/Step/1> .",
        },
        Mutation {
            rule: "R01",
            name: "recipe substep points to itself",
            remove: "",
            add: "<boil-carrots/Step/2.2> pko:nextStep <boil-carrots/Step/2.2> .",
        },
        Mutation {
            rule: "R02",
            name: "LOTO step 1 gets a second successor",
            remove: "",
            add: "<LOTO-condenser-MSK/Step/1> pko:nextStep <LOTO-condenser-MSK/Step/3> .",
        },
        Mutation {
            rule: "R03",
            name: "procedure lists an untyped step",
            remove: "",
            add: "ex:LOTO-condenser-MSK pko:hasStep ex:not-a-step .",
        },
        Mutation {
            rule: "R03",
            name: "hasStep with a literal object",
            remove: "",
            add: "ex:boil-carrots pko:hasStep \"Step 3\" .",
        },
        Mutation {
            rule: "R04",
            name: "multistep without substeps",
            remove: "<https://example.org/boil-carrots/Step/2> <https://w3id.org/pko#hasStep> <https://example.org/boil-carrots/Step/2.1> .
<https://example.org/boil-carrots/Step/2> <https://w3id.org/pko#hasStep> <https://example.org/boil-carrots/Step/2.2> .",
            add: "",
        },
        Mutation {
            rule: "R04",
            name: "atomic step with a substep",
            remove: "",
            add: "<LOTO-condenser-MSK/Step/5> pko:hasStep ex:substep . ex:substep a pplan:Step .",
        },
        Mutation {
            rule: "R05",
            name: "procedure status given as a string",
            remove: "<https://example.org/LOTO-condenser-MSK> <https://w3id.org/pko#hasProcedureStatus> <https://w3id.org/pko#approved> .",
            add: "ex:LOTO-condenser-MSK pko:hasProcedureStatus \"approved\" .",
        },
        Mutation {
            rule: "R06",
            name: "execution status given as a string",
            remove: "<https://example.org/LOTO-condenser-MSK/execution/2024-10-11> <https://w3id.org/pko#hasExecutionStatus> <https://w3id.org/pko#inProgress> .",
            add: "<LOTO-condenser-MSK/execution/2024-10-11> pko:hasExecutionStatus \"in progress\" .",
        },
        Mutation {
            rule: "R07",
            name: "two versions succeed each other",
            remove: "",
            add: "ex:LOTO-v1 pko:nextVersion ex:LOTO-condenser-MSK . ex:LOTO-condenser-MSK pko:nextVersion ex:LOTO-v1 .",
        },
        Mutation {
            rule: "R07",
            name: "a version with two successors",
            remove: "",
            add: "ex:LOTO-v1 pko:nextVersion ex:LOTO-v2a, ex:LOTO-v2b .",
        },
        Mutation {
            rule: "R08",
            name: "next version outside the version set",
            remove: "",
            add: "ex:LOTO pko:hasVersion ex:LOTO-condenser-MSK . ex:LOTO-condenser-MSK pko:nextVersion ex:LOTO-v9 .",
        },
        Mutation {
            rule: "R08",
            name: "previousVersion without the matching nextVersion",
            remove: "",
            add: "ex:LOTO-v2 pko:previousVersion ex:LOTO-condenser-MSK .",
        },
        Mutation {
            rule: "R09",
            name: "LOTO execution runs a recipe step",
            remove: "",
            add: "<LOTO-condenser-MSK/execution/2024-10-11> pko:hasStepExecution ex:stray .
ex:stray a pko:StepExecution ; pplan:correspondsToStep <boil-carrots/Step/1.2> .",
        },
        Mutation {
            rule: "R10",
            name: "step execution ends before it starts",
            remove: "<https://example.org/LOTO-condenser-MSK/execution/2024-10-11/step/4> <http://www.w3.org/ns/prov#endedAtTime> \"2024-10-11T12:36:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .",
            add: "<LOTO-condenser-MSK/execution/2024-10-11/step/4> prov:endedAtTime \"2024-10-11T12:30:00Z\"^^xsd:dateTime .",
        },
        Mutation {
            rule: "R10",
            name: "malformed end time",
            remove: "",
            add: "<LOTO-condenser-MSK/execution/2024-10-11> prov:endedAtTime \"half past noon\" .",
        },
        Mutation {
            rule: "R11",
            name: "negative expected duration",
            remove: "<https://example.org/120-seconds> <http://www.w3.org/2006/time#numericDuration> \"120.0\"^^<http://www.w3.org/2001/XMLSchema#decimal> .",
            add: "ex:120-seconds time:numericDuration -120.0 .",
        },
        Mutation {
            rule: "R11",
            name: "duration in minutes",
            remove: "<https://example.org/120-seconds> <http://www.w3.org/2006/time#unitType> <http://www.w3.org/2006/time#unitSecond> .",
            add: "ex:120-seconds time:unitType time:unitMinute .",
        },
        Mutation {
            rule: "R12",
            name: "role period ends before it starts",
            remove: "",
            add: "ex:JohnDoe pro:holdsRoleInTime ex:JohnDoe-trainee .
ex:JohnDoe-trainee a pro:RoleInTime ; pro:withRole ex:trainee ;
    dct:temporal [ a dct:PeriodOfTime ;
        dcat:startDate \"2023-06-01T00:00:00Z\"^^xsd:dateTime ;
        dcat:endDate \"2023-01-01T00:00:00Z\"^^xsd:dateTime ] .",
        },
        Mutation {
            rule: "R13",
            name: "fallback step belongs to another procedure",
            remove: "",
            add: "<LOTO-condenser-MSK/Step/1> pko:hasPotentialError ex:E-900 .
ex:E-900 a pko:Error ; pko:hasFallbackStep <boil-carrots/Step/1.1> .",
        },
        Mutation {
            rule: "R14",
            name: "padlock required by an organization",
            remove: "",
            add: "ex:ACME pko-ind:requiresPadlock [ a pko-ind:StandardPadlock ] .",
        },
        Mutation {
            rule: "R14",
            name: "PPE required by a procedure",
            remove: "",
            add: "ex:boil-carrots pko-ind:requiresPPE ex:apron .",
        },
        Mutation {
            rule: "R15",
            name: "isolated energy source is untyped",
            remove: "",
            add: "<LOTO-condenser-MSK/Step/4> pko-ind:isolatesEnergySource ex:mystery-source .",
        },
    ]
}

pub struct MatrixRow {
    pub rule: &'static str,
    pub name: &'static str,
    pub detected: bool,
    /// Rules other than the target that also fired.
    pub side_effects: Vec<String>,
}

pub struct MatrixResult {
    pub clean_findings: usize,
    pub rows: Vec<MatrixRow>,
    pub elapsed: Duration,
}

impl MatrixResult {
    pub fn rules_covered(&self) -> Vec<&'static str> {
        let mut r: Vec<_> = self.rows.iter().map(|r| r.rule).collect();
        r.dedup();
        r
    }
}

pub fn run_matrix() -> MatrixResult {
    let start = Instant::now();
    let rules = builtin_rules();
    let clean = fixtures::combined();
    let clean_findings = validate(&clean, &rules).findings.len();
    let mut rows = Vec::new();
    for m in catalog() {
        let mut g = clean.clone();
        m.apply(&mut g);
        let report = validate(&g, &rules);
        let detected = report
            .findings
            .iter()
            .any(|f| f.rule == m.rule && f.severity == Severity::Violation);
        let side_effects = report
            .rule_ids()
            .into_iter()
            .filter(|r| *r != m.rule)
            .map(String::from)
            .collect();
        rows.push(MatrixRow {
            rule: m.rule,
            name: m.name,
            detected,
            side_effects,
        });
    }
    MatrixResult {
        clean_findings,
        rows,
        elapsed: start.elapsed(),
    }
}
