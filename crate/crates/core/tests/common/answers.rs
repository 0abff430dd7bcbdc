//! Hand-derived answers to the catalog queries on the combined fixture.
//!
//! Cells are N-Triples terms; `_:*` matches any blank node.

use pk_forge::cq::{catalog, run, Bindings, ResultTable};
use pk_forge::store::Graph;
use pk_forge::term::RdfTerm;
use pk_forge::vocab::Iri;

const EX: &str = "https://example.org/";
const DT: &str = "^^<http://www.w3.org/2001/XMLSchema#dateTime>";

pub struct Expected {
    pub id: &'static str,
    pub bindings: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<String>>,
}

fn ex(local: &str) -> String {
    format!("<{EX}{local}>")
}

pub fn expected() -> Vec<Expected> {
    let loto = "LOTO-condenser-MSK";
    let exec = "LOTO-condenser-MSK/execution/2024-10-11";
    let step4 = "LOTO-condenser-MSK/Step/4";
    vec![
        Expected {
            id: "CQ01",
            bindings: vec![("procedure", loto)],
            rows: vec![vec![ex("ACME-condensers")]],
        },
        Expected {
            id: "CQ02",
            bindings: vec![("procedure", loto)],
            rows: vec![vec![ex("condenser-right-side-picture")]],
        },
        Expected {
            id: "CQ03",
            bindings: vec![("procedure", loto)],
            rows: vec![vec![ex("ACME")]],
        },
        Expected {
            id: "CQ04",
            bindings: vec![("procedure", loto)],
            rows: (1..=5).map(|i| vec![ex(&format!("{loto}/Step/{i}"))]).collect(),
        },
        Expected {
            id: "CQ05",
            bindings: vec![("step", step4)],
            rows: vec![vec![ex(&format!("{loto}/Step/5"))]],
        },
        Expected {
            id: "CQ06",
            bindings: vec![("step", step4)],
            rows: vec![vec![
                ex("120-seconds"),
                "\"120.0\"^^<http://www.w3.org/2001/XMLSchema#decimal>".into(),
                "<http://www.w3.org/2006/time#unitSecond>".into(),
            ]],
        },
        Expected {
            id: "CQ07",
            bindings: vec![("step", step4)],
            rows: vec![vec!["_:*".into()]],
        },
        Expected {
            id: "CQ08",
            bindings: vec![("execution", exec)],
            rows: vec![vec![ex(step4), format!("\"2024-10-11T12:33:00Z\"{DT}"), ex("JohnDoe")]],
        },
        Expected {
            id: "CQ09",
            bindings: vec![("execution", exec)],
            rows: vec![vec![
                ex("JohnDoe"),
                "\"Where should I keep the key of the padlock?\"".into(),
                format!("\"2024-10-11T12:36:30Z\"{DT}"),
            ]],
        },
        Expected {
            id: "CQ10",
            bindings: vec![("procedure", "boil-carrots")],
            rows: ["1", "1.1", "1.2", "1.3", "2", "2.1", "2.2"]
                .iter()
                .map(|s| vec![ex(&format!("boil-carrots/Step/{s}"))])
                .collect(),
        },
        Expected {
            id: "CQ11",
            bindings: vec![("procedure", loto)],
            rows: vec![vec![ex("LOTO-condenser-MSK-manual")]],
        },
    ]
}

pub fn bindings(pairs: &[(&str, &str)]) -> Bindings {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), RdfTerm::Iri(Iri::new(format!("{EX}{v}")).unwrap())))
        .collect()
}

fn cell_matches(want: &str, got: &RdfTerm) -> bool {
    if want == "_:*" {
        got.is_blank()
    } else {
        want == got.to_string()
    }
}

/// Exact row-set comparison; `Err` describes the difference.
pub fn compare(e: &Expected, table: &ResultTable) -> Result<(), String> {
    let mut want = e.rows.clone();
    want.sort();
    let mut got: Vec<&Vec<RdfTerm>> = table.rows.iter().collect();
    got.sort_by_key(|r| r.iter().map(|t| t.to_string()).collect::<Vec<_>>());
    let same = want.len() == got.len()
        && want
            .iter()
            .zip(&got)
            .all(|(w, g)| w.len() == g.len() && w.iter().zip(g.iter()).all(|(a, b)| cell_matches(a, b)));
    if same {
        Ok(())
    } else {
        Err(format!("{}: expected {:?}, got\n{}", e.id, want, table.to_tsv()))
    }
}

pub fn check_all(g: &Graph) -> Vec<(&'static str, Result<(), String>)> {
    expected()
        .iter()
        .map(|e| {
            let q = catalog().get(e.id).expect("catalog query");
            let outcome = run(g, q, &bindings(&e.bindings))
                .map_err(|err| err.to_string())
                .and_then(|t| compare(e, &t));
            (e.id, outcome)
        })
        .collect()
}
