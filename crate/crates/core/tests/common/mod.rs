//! Shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod answers;
pub mod gen;
pub mod mutations;

use std::path::{Path, PathBuf};

use pk_forge::io::{ntriples, parse_turtle, write_turtle};
use pk_forge::store::{isomorphic, Graph};
use pk_forge::vocab::default_prefixes;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn read_sorted(dir: &Path, ext: &str) -> Vec<(String, String)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect()
}

/// Every Turtle document of the round-trip suite: the two fixtures, the
/// standalone corpus and the sugared side of each sugar pair.
pub fn turtle_documents() -> Vec<(String, String)> {
    let mut docs = vec![
        ("fixture-loto".to_string(), pk_forge::fixtures::LOTO_TTL.to_string()),
        ("fixture-recipe".to_string(), pk_forge::fixtures::RECIPE_TTL.to_string()),
    ];
    docs.extend(read_sorted(&corpus_dir().join("roundtrip"), "ttl"));
    docs.extend(read_sorted(&corpus_dir().join("sugar"), "ttl").into_iter().map(|(n, t)| (format!("sugar-{n}"), t)));
    docs
}

/// `(name, sugared Turtle, hand-expanded N-Triples)`.
pub fn sugar_pairs() -> Vec<(String, String, String)> {
    let dir = corpus_dir().join("sugar");
    let ttl = read_sorted(&dir, "ttl");
    let nt = read_sorted(&dir, "nt");
    assert_eq!(ttl.len(), nt.len(), "every sugared document needs its expansion");
    ttl.into_iter()
        .zip(nt)
        .map(|((a, t), (b, n))| {
            assert_eq!(a, b);
            (a, t, n)
        })
        .collect()
}

/// parse → Turtle → parse and parse → N-Triples → parse, both isomorphic to
/// the first parse; Turtle output is a fixed point after one cycle.
pub fn round_trip(text: &str) -> Result<(), String> {
    let doc = parse_turtle(text).map_err(|d| format!("parse: {}", d.last().unwrap()))?;
    let g = doc.graph;
    let mut prefixes = default_prefixes();
    prefixes.extend_missing(&doc.prefixes);

    let ttl = write_turtle(&g, &prefixes);
    let back = parse_turtle(&ttl)
        .map_err(|d| format!("reparse of written Turtle: {}\n{ttl}", d.last().unwrap()))?
        .graph;
    if !isomorphic(&g, &back) {
        return Err(format!("Turtle round trip is not isomorphic:\n{ttl}"));
    }
    let again = write_turtle(&back, &prefixes);
    if again != ttl {
        return Err(format!("Turtle output is not a fixed point:\n{ttl}\n---\n{again}"));
    }

    let nt = ntriples::write(&g);
    let back = ntriples::parse(&nt).map_err(|d| format!("reparse of N-Triples: {d}"))?;
    if !isomorphic(&g, &back) {
        return Err("N-Triples round trip is not isomorphic".into());
    }
    Ok(())
}

/// The sugared document and its expansion denote the same graph.
pub fn sugar_matches(ttl: &str, nt: &str) -> Result<(), String> {
    let sugared = parse_turtle(ttl).map_err(|d| format!("parse: {}", d.last().unwrap()))?.graph;
    let expanded = ntriples::parse(nt).map_err(|d| format!("expansion: {d}"))?;
    if isomorphic(&sugared, &expanded) {
        Ok(())
    } else {
        Err(format!(
            "sugared form differs from its expansion:\n{}---\n{}",
            ntriples::write(&sugared),
            ntriples::write(&expanded)
        ))
    }
}

pub fn graph_of(ttl: &str) -> Graph {
    parse_turtle(ttl).expect("test document parses").graph
}
