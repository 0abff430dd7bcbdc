mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pk_forge::fixtures;
use pk_forge::store::{load_snapshot, materialize_subclass_closure, save_snapshot, Graph, IndexOrder, SchemaHierarchy};
use pk_forge::term::{RdfTerm, Triple};

fn scan(g: &Graph, pat: &[Option<RdfTerm>; 3]) -> BTreeSet<Triple> {
    g.iter()
        .filter(|t| {
            pat[0].as_ref().is_none_or(|s| *s == t.subject)
                && pat[1].as_ref().is_none_or(|p| *p == t.predicate)
                && pat[2].as_ref().is_none_or(|o| *o == t.object)
        })
        .collect()
}

#[test]
fn match_agrees_with_linear_scan() {
    let mut rng = StdRng::seed_from_u64(0x5ca7);
    let g = common::gen::graph(&mut rng, 500);
    assert_eq!(g.len(), 500);
    for _ in 0..1000 {
        let pat = common::gen::pattern(&mut rng);
        let got: Vec<Triple> = g.match_pattern(pat[0].as_ref(), pat[1].as_ref(), pat[2].as_ref()).collect();
        let unique: BTreeSet<Triple> = got.iter().cloned().collect();
        assert_eq!(unique.len(), got.len(), "duplicates for {pat:?}");
        assert_eq!(unique, scan(&g, &pat), "pattern {pat:?}");
        if pat.iter().all(Option::is_some) {
            assert!(got.len() <= 1);
        }
    }
}

#[test]
fn every_index_serves_every_pattern() {
    let mut rng = StdRng::seed_from_u64(7);
    let g = common::gen::graph(&mut rng, 200);
    for _ in 0..200 {
        let pat = common::gen::pattern(&mut rng);
        let want = scan(&g, &pat);
        for order in IndexOrder::ALL {
            let got: BTreeSet<Triple> = g.match_with(order, pat[0].as_ref(), pat[1].as_ref(), pat[2].as_ref()).collect();
            assert_eq!(got, want, "{order:?} {pat:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// After any interleaving of inserts and removals the three indexes hold
    /// the same triples as a plain set.
    #[test]
    fn indexes_stay_coherent(seed in any::<u64>(), ops in 1usize..300) {
        let mut rng = StdRng::seed_from_u64(seed);
        let pool: Vec<Triple> = common::gen::graph(&mut rng, 60).iter().collect();
        let mut g = Graph::new();
        let mut model = BTreeSet::new();
        for _ in 0..ops {
            let t = pool[rng.gen_range(0..pool.len())].clone();
            if rng.gen_bool(0.6) {
                prop_assert_eq!(g.insert(t.clone()).unwrap(), model.insert(t));
            } else {
                prop_assert_eq!(g.remove(&t), model.remove(&t));
            }
        }
        prop_assert_eq!(g.len(), model.len());
        for order in IndexOrder::ALL {
            let all: BTreeSet<Triple> = g.match_with(order, None, None, None).collect();
            prop_assert_eq!(&all, &model);
        }
    }
}

#[test]
fn literal_subjects_are_rejected() {
    let mut g = Graph::new();
    let t = Triple::new(
        pk_forge::term::Literal::string("x"),
        fixtures::ex("p"),
        fixtures::ex("o"),
    );
    assert!(g.insert(t).is_err());
    assert!(g.is_empty());
}

#[test]
fn subclass_closure_adds_ancestor_types_once() {
    let g = fixtures::combined();
    let schema = SchemaHierarchy::pko();
    let closed = materialize_subclass_closure(&g, &schema).unwrap();
    let ty = pk_forge::vocab::rdf::TYPE.iri();
    let has = |s: &str, class: pk_forge::vocab::Term| {
        closed.contains(&Triple::new(fixtures::ex(s), ty.clone(), class.iri()))
    };
    use pk_forge::vocab::{dcat, pplan, prov};
    for p in ["LOTO-condenser-MSK", "boil-carrots"] {
        assert!(has(p, pplan::PLAN), "{p} lacks pplan:Plan");
        assert!(has(p, dcat::RESOURCE), "{p} lacks dcat:Resource");
    }
    assert!(has("LOTO-condenser-MSK/execution/2024-10-11/step/4", prov::ACTIVITY));
    assert!(has("LOTO-condenser-MSK/execution/2024-10-11", prov::ACTIVITY));
    assert!(has("boil-carrots/Step/1", pplan::STEP));
    assert!(has("ACME", prov::AGENT));
    assert!(closed.len() > g.len());
    let again = materialize_subclass_closure(&closed, &schema).unwrap();
    assert_eq!(pk_forge::io::ntriples::write(&again), pk_forge::io::ntriples::write(&closed));
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store.nt");
    let g = fixtures::combined();
    save_snapshot(&g, &path).unwrap();
    let back = load_snapshot(&path).unwrap();
    assert_eq!(pk_forge::io::ntriples::write(&back), pk_forge::io::ntriples::write(&g));
}
