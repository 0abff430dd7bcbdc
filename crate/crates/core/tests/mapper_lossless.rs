mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use pk_forge::fixtures::{self, ex};
use pk_forge::mapper::{lift_all_procedures, lift_execution, lift_procedure, lower_execution, lower_procedure};
use pk_forge::model::{flatten, OrderMode, StepKind};
use pk_forge::store::isomorphic;

#[test]
fn hundred_random_procedures_survive_lower_lift() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for i in 0..100 {
        let (p, steps, errors) = common::gen::procedure(&mut rng, i);
        let g = lower_procedure(&p, &steps, &errors);
        let back = lift_procedure(&g, &p.id).unwrap_or_else(|e| panic!("procedure {i}: {e}"));
        assert_eq!(back, (p, steps, errors), "procedure {i}");
    }
}

#[test]
fn hundred_random_traces_survive_lower_lift() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for i in 0..100 {
        let t = common::gen::trace(&mut rng, i);
        let g = lower_execution(&t);
        let back = lift_execution(&g, &t.id).unwrap_or_else(|e| panic!("trace {i}: {e}"));
        assert_eq!(back, t, "trace {i}");
    }
}

#[test]
fn fixtures_relower_to_themselves() {
    // lifting keeps unmapped triples as extras, so lowering the lifted
    // bundle reproduces each procedure's own triples
    let g = fixtures::combined();
    let (bundles, report) = lift_all_procedures(&g);
    assert!(report.skipped.is_empty(), "{:?}", report.skipped);
    assert_eq!(report.lifted.len(), 2);
    for (p, steps, errors) in &bundles {
        let lowered = lower_procedure(p, steps, errors);
        for t in lowered.iter() {
            assert!(g.contains(&t), "{t} is not in the fixture");
        }
    }
    let trace = lift_execution(&g, &ex(fixtures::loto::EXECUTION)).unwrap();
    let lowered = lower_execution(&trace);
    for t in lowered.iter() {
        assert!(g.contains(&t), "{t} is not in the fixture");
    }
}

#[test]
fn recipe_lifts_with_parts_in_order() {
    let g = fixtures::recipe();
    let (p, steps, _) = lift_procedure(&g, &ex(fixtures::recipe::PROCEDURE)).unwrap();
    assert_eq!(p.steps, [ex("boil-carrots/Step/1"), ex("boil-carrots/Step/2")]);
    assert_eq!(steps[0].kind, StepKind::MultiStep);
    let s12 = steps.iter().find(|s| s.id == ex(fixtures::recipe::STEP_1_2)).unwrap();
    assert_eq!(s12.actions.len(), 1);
    assert_eq!(s12.tools.len(), 1);
    assert!(s12.verification.is_some());
}

#[test]
fn random_procedure_graphs_are_stable_under_relift() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for i in 0..20 {
        let (p, steps, errors) = common::gen::procedure(&mut rng, i);
        let g = lower_procedure(&p, &steps, &errors);
        let (p2, s2, e2) = lift_procedure(&g, &p.id).unwrap();
        assert!(isomorphic(&g, &lower_procedure(&p2, &s2, &e2)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// flatten visits atomic steps in depth-first order, exactly once each.
    #[test]
    fn flatten_matches_preorder_of_leaves(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (p, steps, errors) = common::gen::procedure(&mut rng, 0);
        let g = lower_procedure(&p, &steps, &errors);
        let leaves: Vec<_> = steps
            .iter()
            .filter(|s| s.kind == StepKind::Atomic)
            .map(|s| s.id.clone())
            .collect();
        prop_assert_eq!(flatten(&g, &p.id, None, OrderMode::Strict).unwrap(), leaves);
    }
}
