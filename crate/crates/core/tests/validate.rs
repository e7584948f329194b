mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shex0::interval::Interval;
use shex0::validate::{check_membership, maximal_typing, Mode};
use shex0::witness::WitnessProblem;
use shex0::{NodeId, TypeName};

#[test]
fn bug_tracker_is_valid_in_both_modes() {
    let g = graph("g0.tg");
    let s = schema("s0.sg").shape;
    assert!(check_membership(&g, &s, Mode::Witness).is_valid());
    // the declared typing is the maximal one
    assert!(check_membership(&g, &s, Mode::Strict).is_valid());
}

#[test]
fn dropping_a_mandatory_edge_is_reported() {
    let text = fixture("g0.tg").replace("edge b2 d lit\n", "");
    let g = shex0::format::parse_typed_graph(&text).unwrap();
    let v = check_membership(&g, &schema("s0.sg").shape, Mode::Witness);
    assert_eq!(v.diagnostics.len(), 1);
    let d = &v.diagnostics[0];
    assert_eq!(d.node, NodeId::new("b2"));
    assert_eq!(d.ty, Some(TypeName::new("B")));
    assert_eq!(
        d.label.as_ref().map(|l| l.to_string()).as_deref(),
        Some("d")
    );
}

#[test]
fn maximal_typing_of_bug_tracker_matches_declaration() {
    let g = graph("g0.tg");
    let t = maximal_typing(&g.graph, &schema("s0.sg").shape);
    assert_eq!(t.normalized(), g.typing.clone().normalized());
}

fn random_problem(rng: &mut impl Rng, edges: usize) -> WitnessProblem {
    let k = rng.gen_range(1..=4);
    let candidates = (0..edges)
        .map(|_| {
            let all: Vec<usize> = (0..k).collect();
            let n = rng.gen_range(1..=k);
            all.choose_multiple(rng, n).copied().collect()
        })
        .collect();
    let bounds = (0..k)
        .map(|_| {
            let lo = rng.gen_range(0..=3);
            let hi = if rng.gen_bool(0.3) {
                None
            } else {
                Some(lo + rng.gen_range(0..=3))
            };
            Interval::new(lo, hi).unwrap()
        })
        .collect();
    WitnessProblem::new(candidates, bounds)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flow_agrees_with_exhaustive_search(seed in any::<u64>(), edges in 0usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng, edges);
        prop_assert_eq!(p.solve_flow(), p.solve_exhaustive());
    }

    #[test]
    fn maximal_typing_is_the_enumerated_fixpoint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_typed_graph(&mut rng, 6, 3, 2);
        let Some((s, _)) = random_schema(&mut rng, 3, 2) else { return Ok(()) };
        prop_assert_eq!(maximal_typing(&g.graph, &s).normalized(), naive_maximal_typing(&g.graph, &s));
    }

    #[test]
    fn maximal_typing_passes_witness_mode(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_typed_graph(&mut rng, 10, 3, 2);
        let Some((s, _)) = random_schema(&mut rng, 3, 2) else { return Ok(()) };
        let t = maximal_typing(&g.graph, &s);
        let tg = shex0::TypedGraph { graph: g.graph.clone(), typing: t };
        // nodes may end up untyped; only witness failures count here
        let v = check_membership(&tg, &s, Mode::Witness);
        prop_assert!(v.diagnostics.iter().all(|d| d.ty.is_none()), "{:?}", v.diagnostics);
    }
}
