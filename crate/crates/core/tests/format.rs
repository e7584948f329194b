mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shex0::format::{
    parse_schema, parse_typed_graph, print_schema, print_schema_with_order, print_typed_graph,
};

#[test]
fn fixtures_round_trip() {
    for name in [
        "s0.sg",
        "s1.sg",
        "s1p.sg",
        "s2.sg",
        "s2p.sg",
        "s3.sg",
        "s3p.sg",
        "s2_opt.sg",
        "s3_opt.sg",
        "s3p_opt.sg",
    ] {
        let doc = schema(name);
        let text = print_schema_with_order(&doc.shape, doc.order.as_deref());
        assert_eq!(parse_schema(&text).unwrap(), doc, "{name}");
    }
    for name in ["g0.tg", "s1_family.tg", "s2_family.tg", "s3_family.tg"] {
        let g = graph(name);
        assert_eq!(
            parse_typed_graph(&print_typed_graph(&g)).unwrap(),
            g,
            "{name}"
        );
    }
}

#[test]
fn errors_carry_positions() {
    let e = parse_schema("A -> a::B\nB -> a::\n").unwrap_err();
    assert_eq!(e.line, 2);
    let e = parse_typed_graph("node x : A\nedge x a y\n").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(parse_typed_graph("node x : A\nedge x a x\nedge x a x\n").is_err());
}

proptest! {
    #[test]
    fn random_graphs_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_typed_graph(&mut rng, 12, 4, 3);
        prop_assert_eq!(parse_typed_graph(&print_typed_graph(&g)).unwrap(), g);
    }

    #[test]
    fn random_schemas_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some((s, _)) = random_schema(&mut rng, 5, 3) {
            prop_assert_eq!(parse_schema(&print_schema(&s)).unwrap().shape, s);
        }
    }
}
