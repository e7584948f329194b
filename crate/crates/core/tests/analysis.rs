mod common;

use common::*;
use shex0::analysis::{
    characterizing_typeset, cover_sets, derive_inclusion, is_obfuscated, linearize,
    realizable_typesets_bounded, typesets_of_graph, ContextStats, OccurTarget,
};
use shex0::{Context, Interval, Multiplicity, TypeName};

#[test]
fn bug_tracker_occurrences() {
    let g = graph("g0.tg");
    let stats = ContextStats::compute(&g, &Context::new("B", "s")).unwrap();
    let u = TypeName::new("U");
    let e = TypeName::new("E");
    let occ = stats.occur(OccurTarget::Type(&u));
    assert_eq!(occ.interval, Interval::exact(1));
    assert_eq!(occ.multiplicity, Multiplicity::One);
    let occ = stats.occur(OccurTarget::Type(&e));
    assert_eq!(occ.interval, Interval::new(0, Some(1)).unwrap());
    let stats = ContextStats::compute(&g, &Context::new("B", "r")).unwrap();
    let b = TypeName::new("B");
    assert_eq!(
        stats.occur(OccurTarget::Type(&b)).interval,
        Interval::new(0, Some(2)).unwrap()
    );
    assert_eq!(
        stats.occur(OccurTarget::Type(&b)).multiplicity,
        Multiplicity::Star
    );
}

#[test]
fn unobserved_context_is_an_error() {
    let g = graph("g0.tg");
    assert!(ContextStats::compute(&g, &Context::new("Nope", "s")).is_err());
}

#[test]
fn order_puts_included_types_first() {
    let family = typesets_of_graph(&graph("g0.tg")).unwrap();
    let incl = derive_inclusion(&family);
    // base order lists U before E, inclusion still wins
    let order = linearize(&incl, &names(&["U", "E", "B", "str"]));
    assert!(order.position(&TypeName::new("E")) < order.position(&TypeName::new("U")));
    assert_eq!(order.as_slice().len(), 4);
}

#[test]
fn characterizing_and_obfuscated_types() {
    let family = typesets_of_graph(&graph("s3_family.tg")).unwrap();
    let incl = derive_inclusion(&family);
    let t = TypeName::new("t");
    assert!(characterizing_typeset(&t, &family, &incl).is_none());
    assert!(is_obfuscated(&t, &family, &incl));
    let covers = cover_sets(&t, &family, &Default::default());
    assert_eq!(covers.len(), 2);
    let t1 = TypeName::new("t1");
    assert_eq!(
        characterizing_typeset(&t1, &family, &incl),
        Some(ts(&["t1"]))
    );
}

#[test]
fn bounded_search_finds_bug_tracker_typesets() {
    let s = schema("s0.sg").shape;
    let r = realizable_typesets_bounded(&s, 4);
    for expected in [ts(&["B"]), ts(&["U"]), ts(&["U", "E"]), ts(&["str"])] {
        assert!(r.family.contains(&expected), "{expected:?}");
    }
    // E requires an email, so it never stands alone without U
    assert!(!r.family.contains(&ts(&["E"])));
}
