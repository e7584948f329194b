#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use shex0::analysis::{realizable_typesets_bounded, TypesetFamily};
use shex0::format::{parse_schema, parse_typed_graph, SchemaDocument};
use shex0::{
    Graph, Label, Multiplicity, NodeId, ShapeGraph, TypeName, TypeSet, TypedGraph, Typing,
};

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn schema(name: &str) -> SchemaDocument {
    parse_schema(&fixture(name)).unwrap()
}

pub fn graph(name: &str) -> TypedGraph {
    parse_typed_graph(&fixture(name)).unwrap()
}

pub fn names(v: &[&str]) -> Vec<TypeName> {
    v.iter().map(|n| TypeName::new(*n)).collect()
}

pub fn ts(v: &[&str]) -> TypeSet {
    v.iter().map(|n| TypeName::new(*n)).collect()
}

/// Random proper typed graph.
pub fn random_typed_graph(
    rng: &mut impl Rng,
    max_nodes: usize,
    max_types: usize,
    max_labels: usize,
) -> TypedGraph {
    let n = rng.gen_range(1..=max_nodes);
    let k = rng.gen_range(1..=max_types);
    let l = rng.gen_range(1..=max_labels);
    let types: Vec<TypeName> = (0..k).map(|i| TypeName::new(format!("T{i}"))).collect();
    let labels: Vec<Label> = (0..l).map(|i| Label::new(format!("a{i}"))).collect();
    let nodes: Vec<NodeId> = (0..n).map(|i| NodeId::new(format!("n{i}"))).collect();
    let mut g = Graph::new();
    let mut typing = Typing::new();
    for v in &nodes {
        g.add_node(v.clone());
        let size = rng.gen_range(1..=k.min(3));
        for t in types.choose_multiple(rng, size) {
            typing.insert(v.clone(), t.clone());
        }
    }
    let edges = rng.gen_range(0..=2 * n);
    for _ in 0..edges {
        let s = nodes.choose(rng).unwrap();
        let t = nodes.choose(rng).unwrap();
        let a = labels.choose(rng).unwrap().clone();
        let _ = g.add_edge(s, a, t);
    }
    TypedGraph::new(g, typing).unwrap()
}

/// Random shape graph whose mandatory edges form no cycle, with the family
/// found by bounded search. Rejected (None) when a type is unrealizable.
pub fn random_schema(
    rng: &mut impl Rng,
    max_types: usize,
    max_labels: usize,
) -> Option<(ShapeGraph, TypesetFamily)> {
    let k = rng.gen_range(1..=max_types);
    let l = rng.gen_range(1..=max_labels);
    let types: Vec<TypeName> = (0..k).map(|i| TypeName::new(format!("T{i}"))).collect();
    let labels: Vec<Label> = (0..l).map(|i| Label::new(format!("a{i}"))).collect();
    let mut s = ShapeGraph::new();
    for t in &types {
        s.add_type(t.clone());
    }
    for (i, t) in types.iter().enumerate() {
        for a in &labels {
            for (j, u) in types.iter().enumerate() {
                if !rng.gen_bool(0.3) {
                    continue;
                }
                let optional = [Multiplicity::Opt, Multiplicity::Star];
                let any = Multiplicity::ALL[1..].to_vec();
                let m = if j > i {
                    *any.choose(rng).unwrap()
                } else {
                    *optional.choose(rng).unwrap()
                };
                s.set(t, a, u, m);
            }
        }
    }
    let family = realizable_typesets_bounded(&s, k + 2).family;
    if family.types().len() < k {
        return None;
    }
    Some((s, family))
}

/// Every assignment of edges to candidate types, checked against bounds.
pub fn brute_force_witness(
    candidates: &[Vec<TypeName>],
    arity: impl Fn(&TypeName) -> Multiplicity,
    universe: &BTreeSet<TypeName>,
) -> bool {
    fn go(
        i: usize,
        candidates: &[Vec<TypeName>],
        counts: &mut BTreeMap<TypeName, u64>,
        ok: &dyn Fn(&BTreeMap<TypeName, u64>) -> bool,
    ) -> bool {
        if i == candidates.len() {
            return ok(counts);
        }
        for t in &candidates[i] {
            *counts.entry(t.clone()).or_default() += 1;
            let found = go(i + 1, candidates, counts, ok);
            *counts.get_mut(t).unwrap() -= 1;
            if found {
                return true;
            }
        }
        false
    }
    let ok = |counts: &BTreeMap<TypeName, u64>| {
        universe.iter().all(|t| {
            arity(t)
                .interval()
                .contains(counts.get(t).copied().unwrap_or(0))
        })
    };
    go(0, candidates, &mut BTreeMap::new(), &ok)
}

/// Whether `node` has a witness for `ty` under `typing`, by enumeration.
pub fn naive_feasible(
    g: &Graph,
    s: &ShapeGraph,
    typing: &Typing,
    node: &NodeId,
    ty: &TypeName,
) -> bool {
    let mut labels: BTreeSet<Label> = s.labels();
    labels.extend(g.labels());
    let mut universe: BTreeSet<TypeName> = s.types().clone();
    universe.extend(typing.types());
    labels.iter().all(|a| {
        let candidates: Vec<Vec<TypeName>> = g
            .out_edges(node)
            .into_iter()
            .flatten()
            .filter(|(b, _)| b == a)
            .map(|(_, m)| typing.types_of(m).iter().cloned().collect())
            .collect();
        brute_force_witness(&candidates, |u| s.arity(ty, a, u), &universe)
    })
}

/// Greatest fixpoint by repeated full passes from the complete relation.
pub fn naive_maximal_typing(g: &Graph, s: &ShapeGraph) -> Typing {
    let mut typing = Typing::new();
    for n in g.nodes() {
        for t in s.types() {
            typing.insert(n.clone(), t.clone());
        }
    }
    loop {
        let drop: Vec<(NodeId, TypeName)> = typing
            .pairs()
            .filter(|(n, t)| !naive_feasible(g, s, &typing, n, t))
            .map(|(n, t)| (n.clone(), t.clone()))
            .collect();
        if drop.is_empty() {
            return typing.normalized();
        }
        for (n, t) in drop {
            typing.remove(&n, &t);
        }
    }
}
