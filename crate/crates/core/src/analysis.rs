//! Typesets, derived inclusion between types, and per-context occurrence
//! statistics.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::graph::{TypeSet, TypedGraph};
use crate::interval::{Interval, Multiplicity};
use crate::shape::{Context, ShapeGraph};
use crate::symbol::{Label, NodeId, TypeName};
use crate::witness::WitnessProblem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("node `{0}` has an empty typing")]
    Improper(NodeId),
    #[error("context {0} unobserved: no node carries its type")]
    ContextUnobserved(Context),
    #[error("a typeset family cannot contain the empty typeset")]
    EmptyTypeset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    FromGraph,
    BoundedSearch,
    Explicit,
}

/// A finite set of nonempty typesets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypesetFamily {
    members: BTreeSet<TypeSet>,
    provenance: Provenance,
}

impl TypesetFamily {
    pub fn new(
        members: impl IntoIterator<Item = TypeSet>,
        provenance: Provenance,
    ) -> Result<Self, AnalysisError> {
        let members: BTreeSet<TypeSet> = members.into_iter().collect();
        if members.iter().any(BTreeSet::is_empty) {
            return Err(AnalysisError::EmptyTypeset);
        }
        Ok(TypesetFamily {
            members,
            provenance,
        })
    }

    pub fn explicit(members: impl IntoIterator<Item = TypeSet>) -> Result<Self, AnalysisError> {
        Self::new(members, Provenance::Explicit)
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn members(&self) -> &BTreeSet<TypeSet> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, ts: &TypeSet) -> bool {
        self.members.contains(ts)
    }

    /// Every type occurring in some member.
    pub fn types(&self) -> BTreeSet<TypeName> {
        self.members.iter().flatten().cloned().collect()
    }

    pub fn containing<'a>(&'a self, t: &'a TypeName) -> impl Iterator<Item = &'a TypeSet> + 'a {
        self.members.iter().filter(move |ts| ts.contains(t))
    }

    pub fn union(&self, other: &TypesetFamily) -> TypesetFamily {
        let provenance = if self.provenance == other.provenance {
            self.provenance
        } else {
            Provenance::Explicit
        };
        TypesetFamily {
            members: self.members.union(&other.members).cloned().collect(),
            provenance,
        }
    }
}

pub fn typesets_of_graph(g: &TypedGraph) -> Result<TypesetFamily, AnalysisError> {
    let mut members = BTreeSet::new();
    for n in g.graph.nodes() {
        let ts = g.typing.types_of(n);
        if ts.is_empty() {
            return Err(AnalysisError::Improper(n.clone()));
        }
        members.insert(ts.clone());
    }
    Ok(TypesetFamily {
        members,
        provenance: Provenance::FromGraph,
    })
}

/// Preorder `t ⊆ s` on types: every typeset containing `t` contains `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionRelation {
    types: BTreeSet<TypeName>,
    pairs: BTreeSet<(TypeName, TypeName)>,
}

impl InclusionRelation {
    pub fn types(&self) -> &BTreeSet<TypeName> {
        &self.types
    }

    /// Types outside the relation are only related to themselves.
    pub fn includes(&self, t: &TypeName, s: &TypeName) -> bool {
        t == s || self.pairs.contains(&(t.clone(), s.clone()))
    }

    pub fn equivalent(&self, t: &TypeName, s: &TypeName) -> bool {
        self.includes(t, s) && self.includes(s, t)
    }

    pub fn strictly_included(&self, t: &TypeName, s: &TypeName) -> bool {
        self.includes(t, s) && !self.includes(s, t)
    }

    /// All pairs `(t, s)` with `t ⊆ s`, reflexive ones included.
    pub fn pairs(&self) -> impl Iterator<Item = (&TypeName, &TypeName)> + '_ {
        self.pairs.iter().map(|(t, s)| (t, s))
    }

    pub fn class_of(&self, t: &TypeName) -> BTreeSet<TypeName> {
        let mut class: BTreeSet<TypeName> = self
            .types
            .iter()
            .filter(|s| self.equivalent(t, s))
            .cloned()
            .collect();
        class.insert(t.clone());
        class
    }

    pub fn classes(&self) -> Vec<BTreeSet<TypeName>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for t in &self.types {
            if seen.contains(t) {
                continue;
            }
            let class = self.class_of(t);
            seen.extend(class.iter().cloned());
            out.push(class);
        }
        out
    }
}

pub fn derive_inclusion(family: &TypesetFamily) -> InclusionRelation {
    let types = family.types();
    let mut pairs = BTreeSet::new();
    for t in &types {
        for s in &types {
            if family.containing(t).all(|ts| ts.contains(s)) {
                pairs.insert((t.clone(), s.clone()));
            }
        }
    }
    InclusionRelation { types, pairs }
}

/// A total order on types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeOrder {
    seq: Vec<TypeName>,
    pos: BTreeMap<TypeName, usize>,
}

impl TypeOrder {
    pub fn from_sequence(seq: Vec<TypeName>) -> Self {
        let pos = seq
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        TypeOrder { seq, pos }
    }

    pub fn as_slice(&self) -> &[TypeName] {
        &self.seq
    }

    pub fn position(&self, t: &TypeName) -> Option<usize> {
        self.pos.get(t).copied()
    }

    pub fn le(&self, t: &TypeName, s: &TypeName) -> bool {
        match (self.position(t), self.position(s)) {
            (Some(i), Some(j)) => i <= j,
            _ => t <= s,
        }
    }
}

/// Ranks types by a base order: listed types first in list order, the rest
/// lexicographically after them.
pub fn base_rank<'a>(base: &'a [TypeName]) -> impl Fn(&TypeName) -> (usize, TypeName) + 'a {
    move |t| match base.iter().position(|b| b == t) {
        Some(i) => (i, TypeName::new("")),
        None => (base.len(), t.clone()),
    }
}

/// Topological sort of strict inclusion, ties broken by the base order.
pub fn linearize(incl: &InclusionRelation, base: &[TypeName]) -> TypeOrder {
    let rank = base_rank(base);
    let types: Vec<&TypeName> = incl.types().iter().collect();
    let mut indegree: BTreeMap<&TypeName, usize> = types.iter().map(|t| (*t, 0)).collect();
    for &t in &types {
        for &s in &types {
            if incl.strictly_included(t, s) {
                *indegree.get_mut(s).unwrap() += 1;
            }
        }
    }
    let mut heap: BinaryHeap<Reverse<((usize, TypeName), &TypeName)>> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(t, _)| Reverse((rank(t), *t)))
        .collect();
    let mut seq = Vec::with_capacity(types.len());
    while let Some(Reverse((_, t))) = heap.pop() {
        seq.push(t.clone());
        for &s in &types {
            if incl.strictly_included(t, s) {
                let d = indegree.get_mut(s).unwrap();
                *d -= 1;
                if *d == 0 {
                    heap.push(Reverse((rank(s), s)));
                }
            }
        }
    }
    TypeOrder::from_sequence(seq)
}

/// Exact interval together with its basic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occurrence {
    pub interval: Interval,
    pub multiplicity: Multiplicity,
}

impl Occurrence {
    fn of(counts: Vec<u64>) -> Occurrence {
        let interval = Interval::fit(counts).expect("stats always have a sample");
        Occurrence {
            interval,
            multiplicity: Multiplicity::smallest_containing(interval),
        }
    }

    pub fn min(&self) -> u64 {
        self.interval.lo()
    }

    pub fn max(&self) -> Option<u64> {
        self.interval.hi()
    }
}

/// What an occurrence count is taken toward.
#[derive(Debug, Clone, Copy)]
pub enum OccurTarget<'a> {
    Typeset(&'a TypeSet),
    Family(&'a BTreeSet<TypeSet>),
    Type(&'a TypeName),
}

/// Per-node counts of `a`-edges toward each exact target typeset, over all
/// nodes carrying the context's type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextStats {
    context: Context,
    samples: Vec<BTreeMap<TypeSet, u64>>,
}

impl ContextStats {
    pub fn compute(g: &TypedGraph, ctx: &Context) -> Result<ContextStats, AnalysisError> {
        let mut samples = Vec::new();
        for n in g.graph.nodes() {
            if !g.typing.contains(n, &ctx.ty) {
                continue;
            }
            let mut counts: BTreeMap<TypeSet, u64> = BTreeMap::new();
            for (a, m) in g.graph.out_edges(n).into_iter().flatten() {
                if *a == ctx.label {
                    *counts.entry(g.typing.types_of(m).clone()).or_default() += 1;
                }
            }
            samples.push(counts);
        }
        if samples.is_empty() {
            return Err(AnalysisError::ContextUnobserved(ctx.clone()));
        }
        Ok(ContextStats {
            context: ctx.clone(),
            samples,
        })
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// Typesets reached at least once.
    pub fn observed_typesets(&self) -> BTreeSet<TypeSet> {
        self.samples
            .iter()
            .flat_map(|s| s.keys().cloned())
            .collect()
    }

    pub fn counts_where(&self, mut pred: impl FnMut(&TypeSet) -> bool) -> Vec<u64> {
        self.samples
            .iter()
            .map(|s| s.iter().filter(|(ts, _)| pred(ts)).map(|(_, c)| c).sum())
            .collect()
    }

    pub fn counts(&self, target: OccurTarget<'_>) -> Vec<u64> {
        match target {
            OccurTarget::Typeset(t) => self.counts_where(|ts| ts == t),
            OccurTarget::Family(f) => self.counts_where(|ts| f.contains(ts)),
            OccurTarget::Type(t) => self.counts_where(|ts| ts.contains(t)),
        }
    }

    pub fn occur(&self, target: OccurTarget<'_>) -> Occurrence {
        Occurrence::of(self.counts(target))
    }
}

pub fn occur(
    g: &TypedGraph,
    ctx: &Context,
    target: OccurTarget<'_>,
) -> Result<Occurrence, AnalysisError> {
    Ok(ContextStats::compute(g, ctx)?.occur(target))
}

/// The smallest `T ∈ F` with `t ∈ T` whose members all include `t`.
pub fn characterizing_typeset(
    t: &TypeName,
    family: &TypesetFamily,
    incl: &InclusionRelation,
) -> Option<TypeSet> {
    family
        .containing(t)
        .filter(|ts| ts.iter().all(|s| incl.includes(t, s)))
        .min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)))
        .cloned()
}

pub fn is_obfuscated(t: &TypeName, family: &TypesetFamily, incl: &InclusionRelation) -> bool {
    characterizing_typeset(t, family, incl).is_none()
}

/// Typesets containing `t` none of whose members has infinite maxarity, in
/// lexicographic order.
pub fn cover_sets(
    t: &TypeName,
    family: &TypesetFamily,
    infinite: &BTreeSet<TypeName>,
) -> Vec<TypeSet> {
    family
        .containing(t)
        .filter(|ts| ts.iter().all(|s| !infinite.contains(s)))
        .cloned()
        .collect()
}

/// Target typesets of one node's outgoing edges, per label, sorted.
pub type Recipe = BTreeMap<Label, Vec<TypeSet>>;

/// Typesets found by bounded search, each with a smallest recipe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    pub family: TypesetFamily,
    pub recipes: BTreeMap<TypeSet, Recipe>,
}

pub const DEFAULT_SEARCH_DEPTH: usize = 4;

fn recipe_key(r: &Recipe) -> (usize, &Recipe) {
    (r.values().map(Vec::len).sum(), r)
}

/// Typesets of fresh nodes whose `a`-targets are independent copies of
/// already realized typesets, layer by layer.
///
/// Layer 1 contains only the node without edges; each further layer may point
/// to anything found so far. At most `cap` edges per label are tried, with
/// `cap = max_t Σ_u min(t,a,u) + 2`. Typesets only realizable through cycles
/// are not found.
pub fn realizable_typesets_bounded(shape: &ShapeGraph, depth: usize) -> Realization {
    let types: Vec<TypeName> = shape.types().iter().cloned().collect();
    let labels: Vec<Label> = shape.labels().into_iter().collect();
    let mut recipes: BTreeMap<TypeSet, Recipe> = BTreeMap::new();
    for _ in 0..depth.max(1) {
        let realized: Vec<TypeSet> = recipes.keys().cloned().collect();
        // profile result -> smallest recipe producing it
        let mut partial: BTreeMap<TypeSet, Recipe> = BTreeMap::new();
        partial.insert(types.iter().cloned().collect(), Recipe::new());
        for a in &labels {
            let cap = types
                .iter()
                .map(|t| {
                    types
                        .iter()
                        .map(|u| shape.arity(t, a, u).min())
                        .sum::<u64>()
                })
                .max()
                .unwrap_or(0) as usize
                + 2;
            let options = label_options(shape, &types, a, &realized, cap);
            let mut next: BTreeMap<TypeSet, Recipe> = BTreeMap::new();
            for (sat, recipe) in &partial {
                for (opt_sat, targets) in &options {
                    let inter: TypeSet = sat.intersection(opt_sat).cloned().collect();
                    if inter.is_empty() {
                        continue;
                    }
                    let mut r = recipe.clone();
                    if !targets.is_empty() {
                        r.insert(a.clone(), targets.clone());
                    }
                    keep_smaller(&mut next, inter, r);
                }
            }
            partial = next;
        }
        let before = recipes.len();
        // first layer wins: later recipes may point at typesets built on this one
        for (ts, r) in partial {
            recipes.entry(ts).or_insert(r);
        }
        if recipes.len() == before && !realized.is_empty() {
            break;
        }
    }
    Realization {
        family: TypesetFamily {
            members: recipes.keys().cloned().collect(),
            provenance: Provenance::BoundedSearch,
        },
        recipes,
    }
}

fn keep_smaller(map: &mut BTreeMap<TypeSet, Recipe>, key: TypeSet, r: Recipe) {
    match map.get(&key) {
        Some(old) if recipe_key(old) <= recipe_key(&r) => {}
        _ => {
            map.insert(key, r);
        }
    }
}

// For one label: every multiset of realized target typesets of size <= cap,
// grouped by the set of source types whose witness for this label exists.
fn label_options(
    shape: &ShapeGraph,
    types: &[TypeName],
    a: &Label,
    realized: &[TypeSet],
    cap: usize,
) -> BTreeMap<TypeSet, Vec<TypeSet>> {
    let index: BTreeMap<&TypeName, usize> = types.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let bounds: Vec<Vec<Interval>> = types
        .iter()
        .map(|t| {
            types
                .iter()
                .map(|u| shape.arity(t, a, u).interval())
                .collect()
        })
        .collect();
    let mut out: BTreeMap<TypeSet, Vec<TypeSet>> = BTreeMap::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        start: usize,
        cap: usize,
        realized: &[TypeSet],
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        visit(chosen);
        if chosen.len() == cap {
            return;
        }
        for i in start..realized.len() {
            chosen.push(i);
            rec(i, cap, realized, chosen, visit);
            chosen.pop();
        }
    }
    let mut visit = |chosen: &[usize]| {
        let candidates: Vec<Vec<usize>> = chosen
            .iter()
            .map(|&i| {
                realized[i]
                    .iter()
                    .filter_map(|u| index.get(u).copied())
                    .collect()
            })
            .collect();
        let sat: TypeSet = types
            .iter()
            .enumerate()
            .filter(|(ti, _)| {
                WitnessProblem::new(candidates.clone(), bounds[*ti].clone()).is_feasible()
            })
            .map(|(_, t)| t.clone())
            .collect();
        if sat.is_empty() {
            return;
        }
        let targets: Vec<TypeSet> = chosen.iter().map(|&i| realized[i].clone()).collect();
        match out.get(&sat) {
            Some(old) if (old.len(), old) <= (targets.len(), &targets) => {}
            _ => {
                out.insert(sat, targets);
            }
        }
    };
    rec(0, cap, realized, &mut chosen, &mut visit);
    out
}
