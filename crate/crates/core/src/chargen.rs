//! Characteristic typed graphs for a shape graph.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{
    cover_sets, derive_inclusion, is_obfuscated, realizable_typesets_bounded, InclusionRelation,
    Recipe, TypesetFamily, DEFAULT_SEARCH_DEPTH,
};
use crate::graph::{Graph, TypeSet, TypedGraph};
use crate::shape::{Context, ShapeGraph};
use crate::symbol::{Label, NodeId, TypeName};
use crate::validate::{Mode, Validator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChargenError {
    #[error("typeset {0:?} has no realization within the search bound")]
    Unrealizable(Vec<TypeName>),
    #[error("node `{node}` built for {context} does not carry `{ty}`")]
    Obligation {
        node: NodeId,
        context: Context,
        ty: TypeName,
    },
    #[error("generated graph is invalid: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Variant {
    Min,
    Max,
}

/// Number of `a`-edges a node built for `context` sends to `typeset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRequirement {
    pub context: Context,
    pub typeset: TypeSet,
    pub variant: Variant,
    pub count: u64,
}

/// Member-wise sum of minima over `ts`.
pub fn typeset_minarity(shape: &ShapeGraph, ctx: &Context, ts: &TypeSet) -> u64 {
    ts.iter()
        .map(|u| shape.arity(&ctx.ty, &ctx.label, u).min())
        .sum()
}

/// Member-wise sum of maxima, or `|T|+1` when a member is unbounded.
pub fn typeset_maxarity(shape: &ShapeGraph, ctx: &Context, ts: &TypeSet) -> u64 {
    let maxima: Option<u64> = ts
        .iter()
        .map(|u| shape.arity(&ctx.ty, &ctx.label, u).max())
        .sum();
    maxima.unwrap_or(ts.len() as u64 + 1)
}

fn smallest<'a>(it: impl Iterator<Item = &'a TypeSet>) -> Option<&'a TypeSet> {
    it.min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)))
}

/// Builds nodes from realization recipes, keeping a pool of distinct copies
/// per typeset since parallel edges cannot exist.
struct Builder<'a> {
    shape: &'a ShapeGraph,
    family: &'a TypesetFamily,
    recipes: BTreeMap<TypeSet, Recipe>,
    index: BTreeMap<TypeSet, usize>,
    pool: BTreeMap<TypeSet, Vec<NodeId>>,
    graph: Graph,
    profiles: Vec<(NodeId, Context)>,
    counter: usize,
}

impl<'a> Builder<'a> {
    fn new(shape: &'a ShapeGraph, family: &'a TypesetFamily) -> Result<Self, ChargenError> {
        let realization =
            realizable_typesets_bounded(shape, DEFAULT_SEARCH_DEPTH.max(shape.types().len() + 1));
        let recipes = realization.recipes;
        for ts in family.members() {
            if !recipes.contains_key(ts) {
                return Err(ChargenError::Unrealizable(ts.iter().cloned().collect()));
            }
        }
        let index = recipes
            .keys()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Builder {
            shape,
            family,
            recipes,
            index,
            pool: BTreeMap::new(),
            graph: Graph::new(),
            profiles: Vec::new(),
            counter: 0,
        })
    }

    /// The `k`-th copy of the representative of `ts`.
    fn copy(&mut self, ts: &TypeSet, k: usize) -> NodeId {
        while self.pool.get(ts).map_or(0, Vec::len) <= k {
            let j = self.pool.get(ts).map_or(0, Vec::len);
            let id = NodeId::new(format!("rep{}_{}", self.index[ts], j));
            let recipe = self.recipes[ts].clone();
            self.graph.add_node(id.clone());
            self.wire(&id, &recipe);
            self.pool.entry(ts.clone()).or_default().push(id);
        }
        self.pool[ts][k].clone()
    }

    fn wire(&mut self, node: &NodeId, recipe: &Recipe) {
        for (a, targets) in recipe {
            let mut used: BTreeMap<&TypeSet, usize> = BTreeMap::new();
            for ts in targets {
                let k = used.entry(ts).or_default();
                let target = self.copy(ts, *k);
                *k += 1;
                self.graph
                    .add_edge(node, a.clone(), &target)
                    .expect("fresh copies");
            }
        }
    }

    fn fresh(&mut self, prefix: &str) -> NodeId {
        self.counter += 1;
        let id = NodeId::new(format!("{prefix}{}", self.counter));
        self.graph.add_node(id.clone());
        id
    }

    /// A node of the representative's shape for `ctx.ty` except for label
    /// `ctx.label`, whose edges go to the given typesets.
    fn profile(&mut self, prefix: &str, ctx: &Context, targets: Vec<TypeSet>) -> NodeId {
        let base = smallest(self.family.containing(&ctx.ty))
            .expect("context type realizable")
            .clone();
        let mut recipe = self.recipes[&base].clone();
        recipe.remove(&ctx.label);
        let mut targets = targets;
        targets.sort();
        if !targets.is_empty() {
            recipe.insert(ctx.label.clone(), targets);
        }
        let id = self.fresh(prefix);
        self.wire(&id, &recipe);
        self.profiles.push((id.clone(), ctx.clone()));
        id
    }

    fn typeset_with(&self, u: &TypeName, avoid: impl Fn(&TypeSet) -> bool) -> Option<TypeSet> {
        smallest(self.family.containing(u).filter(|ts| !avoid(ts))).cloned()
    }

    /// One target per mandatory type of the context outside `skip`.
    fn mandatory(
        &self,
        ctx: &Context,
        skip: &TypeSet,
        avoid: impl Fn(&TypeName, &TypeSet) -> bool,
    ) -> Vec<TypeSet> {
        let mut out = Vec::new();
        for (u, m) in self.shape.fragment(ctx) {
            if skip.contains(&u) {
                continue;
            }
            for _ in 0..m.min() {
                let ts = self
                    .typeset_with(&u, |ts| avoid(&u, ts))
                    .or_else(|| self.typeset_with(&u, |_| false));
                if let Some(ts) = ts {
                    out.push(ts);
                }
            }
        }
        out
    }

    fn contexts(&self) -> Vec<Context> {
        let present = self.family.types();
        self.shape
            .contexts()
            .into_iter()
            .filter(|c| present.contains(&c.ty) && !self.shape.fragment(c).is_empty())
            .collect()
    }

    fn finish(self) -> Result<TypedGraph, ChargenError> {
        let validator = Validator::new(&self.graph, self.shape, []);
        let typing = validator.maximal_typing();
        let g = TypedGraph::new(self.graph.clone(), typing).expect("same nodes");
        if let Err(e) = g.check_proper() {
            return Err(ChargenError::Invalid(e.to_string()));
        }
        for (node, ctx) in &self.profiles {
            if !g.typing.contains(node, &ctx.ty) {
                return Err(ChargenError::Obligation {
                    node: node.clone(),
                    context: ctx.clone(),
                    ty: ctx.ty.clone(),
                });
            }
        }
        let verdict = validator.check(&g.typing, Mode::Witness);
        if let Some(d) = verdict.diagnostics.first() {
            return Err(ChargenError::Invalid(d.to_string()));
        }
        Ok(g)
    }
}

/// Per-context count obligations toward every typeset of the family.
pub fn profile_requirements(shape: &ShapeGraph, family: &TypesetFamily) -> Vec<ProfileRequirement> {
    let present = family.types();
    let mut out = Vec::new();
    for ctx in shape.contexts() {
        if !present.contains(&ctx.ty) {
            continue;
        }
        for ts in family.members() {
            for (variant, count) in [
                (Variant::Min, typeset_minarity(shape, &ctx, ts)),
                (Variant::Max, typeset_maxarity(shape, &ctx, ts)),
            ] {
                out.push(ProfileRequirement {
                    context: ctx.clone(),
                    typeset: ts.clone(),
                    variant,
                    count,
                });
            }
        }
    }
    out
}

fn build_weak(b: &mut Builder<'_>, incl: &InclusionRelation) {
    let members: Vec<TypeSet> = b.family.members().iter().cloned().collect();
    for ts in &members {
        b.copy(ts, 0);
    }
    for ctx in b.contexts() {
        for ts in &members {
            // min variant: mandatory edges only, those of members of T go to T
            let mut targets: Vec<TypeSet> = Vec::new();
            for u in ts {
                for _ in 0..b.shape.arity(&ctx.ty, &ctx.label, u).min() {
                    targets.push(ts.clone());
                }
            }
            targets.extend(b.mandatory(&ctx, ts, |_, other| other == ts));
            b.profile("min", &ctx, targets);

            // max variant
            let mut targets = vec![ts.clone(); typeset_maxarity(b.shape, &ctx, ts) as usize];
            targets.extend(b.mandatory(&ctx, ts, |_, other| other == ts));
            b.profile("max", &ctx, targets);
        }
        // for each type t, mandatory edges avoiding t wherever possible
        for t in b.family.types() {
            let targets = b.mandatory(&ctx, &TypeSet::new(), |u, other| {
                !incl.includes(u, &t) && other.contains(&t)
            });
            b.profile("low", &ctx, targets);
        }
    }
}

/// Nodes realizing, per context and typeset, the minimal and maximal numbers
/// of edges, on top of one representative per typeset.
pub fn weakly_characteristic(
    shape: &ShapeGraph,
    family: &TypesetFamily,
) -> Result<TypedGraph, ChargenError> {
    let incl = derive_inclusion(family);
    let mut b = Builder::new(shape, family)?;
    build_weak(&mut b, &incl);
    b.finish()
}

/// The weakly characteristic graph plus pair nodes for obfuscated types.
pub fn characteristic(
    shape: &ShapeGraph,
    family: &TypesetFamily,
) -> Result<TypedGraph, ChargenError> {
    let incl = derive_inclusion(family);
    let mut b = Builder::new(shape, family)?;
    build_weak(&mut b, &incl);
    for ctx in b.contexts() {
        let infinite: BTreeSet<TypeName> = b
            .shape
            .fragment(&ctx)
            .into_iter()
            .filter(|(_, m)| m.is_unbounded())
            .map(|(t, _)| t)
            .collect();
        for t in family.types() {
            if !is_obfuscated(&t, family, &incl) {
                continue;
            }
            let covers = cover_sets(&t, family, &infinite);
            for (i, t1) in covers.iter().enumerate() {
                for t2 in &covers[i + 1..] {
                    let max_of = |u: &TypeName| {
                        b.shape.arity(&ctx.ty, &ctx.label, u).max().unwrap_or(0) as usize
                    };
                    let x1: usize = t1.iter().map(max_of).sum();
                    let x2: usize = t2.difference(t1).map(max_of).sum();
                    let union: TypeSet = t1.union(t2).cloned().collect();
                    let mut targets = vec![t1.clone(); x1];
                    targets.extend(std::iter::repeat_n(t2.clone(), x2));
                    targets
                        .extend(b.mandatory(&ctx, &union, |_, other| other == t1 || other == t2));
                    b.profile("pair", &ctx, targets);
                }
            }
        }
    }
    b.finish()
}

/// A random member of the language: a few nodes built like representatives
/// with resampled edge counts, typed by the maximal typing.
pub fn extend_with_random_member(
    shape: &ShapeGraph,
    family: &TypesetFamily,
    seed: u64,
) -> Result<TypedGraph, ChargenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(shape, family)?;
    let sources: Vec<TypeName> = family
        .types()
        .into_iter()
        .filter(|t| shape.types().contains(t))
        .collect();
    if sources.is_empty() {
        return b.finish();
    }
    let labels: Vec<Label> = shape.labels().into_iter().collect();
    for _ in 0..rng.gen_range(1..=4) {
        let t0 = sources.choose(&mut rng).expect("nonempty").clone();
        let base = smallest(family.containing(&t0)).expect("present").clone();
        let mut recipe = b.recipes[&base].clone();
        for a in &labels {
            let ctx = Context::new(t0.clone(), a.clone());
            let fragment = shape.fragment(&ctx);
            if fragment.is_empty() || !rng.gen_bool(0.5) {
                continue;
            }
            let mut targets = Vec::new();
            for (u, m) in fragment {
                let hi = m.max().map_or(m.min() + 2, |h| h.min(m.min() + 2));
                let count = rng.gen_range(m.min()..=hi);
                let choices: Vec<&TypeSet> = family.containing(&u).collect();
                for _ in 0..count {
                    targets.push((*choices.choose(&mut rng).expect("u realizable")).clone());
                }
            }
            targets.sort();
            recipe.insert(a.clone(), targets);
        }
        let id = b.fresh("x");
        b.wire(&id, &recipe);
        b.profiles.push((
            id,
            Context::new(
                t0,
                labels.first().cloned().unwrap_or_else(|| Label::new("_")),
            ),
        ));
    }
    b.finish()
}
