//! Canonical forms of shape graphs relative to a typeset family and a base
//! order on types.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::analysis::{base_rank, TypesetFamily};
use crate::interval::Multiplicity;
use crate::shape::{Context, ShapeGraph};
use crate::symbol::TypeName;

/// `t` and `t2` have the same membership in every typeset.
pub fn type_equal(t: &TypeName, t2: &TypeName, family: &TypesetFamily) -> bool {
    family
        .members()
        .iter()
        .all(|ts| ts.contains(t) == ts.contains(t2))
}

/// Every typeset containing `t` meets `k`.
pub fn covered_by(t: &TypeName, k: &BTreeSet<TypeName>, family: &TypesetFamily) -> bool {
    family
        .containing(t)
        .all(|ts| ts.iter().any(|s| k.contains(s)))
}

/// `t` and `t2` agree on every typeset disjoint from `k`.
pub fn residual_equal(
    t: &TypeName,
    t2: &TypeName,
    k: &BTreeSet<TypeName>,
    family: &TypesetFamily,
) -> bool {
    family
        .members()
        .iter()
        .filter(|ts| ts.is_disjoint(k))
        .all(|ts| ts.contains(t) == ts.contains(t2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One rewrite: the arities of `types` in `context` went from `before` to
/// `after`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: Rule,
    pub context: Context,
    pub types: Vec<TypeName>,
    pub before: Vec<Multiplicity>,
    pub after: Vec<Multiplicity>,
}

impl fmt::Display for RuleApplication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}:", self.rule, self.context)?;
        for ((t, b), a) in self.types.iter().zip(&self.before).zip(&self.after) {
            write!(f, " {t} {b}->{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CanonizationTrace {
    pub steps: Vec<RuleApplication>,
}

impl CanonizationTrace {
    pub fn replay(&self, shape: &ShapeGraph) -> ShapeGraph {
        let mut out = shape.clone();
        for step in &self.steps {
            for (t, m) in step.types.iter().zip(&step.after) {
                out.set(&step.context.ty, &step.context.label, t, *m);
            }
        }
        out
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.steps.iter().filter(|s| s.rule == rule).count()
    }
}

struct Canonizer<'a> {
    shape: ShapeGraph,
    family: &'a TypesetFamily,
    // candidate target types, sorted by the base order
    targets: Vec<TypeName>,
    contexts: Vec<Context>,
    trace: CanonizationTrace,
}

impl Canonizer<'_> {
    fn arity(&self, ctx: &Context, t: &TypeName) -> Multiplicity {
        self.shape.arity(&ctx.ty, &ctx.label, t)
    }

    fn apply(&mut self, rule: Rule, ctx: &Context, changes: Vec<(TypeName, Multiplicity)>) {
        let before = changes.iter().map(|(t, _)| self.arity(ctx, t)).collect();
        for (t, m) in &changes {
            self.shape.set(&ctx.ty, &ctx.label, t, *m);
        }
        self.trace.steps.push(RuleApplication {
            rule,
            context: ctx.clone(),
            types: changes.iter().map(|(t, _)| t.clone()).collect(),
            before,
            after: changes.into_iter().map(|(_, m)| m).collect(),
        });
    }

    fn infinite(&self, ctx: &Context) -> BTreeSet<TypeName> {
        self.targets
            .iter()
            .filter(|t| self.arity(ctx, t).is_unbounded())
            .cloned()
            .collect()
    }

    fn r1(&mut self, ctx: &Context) -> bool {
        for (i, t) in self.targets.iter().enumerate() {
            for t2 in &self.targets[i + 1..] {
                let (m, m2) = (self.arity(ctx, t), self.arity(ctx, t2));
                if m.min() != 0 || m2.min() != 1 || !type_equal(t, t2, self.family) {
                    continue;
                }
                // [0;0] + [1;h] is moved to [1;1] + [0;h-1] to stay well formed
                let (new, new2) = match m.max() {
                    Some(0) => (
                        Multiplicity::One,
                        Multiplicity::from_bounds(0, m2.max().map(|h| h - 1)).expect("basic"),
                    ),
                    hi => (
                        Multiplicity::from_bounds(1, hi).expect("basic"),
                        Multiplicity::from_bounds(0, m2.max()).expect("basic"),
                    ),
                };
                let changes = vec![(t.clone(), new), (t2.clone(), new2)];
                self.apply(Rule::R1, ctx, changes);
                return true;
            }
        }
        false
    }

    fn r2(&mut self, ctx: &Context) -> bool {
        let present = self.family.types();
        for t in &self.targets {
            let m = self.arity(ctx, t);
            if m.is_unbounded() || !present.contains(t) {
                continue;
            }
            let mut k = self.infinite(ctx);
            k.remove(t);
            if covered_by(t, &k, self.family) {
                let new = Multiplicity::from_bounds(m.min(), None).expect("basic");
                self.apply(Rule::R2, ctx, vec![(t.clone(), new)]);
                return true;
            }
        }
        false
    }

    fn r3(&mut self, ctx: &Context) -> bool {
        let present = self.family.types();
        let k = self.infinite(ctx);
        for (i, t) in self.targets.iter().enumerate() {
            if self.arity(ctx, t) != Multiplicity::Opt {
                continue;
            }
            for t2 in &self.targets[i + 1..] {
                if self.arity(ctx, t2) != Multiplicity::Zero || !present.contains(t2) {
                    continue;
                }
                if residual_equal(t, t2, &k, self.family) {
                    let changes = vec![
                        (t.clone(), Multiplicity::Zero),
                        (t2.clone(), Multiplicity::Opt),
                    ];
                    self.apply(Rule::R3, ctx, changes);
                    return true;
                }
            }
        }
        false
    }

    fn exhaust(&mut self, rule: fn(&mut Self, &Context) -> bool) {
        for ctx in self.contexts.clone() {
            while rule(self, &ctx) {}
        }
    }
}

/// Applies R1 exhaustively in every context, then R2, then R3.
///
/// Contexts are scanned by source type under the base order, then label; type
/// pairs by the base order. Only types occurring in `family` are widened by
/// R2 or receive the optional arity by R3.
pub fn canonize(
    shape: &ShapeGraph,
    family: &TypesetFamily,
    base: &[TypeName],
) -> (ShapeGraph, CanonizationTrace) {
    let rank = base_rank(base);
    let mut targets: Vec<TypeName> = shape
        .types()
        .iter()
        .chain(&family.types())
        .cloned()
        .collect();
    targets.sort_by_key(|t| rank(t));
    targets.dedup();
    let mut sources: Vec<&TypeName> = shape.types().iter().collect();
    sources.sort_by_key(|t| rank(t));
    let labels = shape.labels();
    let contexts = sources
        .into_iter()
        .flat_map(|t| {
            labels
                .iter()
                .map(move |a| Context::new(t.clone(), a.clone()))
        })
        .collect();
    let mut c = Canonizer {
        shape: shape.clone(),
        family,
        targets,
        contexts,
        trace: CanonizationTrace::default(),
    };
    c.exhaust(Canonizer::r1);
    c.exhaust(Canonizer::r2);
    c.exhaust(Canonizer::r3);
    (c.shape, c.trace)
}

pub fn is_canonical(shape: &ShapeGraph, family: &TypesetFamily, base: &[TypeName]) -> bool {
    canonize(shape, family, base).1.steps.is_empty()
}

/// Both shape graphs have the same canonical form once their type sets are
/// aligned.
pub fn canonically_equal(
    s1: &ShapeGraph,
    s2: &ShapeGraph,
    family: &TypesetFamily,
    base: &[TypeName],
) -> bool {
    let (mut a, mut b) = (s1.clone(), s2.clone());
    for t in s1.types().iter().chain(s2.types()) {
        a.add_type(t.clone());
        b.add_type(t.clone());
    }
    canonize(&a, family, base).0 == canonize(&b, family, base).0
}
