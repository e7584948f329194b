//! Inference of a shape graph from a typed graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    characterizing_typeset, cover_sets, derive_inclusion, linearize, typesets_of_graph,
    AnalysisError, ContextStats, InclusionRelation, OccurTarget, TypeOrder, TypesetFamily,
};
use crate::graph::{TypeSet, TypedGraph};
use crate::interval::{Interval, Multiplicity};
use crate::shape::{Context, ShapeGraph};
use crate::symbol::{Label, TypeName};
use crate::validate::{Mode, Validator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnerError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// One line of the derivation or relaxation log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub phase: &'static str,
    #[serde(serialize_with = "display")]
    pub context: Context,
    #[serde(rename = "type")]
    pub ty: TypeName,
    pub case: &'static str,
    pub value: String,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    ClampedMinarity,
    ClampedMaxarity,
    Obfuscated,
    EmptyCover,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub kind: FlagKind,
    #[serde(serialize_with = "display")]
    pub context: Context,
    #[serde(rename = "type")]
    pub ty: TypeName,
    /// Unclamped value, when there is one.
    pub raw: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerReport {
    pub schema: ShapeGraph,
    pub family: TypesetFamily,
    pub inclusion: InclusionRelation,
    pub order: TypeOrder,
    pub derivations: Vec<LogEntry>,
    pub relaxations: Vec<LogEntry>,
    pub flags: Vec<Flag>,
}

impl LearnerReport {
    /// Derivation entries, relaxation entries and flags as JSON lines.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in self.derivations.iter().chain(&self.relaxations) {
            out.push_str(&serde_json::to_string(e).expect("plain data"));
            out.push('\n');
        }
        for f in &self.flags {
            let v = serde_json::json!({
                "phase": "flag",
                "context": f.context.to_string(),
                "type": f.ty,
                "case": f.kind,
                "value": f.raw,
            });
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Default)]
struct Journal {
    log: Vec<LogEntry>,
    flags: Vec<Flag>,
}

impl Journal {
    fn entry(
        &mut self,
        phase: &'static str,
        ctx: &Context,
        ty: &TypeName,
        case: &'static str,
        value: String,
    ) {
        self.log.push(LogEntry {
            phase,
            context: ctx.clone(),
            ty: ty.clone(),
            case,
            value,
        });
    }

    fn flag(&mut self, kind: FlagKind, ctx: &Context, ty: &TypeName, raw: Option<i64>) {
        self.flags.push(Flag {
            kind,
            context: ctx.clone(),
            ty: ty.clone(),
            raw,
        });
    }

    fn clamp(&mut self, kind: FlagKind, ctx: &Context, ty: &TypeName, raw: i64) -> u64 {
        if !(0..=1).contains(&raw) {
            self.flag(kind, ctx, ty, Some(raw));
        }
        raw.clamp(0, 1) as u64
    }
}

/// Minimal arities of a context, by ascending order.
pub fn infer_minarity(
    stats: &ContextStats,
    incl: &InclusionRelation,
    order: &TypeOrder,
) -> (BTreeMap<TypeName, u64>, Vec<LogEntry>, Vec<Flag>) {
    let mut j = Journal::default();
    let mins = minarity_pass(stats, incl, order, &mut j);
    (mins, j.log, j.flags)
}

fn minarity_pass(
    stats: &ContextStats,
    incl: &InclusionRelation,
    order: &TypeOrder,
    j: &mut Journal,
) -> BTreeMap<TypeName, u64> {
    let ctx = stats.context();
    let mut mins: BTreeMap<TypeName, u64> = BTreeMap::new();
    for t in order.as_slice() {
        let minoccur = stats.occur(OccurTarget::Type(t)).min() as i64;
        let below: i64 = mins
            .iter()
            .filter(|(s, _)| incl.includes(s, t))
            .map(|(_, m)| *m as i64)
            .sum();
        let m = j.clamp(FlagKind::ClampedMinarity, ctx, t, minoccur - below);
        j.entry("minarity", ctx, t, "subtract", m.to_string());
        mins.insert(t.clone(), m);
    }
    mins
}

/// Maximal arities of a context, by descending order; `None` is unbounded.
pub fn infer_maxarity(
    stats: &ContextStats,
    family: &TypesetFamily,
    incl: &InclusionRelation,
    order: &TypeOrder,
    mins: &BTreeMap<TypeName, u64>,
) -> (BTreeMap<TypeName, Option<u64>>, Vec<LogEntry>, Vec<Flag>) {
    let mut j = Journal::default();
    let maxs = maxarity_pass(stats, family, incl, order, mins, &mut j);
    (maxs, j.log, j.flags)
}

fn maxarity_pass(
    stats: &ContextStats,
    family: &TypesetFamily,
    incl: &InclusionRelation,
    order: &TypeOrder,
    mins: &BTreeMap<TypeName, u64>,
    j: &mut Journal,
) -> BTreeMap<TypeName, Option<u64>> {
    let ctx = stats.context();
    let maxoccur = |ts: &TypeSet| stats.occur(OccurTarget::Typeset(ts)).max().unwrap_or(0) as i64;
    let min_of = |t: &TypeName| mins.get(t).copied().unwrap_or(0) as i64;

    // case (a) is decided up front for every type so covers are well defined
    let infinite: BTreeSet<TypeName> = order
        .as_slice()
        .iter()
        .filter(|t| {
            family
                .containing(t)
                .all(|ts| maxoccur(ts) > ts.len() as i64)
        })
        .cloned()
        .collect();

    let mut maxs: BTreeMap<TypeName, Option<u64>> = BTreeMap::new();
    for t in order.as_slice().iter().rev() {
        if infinite.contains(t) {
            j.entry("maxarity", ctx, t, "a", "inf".into());
            maxs.insert(t.clone(), None);
            continue;
        }
        if min_of(t) == 1 {
            j.entry("maxarity", ctx, t, "b", "1".into());
            maxs.insert(t.clone(), Some(1));
            continue;
        }
        // processed members contribute their maxarity, pending ones their minarity
        let known = |s: &TypeName| -> Option<i64> {
            match maxs.get(s) {
                Some(Some(m)) => Some(*m as i64),
                Some(None) => None,
                None => Some(min_of(s)),
            }
        };
        let value = if let Some(ts) = characterizing_typeset(t, family, incl) {
            let others: Option<i64> = ts.iter().filter(|s| *s != t).map(known).sum();
            let raw = others.map_or(-1, |o| maxoccur(&ts) - o);
            let m = j.clamp(FlagKind::ClampedMaxarity, ctx, t, raw);
            j.entry("maxarity", ctx, t, "c", m.to_string());
            m
        } else {
            j.flag(FlagKind::Obfuscated, ctx, t, None);
            let covers = cover_sets(t, family, &infinite);
            let computed = |s: &TypeName| maxs.get(s).copied().flatten().unwrap_or(0) as i64;
            let m = match covers.as_slice() {
                [] => {
                    j.flag(FlagKind::EmptyCover, ctx, t, None);
                    0
                }
                [ts] => {
                    let later: i64 = ts
                        .iter()
                        .filter(|s| *s != t && maxs.contains_key(*s))
                        .map(computed)
                        .sum();
                    let earlier: i64 = ts
                        .iter()
                        .filter(|s| *s != t && !maxs.contains_key(*s))
                        .map(min_of)
                        .sum();
                    u64::from(maxoccur(ts) - later - earlier >= 1)
                }
                [t1, t2, ..] => {
                    let n: i64 = t1.intersection(t2).filter(|s| *s != t).map(computed).sum();
                    let pair: BTreeSet<TypeSet> = [t1.clone(), t2.clone()].into();
                    let joint = stats.occur(OccurTarget::Family(&pair)).max().unwrap_or(0) as i64;
                    u64::from(joint - n != (maxoccur(t1) - n) + (maxoccur(t2) - n))
                }
            };
            j.entry("maxarity", ctx, t, "d", m.to_string());
            m
        };
        maxs.insert(t.clone(), Some(value));
    }
    maxs
}

/// Widens arities until every typed node has a witness.
///
/// For a failing context `(t, a)`, each `a`-edge is attributed to the least
/// type (in `order`) of its target, the counts are recounted over all nodes
/// carrying `t`, and every arity of the context is widened to contain them.
pub fn relax(shape: &ShapeGraph, g: &TypedGraph, order: &TypeOrder) -> (ShapeGraph, Vec<LogEntry>) {
    let mut j = Journal::default();
    let out = relax_into(shape.clone(), g, order, &mut j);
    (out, j.log)
}

fn relax_into(
    mut shape: ShapeGraph,
    g: &TypedGraph,
    order: &TypeOrder,
    j: &mut Journal,
) -> ShapeGraph {
    loop {
        let validator = Validator::new(&g.graph, &shape, g.typing.types());
        let verdict = validator.check(&g.typing, Mode::Witness);
        let failing: BTreeSet<Context> = verdict
            .diagnostics
            .iter()
            .filter_map(|d| Some(Context::new(d.ty.clone()?, d.label.clone()?)))
            .collect();
        if failing.is_empty() {
            return shape;
        }
        for ctx in failing {
            widen(&mut shape, g, order, &ctx, j);
        }
    }
}

fn least_type<'a>(ts: &'a TypeSet, order: &TypeOrder) -> Option<&'a TypeName> {
    ts.iter()
        .min_by_key(|t| (order.position(t).unwrap_or(usize::MAX), (*t).clone()))
}

fn widen(
    shape: &mut ShapeGraph,
    g: &TypedGraph,
    order: &TypeOrder,
    ctx: &Context,
    j: &mut Journal,
) {
    let mut samples: Vec<BTreeMap<TypeName, u64>> = Vec::new();
    for n in g.graph.nodes() {
        if !g.typing.contains(n, &ctx.ty) {
            continue;
        }
        let mut counts = BTreeMap::new();
        for (a, m) in g.graph.out_edges(n).into_iter().flatten() {
            if *a == ctx.label {
                if let Some(s) = least_type(g.typing.types_of(m), order) {
                    *counts.entry(s.clone()).or_default() += 1;
                }
            }
        }
        samples.push(counts);
    }
    // every type the context mentions, so the least-type assignment becomes a witness
    let mut targets: BTreeSet<TypeName> = samples.iter().flat_map(|s| s.keys().cloned()).collect();
    targets.extend(shape.fragment(ctx).into_keys());
    for s in targets {
        let observed = Interval::fit(samples.iter().map(|c| c.get(&s).copied().unwrap_or(0)))
            .expect("nonempty");
        let current = shape.arity(&ctx.ty, &ctx.label, &s);
        let widened = Multiplicity::smallest_containing(current.interval().hull(&observed));
        if widened != current {
            shape.set(&ctx.ty, &ctx.label, &s, widened);
            j.entry("relax", ctx, &s, "widen", widened.to_string());
        }
    }
}

/// Runs the whole inference on a proper typed graph.
///
/// `base` is the tie-breaking order on types; types it does not list come
/// after it in lexicographic order.
pub fn typed_learner(g: &TypedGraph, base: &[TypeName]) -> Result<LearnerReport, LearnerError> {
    let family = typesets_of_graph(g)?;
    let inclusion = derive_inclusion(&family);
    let order = linearize(&inclusion, base);
    let labels: BTreeSet<Label> = g.graph.labels();

    let mut schema = ShapeGraph::new();
    for t in order.as_slice() {
        schema.add_type(t.clone());
    }
    let mut j = Journal::default();
    for t0 in order.as_slice() {
        for a in &labels {
            let ctx = Context::new(t0.clone(), a.clone());
            let stats = ContextStats::compute(g, &ctx)?;
            let mins = minarity_pass(&stats, &inclusion, &order, &mut j);
            let maxs = maxarity_pass(&stats, &family, &inclusion, &order, &mins, &mut j);
            for t in order.as_slice() {
                let m = Multiplicity::from_bounds(mins[t], maxs[t]).unwrap_or_else(|| {
                    // only reachable on flagged inputs; relaxation repairs it
                    Multiplicity::smallest_containing(Interval::at_least(mins[t]))
                });
                schema.set(t0, a, t, m);
            }
        }
    }
    let mut r = Journal::default();
    let schema = relax_into(schema, g, &order, &mut r);
    Ok(LearnerReport {
        schema,
        family,
        inclusion,
        order,
        derivations: j.log,
        relaxations: r.log,
        flags: j.flags,
    })
}
