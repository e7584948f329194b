//! Shape graphs: a total arity function over `Γ × Σ × Γ`, stored sparsely.

use std::collections::{BTreeMap, BTreeSet};

use crate::interval::Multiplicity;
use crate::symbol::{Label, TypeName};

/// A `(type, label)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    pub ty: TypeName,
    pub label: Label,
}

impl Context {
    pub fn new(ty: impl Into<TypeName>, label: impl Into<Label>) -> Self {
        Context {
            ty: ty.into(),
            label: label.into(),
        }
    }
}

impl std::fmt::Display for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.ty, self.label)
    }
}

/// Absent triples have arity `⟨0⟩`; stored values are never `⟨0⟩`, so two
/// shape graphs are equal iff they have the same types and arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShapeGraph {
    types: BTreeSet<TypeName>,
    arity: BTreeMap<(TypeName, Label, TypeName), Multiplicity>,
}

impl ShapeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_type(&mut self, ty: TypeName) {
        self.types.insert(ty);
    }

    /// Sets an arity, registering both endpoint types.
    pub fn set(&mut self, source: &TypeName, label: &Label, target: &TypeName, m: Multiplicity) {
        self.types.insert(source.clone());
        self.types.insert(target.clone());
        let key = (source.clone(), label.clone(), target.clone());
        if m == Multiplicity::Zero {
            self.arity.remove(&key);
        } else {
            self.arity.insert(key, m);
        }
    }

    pub fn arity(&self, source: &TypeName, label: &Label, target: &TypeName) -> Multiplicity {
        // BTreeMap needs an owned key for lookup of a tuple.
        self.arity
            .get(&(source.clone(), label.clone(), target.clone()))
            .copied()
            .unwrap_or(Multiplicity::Zero)
    }

    pub fn types(&self) -> &BTreeSet<TypeName> {
        &self.types
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.arity.keys().map(|(_, a, _)| a.clone()).collect()
    }

    /// Every non-`⟨0⟩` triple, sorted.
    pub fn triples(
        &self,
    ) -> impl Iterator<Item = (&TypeName, &Label, &TypeName, Multiplicity)> + '_ {
        self.arity.iter().map(|((t, a, s), m)| (t, a, s, *m))
    }

    pub fn triple_count(&self) -> usize {
        self.arity.len()
    }

    /// Non-`⟨0⟩` arities of one type, grouped by label.
    pub fn definition(&self, ty: &TypeName) -> BTreeMap<&Label, BTreeMap<&TypeName, Multiplicity>> {
        let mut out: BTreeMap<&Label, BTreeMap<&TypeName, Multiplicity>> = BTreeMap::new();
        for ((t, a, s), m) in &self.arity {
            if t == ty {
                out.entry(a).or_default().insert(s, *m);
            }
        }
        out
    }

    /// Non-`⟨0⟩` arities of a context.
    pub fn fragment(&self, ctx: &Context) -> BTreeMap<TypeName, Multiplicity> {
        self.arity
            .iter()
            .filter(|((t, a, _), _)| *t == ctx.ty && *a == ctx.label)
            .map(|((_, _, s), m)| (s.clone(), *m))
            .collect()
    }

    /// Every context `(t, a)` with `t ∈ Γ` and `a` a label of the schema.
    pub fn contexts(&self) -> Vec<Context> {
        let labels = self.labels();
        self.types
            .iter()
            .flat_map(|t| {
                labels
                    .iter()
                    .map(move |a| Context::new(t.clone(), a.clone()))
            })
            .collect()
    }
}
