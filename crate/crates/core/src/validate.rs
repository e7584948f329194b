//! Validation of graphs against shape graphs.
//!
//! A node satisfies a type when its outbound edges admit a witness: an
//! assignment of each edge to a type of its target such that, per label and
//! target type, the number of assigned edges lies in the schema's arity.
//! Labels are independent, so the check runs one [`WitnessProblem`] per
//! label. The typing of a graph is read as the greatest fixpoint of this
//! condition.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, TypedGraph, Typing};
use crate::interval::Interval;
use crate::shape::ShapeGraph;
use crate::symbol::{Label, NodeId, TypeName};
use crate::witness::{WitnessProblem, DEFAULT_EXHAUSTIVE_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("node `{0}` is not in the graph")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every declared `(node, type)` pair has a witness drawn from the
    /// declared typing.
    #[default]
    Witness,
    /// The declared typing is exactly the maximal typing, and it is proper.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub node: NodeId,
    pub ty: Option<TypeName>,
    pub label: Option<Label>,
    pub reason: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}", self.node)?;
        if let Some(t) = &self.ty {
            write!(f, " type {t}")?;
        }
        if let Some(a) = &self.label {
            write!(f, " label {a}")?;
        }
        write!(f, ": {}", self.reason)
    }
}

/// Outcome of a membership check; valid iff there are no diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub diagnostics: Vec<Diagnostic>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Index-based view of a graph and a schema, reused across many checks.
pub struct Validator<'a> {
    graph: &'a Graph,
    types: Vec<TypeName>,
    type_index: HashMap<TypeName, usize>,
    nodes: Vec<NodeId>,
    node_index: HashMap<NodeId, usize>,
    /// Per node: outbound targets grouped by label index.
    out: Vec<Vec<(usize, Vec<usize>)>>,
    preds: Vec<Vec<usize>>,
    labels: Vec<Label>,
    /// `(type, label)` → bound per type index; absent means all `[0;0]`.
    bounds: HashMap<(usize, usize), Vec<Interval>>,
    /// Labels in which a type has a positive minimum.
    required: Vec<Vec<usize>>,
    threshold: usize,
}

impl<'a> Validator<'a> {
    /// `extra_types` widens the type universe beyond the schema's (types
    /// unknown to the schema have every arity `⟨0⟩`).
    pub fn new(
        graph: &'a Graph,
        shape: &ShapeGraph,
        extra_types: impl IntoIterator<Item = TypeName>,
    ) -> Self {
        let mut type_set: BTreeSet<TypeName> = shape.types().clone();
        type_set.extend(extra_types);
        let types: Vec<TypeName> = type_set.into_iter().collect();
        let type_index: HashMap<_, _> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();

        let mut label_set = graph.labels();
        label_set.extend(shape.labels());
        let labels: Vec<Label> = label_set.into_iter().collect();
        let label_index: HashMap<_, _> = labels
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();

        let nodes: Vec<NodeId> = graph.nodes().cloned().collect();
        let node_index: HashMap<_, _> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut out = Vec::with_capacity(nodes.len());
        let mut preds = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (a, m) in graph.out_edges(n).into_iter().flatten() {
                let j = node_index[m];
                grouped.entry(label_index[a]).or_default().push(j);
                preds[j].push(i);
            }
            out.push(grouped.into_iter().collect());
        }
        for p in &mut preds {
            p.sort_unstable();
            p.dedup();
        }

        let mut bounds: HashMap<(usize, usize), Vec<Interval>> = HashMap::new();
        let mut required = vec![Vec::new(); types.len()];
        for (t, a, s, m) in shape.triples() {
            let key = (type_index[t], label_index[a]);
            let v = bounds
                .entry(key)
                .or_insert_with(|| vec![Interval::ZERO; types.len()]);
            v[type_index[s]] = m.interval();
            if m.min() > 0 {
                required[key.0].push(key.1);
            }
        }
        for r in &mut required {
            r.sort_unstable();
            r.dedup();
        }

        Validator {
            graph,
            types,
            type_index,
            nodes,
            node_index,
            out,
            preds,
            labels,
            bounds,
            required,
            threshold: DEFAULT_EXHAUSTIVE_THRESHOLD,
        }
    }

    /// Sets the out-degree up to which exhaustive search is used.
    pub fn with_threshold(mut self, threshold: usize) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn types(&self) -> &[TypeName] {
        &self.types
    }

    /// Dense boolean matrix `[node][type]` for a typing.
    pub fn matrix_of(&self, typing: &Typing) -> Vec<Vec<bool>> {
        self.nodes
            .iter()
            .map(|n| {
                let ts = typing.types_of(n);
                self.types.iter().map(|t| ts.contains(t)).collect()
            })
            .collect()
    }

    fn typing_of(&self, matrix: &[Vec<bool>]) -> Typing {
        let mut typing = Typing::new();
        for (i, row) in matrix.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b {
                    typing.insert(self.nodes[i].clone(), self.types[j].clone());
                }
            }
        }
        typing
    }

    /// Returns the first label (by index) for which no witness exists.
    fn first_failure(&self, node: usize, ty: usize, matrix: &[Vec<bool>]) -> Option<usize> {
        let groups = &self.out[node];
        for &a in &self.required[ty] {
            if groups.binary_search_by_key(&a, |(l, _)| *l).is_err() {
                return Some(a);
            }
        }
        for (a, targets) in groups {
            let Some(bounds) = self.bounds.get(&(ty, *a)) else {
                return Some(*a);
            };
            let candidates = targets
                .iter()
                .map(|&m| {
                    matrix[m]
                        .iter()
                        .enumerate()
                        .filter(|(s, &b)| b && bounds[*s].hi() != Some(0))
                        .map(|(s, _)| s)
                        .collect()
                })
                .collect();
            let problem = WitnessProblem::new(candidates, bounds.clone());
            if !problem.is_feasible_with(self.threshold) {
                return Some(*a);
            }
        }
        None
    }

    fn feasible(&self, node: usize, ty: usize, matrix: &[Vec<bool>]) -> bool {
        self.first_failure(node, ty, matrix).is_none()
    }

    pub fn witness_feasible(
        &self,
        node: &NodeId,
        ty: &TypeName,
        typing: &Typing,
    ) -> Result<bool, ValidateError> {
        let &n = self
            .node_index
            .get(node)
            .ok_or_else(|| ValidateError::UnknownNode(node.clone()))?;
        let matrix = self.matrix_of(typing);
        Ok(match self.type_index.get(ty) {
            Some(&t) => self.feasible(n, t, &matrix),
            None => unreachable!("validator universe covers the typing"),
        })
    }

    /// Greatest fixpoint by worklist refinement from the full relation.
    pub fn maximal_typing(&self) -> Typing {
        let (n, k) = (self.nodes.len(), self.types.len());
        let mut matrix = vec![vec![true; k]; n];
        let mut queued = vec![vec![true; k]; n];
        let mut work: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
        work.reverse();
        while let Some((i, j)) = work.pop() {
            queued[i][j] = false;
            if !matrix[i][j] || self.feasible(i, j, &matrix) {
                continue;
            }
            matrix[i][j] = false;
            for &p in &self.preds[i] {
                for s in 0..k {
                    if matrix[p][s] && !queued[p][s] {
                        queued[p][s] = true;
                        work.push((p, s));
                    }
                }
            }
        }
        self.typing_of(&matrix)
    }

    pub fn check(&self, typing: &Typing, mode: Mode) -> Verdict {
        let mut diagnostics = Vec::new();
        for n in self.graph.nodes() {
            if typing.types_of(n).is_empty() {
                diagnostics.push(Diagnostic {
                    node: n.clone(),
                    ty: None,
                    label: None,
                    reason: "properness violated: node has no type".into(),
                });
            }
        }
        let matrix = self.matrix_of(typing);
        let witness_failures: Vec<(usize, usize, usize)> = (0..self.nodes.len())
            .flat_map(|i| (0..self.types.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| matrix[i][j])
            .filter_map(|(i, j)| self.first_failure(i, j, &matrix).map(|a| (i, j, a)))
            .collect();
        match mode {
            Mode::Witness => {
                for (i, j, a) in witness_failures {
                    diagnostics.push(Diagnostic {
                        node: self.nodes[i].clone(),
                        ty: Some(self.types[j].clone()),
                        label: Some(self.labels[a].clone()),
                        reason: "no witness for this label".into(),
                    });
                }
            }
            Mode::Strict => {
                let maximal = self.matrix_of(&self.maximal_typing());
                for i in 0..self.nodes.len() {
                    for j in 0..self.types.len() {
                        if matrix[i][j] == maximal[i][j] {
                            continue;
                        }
                        let (label, reason) = if matrix[i][j] {
                            let a = witness_failures
                                .iter()
                                .find(|(x, y, _)| (*x, *y) == (i, j))
                                .map(|(_, _, a)| self.labels[*a].clone());
                            (a, "declared type is not in the maximal typing")
                        } else {
                            (
                                None,
                                "maximal typing assigns this type but it is not declared",
                            )
                        };
                        diagnostics.push(Diagnostic {
                            node: self.nodes[i].clone(),
                            ty: Some(self.types[j].clone()),
                            label,
                            reason: reason.into(),
                        });
                    }
                }
            }
        }
        Verdict { diagnostics }
    }
}

/// Whether `node` satisfies `ty` with a witness drawn from `typing`.
pub fn witness_feasible(
    graph: &Graph,
    shape: &ShapeGraph,
    typing: &Typing,
    node: &NodeId,
    ty: &TypeName,
) -> Result<bool, ValidateError> {
    let mut extra = typing.types();
    extra.insert(ty.clone());
    Validator::new(graph, shape, extra).witness_feasible(node, ty, typing)
}

/// The largest typing in which every pair has a witness within the typing.
pub fn maximal_typing(graph: &Graph, shape: &ShapeGraph) -> Typing {
    Validator::new(graph, shape, []).maximal_typing()
}

pub fn check_membership(graph: &TypedGraph, shape: &ShapeGraph, mode: Mode) -> Verdict {
    Validator::new(&graph.graph, shape, graph.typing.types()).check(&graph.typing, mode)
}
