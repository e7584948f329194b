//! Edge-labelled graphs, typings and typed graphs.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::symbol::{Label, NodeId, TypeName};

/// The exact set of types carried by a node.
pub type TypeSet = BTreeSet<TypeName>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("duplicate edge `{0} {1} {2}`")]
    DuplicateEdge(NodeId, Label, NodeId),
    #[error("node `{0}` has an empty typing")]
    Improper(NodeId),
    #[error("typing mentions node `{0}` which is not in the graph")]
    TypingOutsideGraph(NodeId),
}

/// A finite graph whose edges form a set of `(source, label, target)` triples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    out: BTreeMap<NodeId, BTreeSet<(Label, NodeId)>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` when the node was already present.
    pub fn add_node(&mut self, node: NodeId) -> bool {
        if self.out.contains_key(&node) {
            return false;
        }
        self.out.insert(node, BTreeSet::new());
        true
    }

    pub fn add_edge(
        &mut self,
        source: &NodeId,
        label: Label,
        target: &NodeId,
    ) -> Result<(), GraphError> {
        if !self.out.contains_key(target) {
            return Err(GraphError::UnknownNode(target.clone()));
        }
        let edges = self
            .out
            .get_mut(source)
            .ok_or_else(|| GraphError::UnknownNode(source.clone()))?;
        if !edges.insert((label.clone(), target.clone())) {
            return Err(GraphError::DuplicateEdge(
                source.clone(),
                label,
                target.clone(),
            ));
        }
        Ok(())
    }

    pub fn contains_node(&self, node: &NodeId) -> bool {
        self.out.contains_key(node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.out.keys()
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(BTreeSet::len).sum()
    }

    /// Outbound edges of `node` as `(label, target)` pairs, sorted.
    pub fn out_edges(&self, node: &NodeId) -> Option<&BTreeSet<(Label, NodeId)>> {
        self.out.get(node)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &Label, &NodeId)> + '_ {
        self.out
            .iter()
            .flat_map(|(s, es)| es.iter().map(move |(a, t)| (s, a, t)))
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.edges().map(|(_, a, _)| a.clone()).collect()
    }
}

/// A relation between nodes and types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Typing {
    map: BTreeMap<NodeId, TypeSet>,
}

static EMPTY: TypeSet = BTreeSet::new();

impl Typing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, node: NodeId, ty: TypeName) {
        self.map.entry(node).or_default().insert(ty);
    }

    pub fn set(&mut self, node: NodeId, types: TypeSet) {
        self.map.insert(node, types);
    }

    pub fn remove(&mut self, node: &NodeId, ty: &TypeName) -> bool {
        self.map.get_mut(node).is_some_and(|ts| ts.remove(ty))
    }

    pub fn types_of(&self, node: &NodeId) -> &TypeSet {
        self.map.get(node).unwrap_or(&EMPTY)
    }

    pub fn contains(&self, node: &NodeId, ty: &TypeName) -> bool {
        self.types_of(node).contains(ty)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, &TypeSet)> + '_ {
        self.map.iter()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&NodeId, &TypeName)> + '_ {
        self.map
            .iter()
            .flat_map(|(n, ts)| ts.iter().map(move |t| (n, t)))
    }

    pub fn len(&self) -> usize {
        self.map.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn types(&self) -> BTreeSet<TypeName> {
        self.map.values().flatten().cloned().collect()
    }

    /// Drops nodes mapped to the empty set so that equality is structural.
    pub fn normalized(mut self) -> Self {
        self.map.retain(|_, ts| !ts.is_empty());
        self
    }
}

impl FromIterator<(NodeId, TypeName)> for Typing {
    fn from_iter<I: IntoIterator<Item = (NodeId, TypeName)>>(iter: I) -> Self {
        let mut t = Typing::new();
        for (n, ty) in iter {
            t.insert(n, ty);
        }
        t
    }
}

/// A graph together with a typing of its nodes.
///
/// Construction does not enforce properness so that improper inputs can be
/// reported by validation; [`TypedGraph::check_proper`] does.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypedGraph {
    pub graph: Graph,
    pub typing: Typing,
}

impl TypedGraph {
    pub fn new(graph: Graph, typing: Typing) -> Result<Self, GraphError> {
        if let Some((n, _)) = typing.iter().find(|(n, _)| !graph.contains_node(n)) {
            return Err(GraphError::TypingOutsideGraph(n.clone()));
        }
        Ok(TypedGraph { graph, typing })
    }

    pub fn is_proper(&self) -> bool {
        self.check_proper().is_ok()
    }

    pub fn check_proper(&self) -> Result<(), GraphError> {
        match self
            .graph
            .nodes()
            .find(|n| self.typing.types_of(n).is_empty())
        {
            Some(n) => Err(GraphError::Improper(n.clone())),
            None => Ok(()),
        }
    }

    pub fn types(&self) -> BTreeSet<TypeName> {
        self.typing.types()
    }

    /// Disjoint union. Nodes of `self` keep their identifiers; a node of
    /// `other` whose identifier is taken gets the first free `~k` suffix.
    pub fn disjoint_union(&self, other: &TypedGraph) -> TypedGraph {
        let mut out = self.clone();
        let mut rename: BTreeMap<&NodeId, NodeId> = BTreeMap::new();
        for n in other.graph.nodes() {
            let mut fresh = n.clone();
            let mut k = 1usize;
            while out.graph.contains_node(&fresh) {
                k += 1;
                fresh = NodeId::new(format!("{n}~{k}"));
            }
            out.graph.add_node(fresh.clone());
            rename.insert(n, fresh);
        }
        for (s, a, t) in other.graph.edges() {
            out.graph
                .add_edge(&rename[s], a.clone(), &rename[t])
                .expect("renamed nodes are fresh");
        }
        for (n, ts) in other.typing.iter() {
            if let Some(fresh) = rename.get(n) {
                out.typing.set(fresh.clone(), ts.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(prefix: &str) -> TypedGraph {
        let mut g = Graph::new();
        let a = NodeId::new(format!("{prefix}a"));
        let b = NodeId::new("b");
        g.add_node(a.clone());
        g.add_node(b.clone());
        g.add_edge(&a, Label::new("r"), &b).unwrap();
        let typing = [(a, TypeName::new("A")), (b, TypeName::new("B"))]
            .into_iter()
            .collect();
        TypedGraph::new(g, typing).unwrap()
    }

    #[test]
    fn duplicate_edges_are_rejected() {
        let mut g = Graph::new();
        let a = NodeId::new("a");
        g.add_node(a.clone());
        g.add_edge(&a, Label::new("r"), &a).unwrap();
        assert!(matches!(
            g.add_edge(&a, Label::new("r"), &a),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            g.add_edge(&a, Label::new("r"), &NodeId::new("zz")),
            Err(GraphError::UnknownNode(_))
        ));
    }

    #[test]
    fn union_with_empty_is_identity() {
        let g = tiny("x");
        assert_eq!(g.disjoint_union(&TypedGraph::default()), g);
    }

    #[test]
    fn union_renames_apart() {
        let g = tiny("x");
        let h = tiny("y");
        let u = g.disjoint_union(&h);
        assert_eq!(u.graph.node_count(), 4);
        assert_eq!(u.graph.edge_count(), 2);
        assert!(u.graph.contains_node(&NodeId::new("b~2")));
        assert!(u.is_proper());
        // self-union also stays disjoint
        let s = g.disjoint_union(&g).disjoint_union(&g);
        assert_eq!(s.graph.node_count(), 6);
        assert!(s.graph.contains_node(&NodeId::new("b~3")));
    }

    #[test]
    fn properness() {
        let mut g = tiny("x");
        assert!(g.is_proper());
        g.typing.set(NodeId::new("b"), TypeSet::new());
        assert!(matches!(g.check_proper(), Err(GraphError::Improper(_))));
    }
}
