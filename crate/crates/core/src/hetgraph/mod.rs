//! Node- and edge-labelled undirected multigraphs with optional node
//! attributes and edge weights.
//!
//! Graphs are assembled with a [`GraphBuilder`] and frozen into an immutable
//! [`HeteroGraph`]. Label alphabets are interned; adjacency lists are sorted by
//! neighbour id, then edge index, so traversal order never depends on
//! insertion order.

mod tsv;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

pub use tsv::{read_graph, read_graph_dir, write_graph, write_graph_dir};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into a graph's node or edge label alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelId(pub u32);

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub label: LabelId,
    pub attrs: Option<Vec<f64>>,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub label: LabelId,
    pub weight: Option<f64>,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite `x`.
    pub fn other(&self, x: NodeId) -> NodeId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, LabelId>,
}

impl Alphabet {
    fn intern(&mut self, s: &str) -> LabelId {
        if let Some(&id) = self.index.get(s) {
            return id;
        }
        let id = LabelId(self.symbols.len() as u32);
        self.symbols.push(s.to_string());
        self.index.insert(s.to_string(), id);
        id
    }

    fn get(&self, s: &str) -> Option<LabelId> {
        self.index.get(s).copied()
    }

    fn name(&self, id: LabelId) -> &str {
        &self.symbols[id.0 as usize]
    }
}

#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    node_labels: Alphabet,
    edge_labels: Alphabet,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    attr_dims: HashMap<LabelId, usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn add_node(
        &mut self,
        label: &str,
        attrs: Option<Vec<f64>>,
        name: impl Into<String>,
    ) -> Result<NodeId> {
        let existing = self.node_labels.get(label);
        if let Some(a) = &attrs {
            if a.is_empty() {
                return Err(Error::data(format!(
                    "empty attribute vector for label `{label}`"
                )));
            }
            if let Some(&expected) = existing.and_then(|l| self.attr_dims.get(&l)) {
                if expected != a.len() {
                    return Err(Error::DimensionMismatch {
                        label: label.to_string(),
                        expected,
                        got: a.len(),
                    });
                }
            }
        }
        let label_id = self.node_labels.intern(label);
        if let Some(a) = &attrs {
            self.attr_dims.entry(label_id).or_insert(a.len());
        }
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            label: label_id,
            attrs,
            name: name.into(),
        });
        Ok(id)
    }

    /// Adds an undirected edge and returns its index. Parallel edges and
    /// self-loops are stored as given.
    pub fn add_edge(
        &mut self,
        u: NodeId,
        v: NodeId,
        label: &str,
        weight: Option<f64>,
    ) -> Result<usize> {
        for x in [u, v] {
            if x.0 >= self.nodes.len() {
                return Err(Error::NodeOutOfRange {
                    id: x.0,
                    len: self.nodes.len(),
                });
            }
        }
        let label = self.edge_labels.intern(label);
        self.edges.push(Edge {
            u,
            v,
            label,
            weight,
        });
        Ok(self.edges.len() - 1)
    }

    pub fn freeze(self) -> HeteroGraph {
        let mut adjacency = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adjacency[e.u.0].push((e.v, i));
            adjacency[e.v.0].push((e.u, i));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut by_name = HashMap::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            by_name
                .entry((n.label, n.name.clone()))
                .or_insert(NodeId(i));
        }
        HeteroGraph {
            node_labels: self.node_labels,
            edge_labels: self.edge_labels,
            nodes: self.nodes,
            edges: self.edges,
            adjacency,
            by_name,
        }
    }
}

/// A frozen graph. Cheap to share across threads.
#[derive(Clone, Debug)]
pub struct HeteroGraph {
    node_labels: Alphabet,
    edge_labels: Alphabet,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(NodeId, usize)>>,
    by_name: HashMap<(LabelId, String), NodeId>,
}

impl Default for HeteroGraph {
    fn default() -> Self {
        GraphBuilder::new().freeze()
    }
}

impl HeteroGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v.0]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn check(&self, v: NodeId) -> Result<()> {
        if v.0 < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                id: v.0,
                len: self.nodes.len(),
            })
        }
    }

    pub fn node_alphabet(&self) -> &[String] {
        &self.node_labels.symbols
    }

    pub fn edge_alphabet(&self) -> &[String] {
        &self.edge_labels.symbols
    }

    pub fn node_label_id(&self, label: &str) -> Option<LabelId> {
        self.node_labels.get(label)
    }

    pub fn edge_label_id(&self, label: &str) -> Option<LabelId> {
        self.edge_labels.get(label)
    }

    pub fn node_label_name(&self, id: LabelId) -> &str {
        self.node_labels.name(id)
    }

    pub fn edge_label_name(&self, id: LabelId) -> &str {
        self.edge_labels.name(id)
    }

    pub fn label_of(&self, v: NodeId) -> &str {
        self.node_labels.name(self.nodes[v.0].label)
    }

    pub fn label_id_of(&self, v: NodeId) -> LabelId {
        self.nodes[v.0].label
    }

    pub fn name_of(&self, v: NodeId) -> &str {
        &self.nodes[v.0].name
    }

    pub fn attrs(&self, v: NodeId) -> Option<&[f64]> {
        self.nodes[v.0].attrs.as_deref()
    }

    /// Attribute dimension shared by nodes of `label`, if any carry attributes.
    pub fn attr_dim(&self, label: LabelId) -> Option<usize> {
        self.nodes
            .iter()
            .find(|n| n.label == label && n.attrs.is_some())
            .and_then(|n| n.attrs.as_ref().map(Vec::len))
    }

    pub fn find_node(&self, label: &str, name: &str) -> Option<NodeId> {
        let l = self.node_labels.get(label)?;
        self.by_name.get(&(l, name.to_string())).copied()
    }

    pub fn nodes_with_label(&self, label: LabelId) -> Vec<NodeId> {
        self.node_ids()
            .filter(|&v| self.nodes[v.0].label == label)
            .collect()
    }

    /// Raw adjacency: `(neighbour, edge index)` sorted ascending.
    pub fn adjacency(&self, v: NodeId) -> &[(NodeId, usize)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.0].len()
    }

    /// Neighbours of `v`, optionally filtered by edge label and neighbour
    /// label. Unknown labels match nothing.
    pub fn neighbors(
        &self,
        v: NodeId,
        edge_label: Option<&str>,
        node_label: Option<&str>,
    ) -> Result<Vec<NodeId>> {
        self.check(v)?;
        let edge_filter = match edge_label {
            Some(l) => match self.edge_labels.get(l) {
                Some(id) => Some(id),
                None => return Ok(Vec::new()),
            },
            None => None,
        };
        let node_filter = match node_label {
            Some(l) => match self.node_labels.get(l) {
                Some(id) => Some(id),
                None => return Ok(Vec::new()),
            },
            None => None,
        };
        Ok(self.adjacency[v.0]
            .iter()
            .filter(|(n, e)| {
                edge_filter.is_none_or(|l| self.edges[*e].label == l)
                    && node_filter.is_none_or(|l| self.nodes[n.0].label == l)
            })
            .map(|(n, _)| *n)
            .collect())
    }

    /// Distinct neighbours of `v` carrying node label `label`, ascending.
    pub fn distinct_neighbors_with_label(&self, v: NodeId, label: LabelId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = Vec::new();
        for &(n, _) in &self.adjacency[v.0] {
            if self.nodes[n.0].label == label && out.last() != Some(&n) {
                out.push(n);
            }
        }
        out
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        let list = &self.adjacency[a.0];
        let i = list.partition_point(|(n, _)| *n < b);
        i < list.len() && list[i].0 == b
    }

    /// Edge index of some `a`–`b` edge with the given label.
    pub fn find_edge(&self, a: NodeId, b: NodeId, label: LabelId) -> Option<usize> {
        let list = &self.adjacency[a.0];
        let start = list.partition_point(|(n, _)| *n < b);
        list[start..]
            .iter()
            .take_while(|(n, _)| *n == b)
            .map(|&(_, e)| e)
            .find(|&e| self.edges[e].label == label)
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_self_loop()).count()
    }

    /// Subgraph induced by `ids`. Nodes are re-indexed in ascending original
    /// order; edge order follows the original edge indices.
    pub fn induced_subgraph(&self, ids: &BTreeSet<NodeId>) -> Result<HeteroGraph> {
        for &v in ids {
            self.check(v)?;
        }
        let mut remap = HashMap::with_capacity(ids.len());
        let mut b = GraphBuilder::new();
        for &v in ids {
            let n = &self.nodes[v.0];
            let new = b.add_node(
                self.node_labels.name(n.label),
                n.attrs.clone(),
                n.name.clone(),
            )?;
            remap.insert(v, new);
        }
        for e in &self.edges {
            if let (Some(&u), Some(&v)) = (remap.get(&e.u), remap.get(&e.v)) {
                b.add_edge(u, v, self.edge_labels.name(e.label), e.weight)?;
            }
        }
        Ok(b.freeze())
    }

    /// Copy of the graph keeping only edges for which `keep` holds. Node ids
    /// are unchanged.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &Edge) -> bool) -> HeteroGraph {
        let mut b = self.node_builder();
        for (i, e) in self.edges.iter().enumerate() {
            if keep(i, e) {
                b.edges.push(Edge {
                    u: e.u,
                    v: e.v,
                    label: b.edge_labels.intern(self.edge_labels.name(e.label)),
                    weight: e.weight,
                });
            }
        }
        b.freeze()
    }

    /// Builder pre-loaded with this graph's nodes and edges, for extending a
    /// frozen graph into a new one.
    pub fn to_builder(&self) -> GraphBuilder {
        let mut b = self.node_builder();
        b.edge_labels = self.edge_labels.clone();
        b.edges = self.edges.clone();
        b
    }

    fn node_builder(&self) -> GraphBuilder {
        let mut attr_dims = HashMap::new();
        for n in &self.nodes {
            if let Some(a) = &n.attrs {
                attr_dims.entry(n.label).or_insert(a.len());
            }
        }
        GraphBuilder {
            node_labels: self.node_labels.clone(),
            edge_labels: Alphabet::default(),
            nodes: self.nodes.clone(),
            edges: Vec::new(),
            attr_dims,
        }
    }

    /// Frequencies of node labels and edge labels.
    pub fn count_by_label(&self) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
        let mut nodes = BTreeMap::new();
        for n in &self.nodes {
            *nodes
                .entry(self.node_labels.name(n.label).to_string())
                .or_insert(0) += 1;
        }
        let mut edges = BTreeMap::new();
        for e in &self.edges {
            *edges
                .entry(self.edge_labels.name(e.label).to_string())
                .or_insert(0) += 1;
        }
        (nodes, edges)
    }

    /// Structural equality: same labels, names, attributes, edges and order.
    pub fn same_structure(&self, other: &HeteroGraph) -> bool {
        self.nodes.len() == other.nodes.len()
            && self.edges.len() == other.edges.len()
            && self.node_ids().all(|v| {
                let (a, b) = (&self.nodes[v.0], &other.nodes[v.0]);
                self.label_of(v) == other.label_of(v) && a.name == b.name && a.attrs == b.attrs
            })
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.u == b.u
                    && a.v == b.v
                    && a.weight.map(f64::to_bits) == b.weight.map(f64::to_bits)
                    && self.edge_labels.name(a.label) == other.edge_labels.name(b.label)
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> HeteroGraph {
        let mut b = GraphBuilder::new();
        let ids: Vec<_> = (0..3)
            .map(|i| b.add_node("N", None, format!("n{i}")).unwrap())
            .collect();
        b.add_edge(ids[0], ids[1], "E", None).unwrap();
        b.add_edge(ids[1], ids[2], "E", None).unwrap();
        b.freeze()
    }

    #[test]
    fn node_ids_are_contiguous() {
        let mut b = GraphBuilder::new();
        assert_eq!(b.add_node("A", None, "a").unwrap(), NodeId(0));
        assert_eq!(b.add_node("A", None, "b").unwrap(), NodeId(1));
    }

    #[test]
    fn attribute_dimension_is_enforced_per_label() {
        let mut b = GraphBuilder::new();
        b.add_node("A", Some(vec![1.0, 2.0]), "a").unwrap();
        let err = b.add_node("A", Some(vec![1.0, 2.0, 3.0]), "b").unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                got: 3,
                ..
            }
        ));
        // other labels are independent
        b.add_node("B", Some(vec![1.0, 2.0, 3.0]), "c").unwrap();
    }

    #[test]
    fn edges_are_undirected() {
        let mut b = GraphBuilder::new();
        let a = b.add_node("Clinical Trial", None, "t").unwrap();
        let c = b.add_node("Adverse Event", None, "e").unwrap();
        b.add_edge(a, c, "Expresses", None).unwrap();
        let g = b.freeze();
        assert_eq!(g.neighbors(a, None, None).unwrap(), vec![c]);
        assert_eq!(g.neighbors(c, None, None).unwrap(), vec![a]);
        assert!(g.has_edge(a, c) && g.has_edge(c, a));
    }

    #[test]
    fn duplicate_edges_grow_both_lists() {
        let mut b = GraphBuilder::new();
        let a = b.add_node("A", None, "a").unwrap();
        let c = b.add_node("A", None, "c").unwrap();
        b.add_edge(a, c, "E", None).unwrap();
        b.add_edge(a, c, "E", None).unwrap();
        let g = b.freeze();
        assert_eq!(g.degree(a), 2);
        assert_eq!(g.degree(c), 2);
        assert_eq!(
            g.distinct_neighbors_with_label(a, g.label_id_of(c)),
            vec![c]
        );
    }

    #[test]
    fn invalid_endpoint_is_rejected() {
        let mut b = GraphBuilder::new();
        b.add_node("A", None, "a").unwrap();
        b.add_node("A", None, "b").unwrap();
        let err = b.add_edge(NodeId(0), NodeId(99), "E", None).unwrap_err();
        assert!(matches!(err, Error::NodeOutOfRange { id: 99, len: 2 }));
    }

    #[test]
    fn self_loops_are_flagged() {
        let mut b = GraphBuilder::new();
        let a = b.add_node("A", None, "a").unwrap();
        b.add_edge(a, a, "E", None).unwrap();
        let g = b.freeze();
        assert_eq!(g.self_loop_count(), 1);
        assert!(g.edge(0).is_self_loop());
        assert_eq!(g.degree(a), 2);
    }

    #[test]
    fn neighbor_queries() {
        let mut b = GraphBuilder::new();
        let c = b.add_node("Hub", None, "c").unwrap();
        for i in 0..3 {
            let l = b.add_node("Leaf", None, format!("l{i}")).unwrap();
            b.add_edge(c, l, "E", None).unwrap();
        }
        let star = b.freeze();
        assert_eq!(star.neighbors(c, None, None).unwrap().len(), 3);
        assert!(star.neighbors(c, Some("Missing"), None).unwrap().is_empty());
        assert!(star.neighbors(c, None, Some("Hub")).unwrap().is_empty());

        let p = path3();
        assert_eq!(
            p.neighbors(NodeId(1), None, None).unwrap(),
            vec![NodeId(0), NodeId(2)]
        );
        assert!(p.neighbors(NodeId(5), None, None).is_err());
    }

    #[test]
    fn induced_subgraphs() {
        let mut b = GraphBuilder::new();
        let ids: Vec<_> = (0..3)
            .map(|i| {
                b.add_node("N", Some(vec![i as f64]), format!("n{i}"))
                    .unwrap()
            })
            .collect();
        b.add_edge(ids[0], ids[1], "E", None).unwrap();
        b.add_edge(ids[1], ids[2], "E", Some(2.0)).unwrap();
        b.add_edge(ids[2], ids[0], "E", None).unwrap();
        let tri = b.freeze();

        let all: BTreeSet<_> = tri.node_ids().collect();
        assert!(tri.induced_subgraph(&all).unwrap().same_structure(&tri));
        assert!(tri.induced_subgraph(&BTreeSet::new()).unwrap().is_empty());

        let two: BTreeSet<_> = [NodeId(1), NodeId(2)].into();
        let sub = tri.induced_subgraph(&two).unwrap();
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.edge(0).weight, Some(2.0));
        assert_eq!(sub.attrs(NodeId(0)), Some(&[1.0][..]));

        let bad: BTreeSet<_> = [NodeId(7)].into();
        assert!(tri.induced_subgraph(&bad).is_err());
    }

    #[test]
    fn counts() {
        let (n, e) = HeteroGraph::default().count_by_label();
        assert!(n.is_empty() && e.is_empty());
        let (n, e) = path3().count_by_label();
        assert_eq!(n["N"], 3);
        assert_eq!(e["E"], 2);
    }

    #[test]
    fn filter_and_extend_keep_ids() {
        let p = path3();
        let r = p.filter_edges(|i, _| i == 1);
        assert_eq!(r.node_count(), 3);
        assert_eq!(r.edge_count(), 1);
        assert!(!r.has_edge(NodeId(0), NodeId(1)));

        let mut b = p.to_builder();
        let x = b.add_node("N", None, "x").unwrap();
        b.add_edge(x, NodeId(0), "E", None).unwrap();
        let g = b.freeze();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.find_node("N", "x"), Some(x));
        assert_eq!(
            g.neighbors(NodeId(0), None, None).unwrap(),
            vec![NodeId(1), x]
        );
    }
}
