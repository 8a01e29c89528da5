//! Colored trees: validation, reduction to canonical form, principal
//! subtrees, model trees of partitions, enumeration and homomorphisms.
//!
//! A [`ColoredTree`] is always reduced and canonical. Colored vertices are
//! leaves carrying the marking labels. Vertices are stored in breadth-first
//! order with children sorted by the smallest label below them, so vertex
//! `k >= 1` doubles as the id of the edge from its parent (edge ids match
//! the `x_1, x_2, ...` numbering used when drawing trees level by level).
//! Uncolored vertices are numbered `1..=g` in post-order; the principal
//! vertex (the root) gets `g`.

mod enumerate;
mod homomorphism;
mod raw;

use std::fmt::Write as _;

use crate::sets::{Partition, Subset};
use crate::{Error, Result};

pub use enumerate::enumerate_trees;
pub use homomorphism::{compatibility_witness, find_homomorphism, is_compatible, TreeHomomorphism};
pub use raw::{reduce_tree, validate_tree, CheckResult, RawTree, RawVertex, ValidationReport};

/// Index of a vertex in canonical order; the root is `0`.
pub type NodeId = usize;
/// Edge id `k` is the edge from the parent of vertex `k` down to vertex `k`.
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    label: Option<u32>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    uncolored_index: Option<usize>,
}

/// Nested description of a tree used while building canonical forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    Leaf(u32),
    Node(Vec<Shape>),
}

impl Shape {
    fn min_label(&self) -> u32 {
        match self {
            Shape::Leaf(l) => *l,
            Shape::Node(children) => children
                .iter()
                .map(Shape::min_label)
                .min()
                .unwrap_or(u32::MAX),
        }
    }

    fn canonicalize(&mut self) {
        if let Shape::Node(children) = self {
            for c in children.iter_mut() {
                c.canonicalize();
            }
            children.sort_by_key(Shape::min_label);
        }
    }
}

/// A reduced colored tree in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredTree {
    nodes: Vec<Node>,
}

impl ColoredTree {
    pub(crate) fn from_shape(mut shape: Shape) -> ColoredTree {
        shape.canonicalize();
        let mut nodes: Vec<Node> = Vec::new();
        let mut queue: std::collections::VecDeque<(Shape, Option<NodeId>)> = Default::default();
        queue.push_back((shape, None));
        while let Some((s, parent)) = queue.pop_front() {
            let id = nodes.len();
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            match s {
                Shape::Leaf(l) => nodes.push(Node {
                    label: Some(l),
                    parent,
                    children: vec![],
                    uncolored_index: None,
                }),
                Shape::Node(children) => {
                    nodes.push(Node {
                        label: None,
                        parent,
                        children: vec![],
                        uncolored_index: None,
                    });
                    for c in children {
                        queue.push_back((c, Some(id)));
                    }
                }
            }
        }
        let mut tree = ColoredTree { nodes };
        let order = tree.post_order();
        let mut next = 1;
        for v in order {
            if tree.nodes[v].label.is_none() {
                tree.nodes[v].uncolored_index = Some(next);
                next += 1;
            }
        }
        tree
    }

    pub(crate) fn to_shape(&self, v: NodeId) -> Shape {
        match self.nodes[v].label {
            Some(l) => Shape::Leaf(l),
            None => Shape::Node(
                self.nodes[v]
                    .children
                    .iter()
                    .map(|&c| self.to_shape(c))
                    .collect(),
            ),
        }
    }

    /// Parses the nested notation: a parenthesised group is an uncolored
    /// vertex, a number is a colored leaf. `"((1,2),(3,4))"` is the tree with
    /// two simple principal subtrees on `{1,2}` and `{3,4}`.
    pub fn from_nested(s: &str) -> Result<ColoredTree> {
        let tokens: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let shape = parse_nested(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::InvalidInput(format!("trailing characters in {s:?}")));
        }
        let tree = ColoredTree::from_shape(shape);
        let mut labels: Vec<u32> = tree
            .colored_vertices()
            .map(|v| tree.nodes[v].label.unwrap())
            .collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("repeated label in {s:?}")));
        }
        Ok(tree)
    }

    pub fn to_nested(&self) -> String {
        fn go(t: &ColoredTree, v: NodeId, out: &mut String) {
            match t.nodes[v].label {
                Some(l) => {
                    let _ = write!(out, "{l}");
                }
                None => {
                    out.push('(');
                    for (i, &c) in t.nodes[v].children.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        go(t, c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(self, 0, &mut s);
        s
    }

    /// Vertices in post-order (children left to right, then the vertex).
    pub fn post_order(&self) -> Vec<NodeId> {
        fn go(t: &ColoredTree, v: NodeId, out: &mut Vec<NodeId>) {
            for &c in &t.nodes[v].children {
                go(t, c, out);
            }
            out.push(v);
        }
        let mut out = Vec::with_capacity(self.nodes.len());
        go(self, 0, &mut out);
        out
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of colored vertices.
    pub fn n(&self) -> usize {
        self.colored_vertices().count()
    }

    /// Number of uncolored vertices.
    pub fn g(&self) -> usize {
        self.nodes.len() - self.n()
    }

    pub fn label(&self, v: NodeId) -> Option<u32> {
        self.nodes[v].label
    }

    pub fn is_colored(&self, v: NodeId) -> bool {
        self.nodes[v].label.is_some()
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.nodes[v].parent
    }

    /// Post-order index in `1..=g` of an uncolored vertex.
    pub fn uncolored_index(&self, v: NodeId) -> Option<usize> {
        self.nodes[v].uncolored_index
    }

    /// The uncolored vertex with post-order index `k`.
    pub fn uncolored_vertex(&self, k: usize) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.uncolored_index == Some(k))
    }

    pub fn colored_vertices(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].label.is_some())
    }

    pub fn uncolored_vertices(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].label.is_none())
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        1..self.nodes.len()
    }

    pub fn is_edge(&self, e: EdgeId) -> bool {
        e >= 1 && e < self.nodes.len()
    }

    /// Upper endpoint of edge `e`.
    pub fn edge_parent(&self, e: EdgeId) -> NodeId {
        self.nodes[e].parent.expect("edge ids start at 1")
    }

    /// Lower endpoint of edge `e`.
    pub fn edge_child(&self, e: EdgeId) -> NodeId {
        e
    }

    /// Edges whose upper endpoint is `v`.
    pub fn child_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.nodes[v].children
    }

    /// All labels in the tree.
    pub fn labels(&self) -> Subset {
        self.labels_below(0)
    }

    /// Labels of the colored vertices at or below `v`.
    pub fn labels_below(&self, v: NodeId) -> Subset {
        match self.nodes[v].label {
            Some(l) => Subset::singleton(l),
            None => self.nodes[v]
                .children
                .iter()
                .fold(Subset::EMPTY, |acc, &c| acc.union(self.labels_below(c))),
        }
    }

    /// True when `v` lies in the subtree rooted at `ancestor` (inclusive).
    pub fn is_descendant(&self, v: NodeId, ancestor: NodeId) -> bool {
        let mut cur = Some(v);
        while let Some(x) = cur {
            if x == ancestor {
                return true;
            }
            cur = self.nodes[x].parent;
        }
        false
    }

    pub fn vertex_of_label(&self, label: u32) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.label == Some(label))
    }

    /// Edges of the path from the root down to `v`, top first.
    pub fn path_from_root(&self, v: NodeId) -> Vec<EdgeId> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(p) = self.nodes[cur].parent {
            path.push(cur);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Root-to-colored-vertex paths, in increasing label order.
    pub fn colored_paths(&self) -> Vec<Vec<EdgeId>> {
        let mut leaves: Vec<NodeId> = self.colored_vertices().collect();
        leaves.sort_by_key(|&v| self.nodes[v].label);
        leaves.into_iter().map(|v| self.path_from_root(v)).collect()
    }

    /// The subtree hanging from `v`, re-rooted and canonical. Labels are kept.
    pub fn subtree(&self, v: NodeId) -> ColoredTree {
        ColoredTree::from_shape(self.to_shape(v))
    }

    /// Maps the vertices of `self.subtree(v)` back to vertices of `self`.
    pub fn subtree_embedding(&self, v: NodeId) -> Vec<NodeId> {
        // Canonical children order is inherited, so a breadth-first walk from
        // `v` visits vertices in the subtree's canonical order.
        let mut order = vec![v];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            order.extend(self.nodes[x].children.iter().copied());
            i += 1;
        }
        order
    }

    pub fn to_raw(&self) -> RawTree {
        RawTree {
            root: 0,
            vertices: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| RawVertex {
                    id: i as i64,
                    colored: n.label.is_some(),
                    label: n.label,
                })
                .collect(),
            edges: self
                .edges()
                .map(|e| [self.edge_parent(e) as i64, e as i64])
                .collect(),
        }
    }

    pub fn from_json(s: &str) -> Result<ColoredTree> {
        let raw: RawTree = serde_json::from_str(s)?;
        reduce_tree(&raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("tree serializes")
    }

    /// Graphviz rendering: uncolored vertices show their post-order index,
    /// colored vertices their label, edges their id.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph colored_tree {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            match (n.label, n.uncolored_index) {
                (Some(l), _) => {
                    let _ = writeln!(
                        s,
                        "  n{i} [label=\"{l}\", shape=doublecircle, style=filled];"
                    );
                }
                (None, Some(k)) => {
                    let _ = writeln!(s, "  n{i} [label=\"v{k}\", shape=circle];");
                }
                (None, None) => unreachable!("uncolored vertices are numbered"),
            }
        }
        for e in self.edges() {
            let _ = writeln!(
                s,
                "  n{} -> n{} [label=\"x{}\"];",
                self.edge_parent(e),
                e,
                e
            );
        }
        s.push_str("}\n");
        s
    }
}

impl std::fmt::Debug for ColoredTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ColoredTree{}", self.to_nested())
    }
}

fn parse_nested(tokens: &[char], pos: &mut usize) -> Result<Shape> {
    match tokens.get(*pos) {
        Some('(') => {
            *pos += 1;
            let mut children = Vec::new();
            loop {
                children.push(parse_nested(tokens, pos)?);
                match tokens.get(*pos) {
                    Some(',') => *pos += 1,
                    Some(')') => {
                        *pos += 1;
                        return Ok(Shape::Node(children));
                    }
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "expected ',' or ')' at position {pos}, found {other:?}"
                        )))
                    }
                }
            }
        }
        Some(c) if c.is_ascii_digit() => {
            let start = *pos;
            while tokens.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                *pos += 1;
            }
            let digits: String = tokens[start..*pos].iter().collect();
            let label: u32 = digits
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad label {digits:?}")))?;
            if label == 0 || label as usize > crate::sets::MAX_N {
                return Err(Error::InvalidInput(format!("label {label} out of range")));
            }
            Ok(Shape::Leaf(label))
        }
        other => Err(Error::InvalidInput(format!(
            "unexpected {other:?} at position {pos}"
        ))),
    }
}

/// The subtrees hanging from the principal branches, each re-rooted and
/// canonical. A branch ending at a colored vertex yields a one-vertex stub.
pub fn principal_subtrees(t: &ColoredTree) -> Vec<ColoredTree> {
    t.children(t.root()).iter().map(|&c| t.subtree(c)).collect()
}

/// The model tree of a partition: a principal vertex with one branch per
/// block, ending in a simple tree on the block (or directly in the colored
/// vertex for a singleton block).
pub fn tree_for_partition(p: &Partition) -> Result<ColoredTree> {
    if p.block_count() < 2 {
        return Err(Error::InvalidInput(format!(
            "partition {p} has a single block"
        )));
    }
    let branches = p
        .blocks()
        .iter()
        .map(|b| {
            if b.len() == 1 {
                Shape::Leaf(b.min_element().expect("nonempty block"))
            } else {
                Shape::Node(b.elements().map(Shape::Leaf).collect())
            }
        })
        .collect();
    Ok(ColoredTree::from_shape(Shape::Node(branches)))
}
