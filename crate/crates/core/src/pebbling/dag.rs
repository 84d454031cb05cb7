//! Pebbling targets: directed acyclic graphs with edges oriented child -> parent.
//!
//! Nodes are numbered `1..=n`. Trees embed with heap numbering. Sinks (nodes
//! without parents) are the roots that must carry a whole black pebble at
//! some point of a pebbling.

use std::fmt::Write as _;

use thiserror::Error;

use crate::tree::{NodeId, TreeShape};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DagError {
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("graph contains a cycle")]
    Cyclic,
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PebbleDag {
    /// `children[v]` in ascending order; index 0 unused.
    children: Vec<Vec<NodeId>>,
    parents: Vec<Vec<NodeId>>,
    roots: Vec<NodeId>,
    tree: Option<TreeShape>,
}

impl PebbleDag {
    /// Builds a DAG from `(child, parent)` edges. Child lists are sorted.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, DagError> {
        let mut children = vec![Vec::new(); n + 1];
        let mut parents = vec![Vec::new(); n + 1];
        for &(c, p) in edges {
            for v in [c, p] {
                if v == 0 || v > n {
                    return Err(DagError::NodeOutOfRange(v));
                }
            }
            if children[p].contains(&c) {
                return Err(DagError::DuplicateEdge(c, p));
            }
            children[p].push(c);
            parents[c].push(p);
        }
        for list in children.iter_mut().chain(parents.iter_mut()) {
            list.sort_unstable();
        }
        let roots = (1..=n).filter(|&v| parents[v].is_empty()).collect();
        let dag = PebbleDag { children, parents, roots, tree: None };
        dag.topological_order().ok_or(DagError::Cyclic)?;
        Ok(dag)
    }

    pub fn from_tree(shape: TreeShape) -> Self {
        let edges: Vec<(NodeId, NodeId)> = (2..=shape.node_count())
            .map(|v| (v, shape.parent(v).expect("non-root has a parent")))
            .collect();
        let mut dag = PebbleDag::from_edges(shape.node_count(), &edges).expect("trees are acyclic");
        dag.tree = Some(shape);
        dag
    }

    pub fn tree(&self) -> Option<TreeShape> {
        self.tree
    }

    pub fn node_count(&self) -> usize {
        self.children.len() - 1
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<NodeId> {
        1..=self.node_count()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v >= 1 && v <= self.node_count()
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v]
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn is_source(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    pub fn max_in_degree(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.nodes()
            .flat_map(|p| self.children[p].iter().map(move |&c| (c, p)))
            .collect()
    }

    /// Sources first. `None` if cyclic.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = self.children.iter().map(Vec::len).collect();
        let mut ready: Vec<NodeId> = (1..=n).filter(|&v| indegree[v] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &p in &self.parents[v] {
                indegree[p] -= 1;
                if indegree[p] == 0 {
                    ready.push(p);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Edge-list text: a `nodes <n>` line followed by one `<child> <parent>`
    /// line per edge. `#` starts a comment.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        writeln!(out, "nodes {}", self.node_count()).unwrap();
        for (c, p) in self.edges() {
            writeln!(out, "{c} {p}").unwrap();
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, DagError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| DagError::Parse { line: i + 1, message: message.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts[0] == "nodes" {
                if parts.len() != 2 {
                    return Err(err("expected `nodes <n>`"));
                }
                n = Some(parts[1].parse::<usize>().map_err(|_| err("bad node count"))?);
                continue;
            }
            if parts.len() != 2 {
                return Err(err("expected `<child> <parent>`"));
            }
            let c = parts[0].parse().map_err(|_| err("bad child id"))?;
            let p = parts[1].parse().map_err(|_| err("bad parent id"))?;
            edges.push((c, p));
        }
        let n = n.ok_or(DagError::Parse { line: 0, message: "missing `nodes` line".into() })?;
        PebbleDag::from_edges(n, &edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_embedding() {
        let dag = PebbleDag::from_tree(TreeShape::new(2, 3));
        assert_eq!(dag.roots(), &[1]);
        assert_eq!(dag.children(3), &[6, 7]);
        assert!(dag.is_source(4));
        assert_eq!(dag.max_in_degree(), 2);
    }

    #[test]
    fn cycle_rejected() {
        assert_eq!(PebbleDag::from_edges(2, &[(1, 2), (2, 1)]), Err(DagError::Cyclic));
    }

    #[test]
    fn edge_list_roundtrip() {
        let dag = PebbleDag::from_edges(4, &[(1, 3), (2, 3), (2, 4), (3, 4)]).unwrap();
        let text = dag.to_edge_list();
        assert_eq!(PebbleDag::parse_edge_list(&text).unwrap(), dag);
        assert!(PebbleDag::parse_edge_list("1 2\n").is_err());
    }
}
