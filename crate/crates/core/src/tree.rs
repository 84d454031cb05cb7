//! Complete d-ary trees with heap numbering.
//!
//! Nodes are numbered from 1 at the root; the children of node `i` are
//! `d(i-1)+2 ..= di+1`. Height counts levels, so a root with leaf children
//! has height 2.

use serde::{Deserialize, Serialize};

/// Heap-numbered node id (root = 1).
pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeShape {
    pub d: usize,
    pub h: usize,
}

impl TreeShape {
    /// Panics unless `d >= 2` and `h >= 1`.
    pub fn new(d: usize, h: usize) -> Self {
        assert!(d >= 2, "degree must be at least 2");
        assert!(h >= 1, "height must be at least 1");
        TreeShape { d, h }
    }

    pub fn internal_count(&self) -> usize {
        (self.d.pow(self.h as u32 - 1) - 1) / (self.d - 1)
    }

    pub fn leaf_count(&self) -> usize {
        self.d.pow(self.h as u32 - 1)
    }

    pub fn node_count(&self) -> usize {
        (self.d.pow(self.h as u32) - 1) / (self.d - 1)
    }

    pub fn first_leaf(&self) -> NodeId {
        self.internal_count() + 1
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        node > self.internal_count()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node >= 1 && node <= self.node_count()
    }

    pub fn children(&self, node: NodeId) -> std::ops::RangeInclusive<NodeId> {
        if self.is_leaf(node) {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        let first = self.d * (node - 1) + 2;
        first..=first + self.d - 1
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        if node <= 1 {
            None
        } else {
            Some((node - 2) / self.d + 1)
        }
    }

    /// Depth of `node`, root at depth 0.
    pub fn depth(&self, node: NodeId) -> usize {
        let mut depth = 0;
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            cur = p;
            depth += 1;
        }
        depth
    }

    /// Height of the subtree rooted at `node` (a leaf has height 1).
    pub fn subtree_height(&self, node: NodeId) -> usize {
        self.h - self.depth(node)
    }

    /// Nodes of the subtree rooted at `node` in heap order.
    pub fn subtree_nodes(&self, node: NodeId) -> Vec<NodeId> {
        let mut out = vec![node];
        let mut level = vec![node];
        while !level.is_empty() {
            let next: Vec<NodeId> = level.iter().flat_map(|&v| self.children(v)).collect();
            out.extend(&next);
            level = next;
        }
        out
    }

    /// Number of input variables of the function problem over `[k]`.
    pub fn variable_count(&self, k: usize) -> u128 {
        self.internal_count() as u128 * (k as u128).pow(self.d as u32) + self.leaf_count() as u128
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_heap_numbering() {
        let t = TreeShape::new(2, 3);
        assert_eq!(t.node_count(), 7);
        assert_eq!(t.children(1).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(t.children(3).collect::<Vec<_>>(), vec![6, 7]);
        assert!(t.children(4).next().is_none());
        assert_eq!(t.parent(7), Some(3));
        assert_eq!(t.first_leaf(), 4);
    }

    #[test]
    fn ternary_counts() {
        let t = TreeShape::new(3, 3);
        assert_eq!(t.internal_count(), 4);
        assert_eq!(t.leaf_count(), 9);
        assert_eq!(t.node_count(), 13);
        assert_eq!(t.children(2).collect::<Vec<_>>(), vec![5, 6, 7]);
        assert_eq!(t.parent(13), Some(4));
        assert_eq!(t.subtree_height(4), 2);
    }

    #[test]
    fn variable_count_matches_formula() {
        assert_eq!(TreeShape::new(2, 2).variable_count(2), 6);
        assert_eq!(TreeShape::new(2, 3).variable_count(2), 16);
    }
}
