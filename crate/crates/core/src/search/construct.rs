//! The split-node DAGs `G` and `G'` built from a complete tree.

use crate::pebbling::PebbleDag;
use crate::tree::{NodeId, TreeShape};

/// Id of copy `i` (1-based) of tree node `v`.
pub fn copy_id(v: NodeId, i: usize, c: usize) -> NodeId {
    (v - 1) * c + i
}

/// Replaces every tree node by `c` copies, joins copies of adjacent tree
/// nodes completely, and adds one root above the copies of the tree root.
pub fn build_g(d: usize, h: usize, c: usize) -> PebbleDag {
    build(d, h, c, false)
}

/// `G` with the edges from copy `i` to its `i - 1` smallest and `c - i`
/// largest children removed, children ordered by tree inorder and then by
/// copy index.
pub fn build_g_prime(d: usize, h: usize, c: usize) -> PebbleDag {
    build(d, h, c, true)
}

fn build(d: usize, h: usize, c: usize, prune: bool) -> PebbleDag {
    assert!(c >= 1, "granularity must be positive");
    let shape = TreeShape::new(d, h);
    let n = shape.node_count() * c + 1;
    let mut edges = Vec::new();
    for v in 1..shape.first_leaf() {
        // Children of a tree node are siblings, so inorder agrees with
        // left-to-right order among them.
        let children: Vec<NodeId> =
            shape.children(v).flat_map(|u| (1..=c).map(move |j| copy_id(u, j, c))).collect();
        for i in 1..=c {
            let kept = if prune { &children[i - 1..children.len() - (c - i)] } else { &children[..] };
            edges.extend(kept.iter().map(|&u| (u, copy_id(v, i, c))));
        }
    }
    edges.extend((1..=c).map(|i| (copy_id(1, i, c), n)));
    PebbleDag::from_edges(n, &edges).expect("construction is acyclic")
}
