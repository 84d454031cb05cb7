//! Reduction to instances where every internal node shares one function.
//!
//! Values of the shared-function instance range over `[N*k]` and encode the
//! pair `<i, x>` (node `i`, value `x`) as `(i-1)*k + x`, so `<1,1>` is 1.

use crate::instance::{tuple_index, ProblemKind, TepInstance};
use crate::tree::{NodeId, TreeShape};

/// Instance with one shared node function over alphabet `[N*k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedTableInstance {
    shape: TreeShape,
    /// Alphabet size `N*k`.
    alphabet: usize,
    /// Shared table of size `alphabet^d`, row-major.
    table: Vec<u32>,
    leaves: Vec<u32>,
}

/// Encodes `<node, value>` for an alphabet built over `[k]`.
pub fn encode_pair(node: NodeId, value: u32, k: usize) -> u32 {
    ((node - 1) * k) as u32 + value
}

/// Inverse of [`encode_pair`].
pub fn decode_pair(code: u32, k: usize) -> (NodeId, u32) {
    let c = code as usize - 1;
    (c / k + 1, (c % k) as u32 + 1)
}

impl SharedTableInstance {
    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn f(&self, args: &[u32]) -> u32 {
        self.table[tuple_index(args, self.alphabet)]
    }

    /// Node values (index 0 unused), bottom-up over the heap order.
    pub fn node_values(&self) -> Vec<u32> {
        let n = self.shape.node_count();
        let first_leaf = self.shape.first_leaf();
        let mut values = vec![0u32; n + 1];
        for node in (1..=n).rev() {
            values[node] = if node >= first_leaf {
                self.leaves[node - first_leaf]
            } else {
                let args: Vec<u32> = self.shape.children(node).map(|c| values[c]).collect();
                self.f(&args)
            };
        }
        values
    }

    /// Root value, or for the Boolean problem whether it equals `<1,1>`.
    pub fn evaluate(&self, kind: ProblemKind) -> u32 {
        let root = self.node_values()[1];
        match kind {
            ProblemKind::Function => root,
            ProblemKind::Boolean => u32::from(root == 1),
        }
    }
}

/// Builds the shared-function instance whose node `i` takes value `<i, v_i>`.
/// Argument tuples that are not `<children of j, ...>` for some internal `j`
/// map to `<1,1>`.
pub fn to_single_function(instance: &TepInstance) -> SharedTableInstance {
    let shape = instance.shape();
    let k = instance.k();
    let d = shape.d;
    let alphabet = shape.node_count() * k;
    let mut table = vec![encode_pair(1, 1, k); alphabet.pow(d as u32)];
    let mut args = vec![0u32; d];
    let mut coded = vec![0u32; d];
    for j in 1..=shape.internal_count() {
        let children: Vec<NodeId> = shape.children(j).collect();
        let rows = k.pow(d as u32);
        for row in 0..rows {
            // decode row into 1-based child values
            let mut r = row;
            for slot in args.iter_mut().rev() {
                *slot = (r % k) as u32 + 1;
                r /= k;
            }
            for ((c, &child), &x) in coded.iter_mut().zip(&children).zip(&args) {
                *c = encode_pair(child, x, k);
            }
            table[tuple_index(&coded, alphabet)] = encode_pair(j, instance.table(j)[row], k);
        }
    }
    let leaves = (shape.first_leaf()..=shape.node_count())
        .map(|leaf| encode_pair(leaf, instance.leaf(leaf), k))
        .collect();
    SharedTableInstance { shape, alphabet, table, leaves }
}
