//! Tree evaluation instances.
//!
//! An instance over `[k] = {1..k}` assigns a total table `[k]^d -> [k]` to
//! every internal node and a value to every leaf. Tables are stored row-major
//! over child tuples in lexicographic order, first child most significant.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{NodeId, TreeShape};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("instance space k^m = {k}^{m} exceeds the cap of {cap} instances")]
    TooManyInstances { k: usize, m: u128, cap: u128 },
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Function,
    Boolean,
}

/// A single input variable of the tree evaluation problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum VarId {
    /// Entry of `f_node` at the child tuple with row-major index `tuple`.
    Func { node: NodeId, tuple: usize },
    Leaf { node: NodeId },
}

impl VarId {
    pub fn node(&self) -> NodeId {
        match *self {
            VarId::Func { node, .. } | VarId::Leaf { node } => node,
        }
    }

    /// Function entry for an explicit 1-based child tuple.
    pub fn func(node: NodeId, args: &[u32], k: usize) -> Self {
        VarId::Func { node, tuple: tuple_index(args, k) }
    }
}

/// Row-major index of a 1-based tuple over `[k]`.
pub fn tuple_index(args: &[u32], k: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * k + (a as usize - 1))
}

/// Inverse of [`tuple_index`].
pub fn tuple_values(mut index: usize, d: usize, k: usize) -> Vec<u32> {
    let mut out = vec![0u32; d];
    for slot in out.iter_mut().rev() {
        *slot = (index % k) as u32 + 1;
        index /= k;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TepInstance {
    shape: TreeShape,
    k: usize,
    /// `tables[i-1]` holds `f_i` for internal node `i`.
    tables: Vec<Vec<u32>>,
    /// Leaf values in heap order.
    leaves: Vec<u32>,
}

impl TepInstance {
    pub fn new(
        shape: TreeShape,
        k: usize,
        tables: Vec<Vec<u32>>,
        leaves: Vec<u32>,
    ) -> Result<Self, InstanceError> {
        if k < 2 {
            return Err(InstanceError::Malformed(format!("k must be at least 2, got {k}")));
        }
        if tables.len() != shape.internal_count() {
            return Err(InstanceError::Malformed(format!(
                "expected {} tables, got {}",
                shape.internal_count(),
                tables.len()
            )));
        }
        if leaves.len() != shape.leaf_count() {
            return Err(InstanceError::Malformed(format!(
                "expected {} leaves, got {}",
                shape.leaf_count(),
                leaves.len()
            )));
        }
        let rows = k.pow(shape.d as u32);
        for (i, t) in tables.iter().enumerate() {
            if t.len() != rows {
                return Err(InstanceError::Malformed(format!(
                    "table of node {} has {} entries, expected {rows}",
                    i + 1,
                    t.len()
                )));
            }
        }
        let in_range = |v: &u32| *v >= 1 && *v as usize <= k;
        if !tables.iter().flatten().all(in_range) || !leaves.iter().all(in_range) {
            return Err(InstanceError::Malformed(format!("value outside [1, {k}]")));
        }
        Ok(TepInstance { shape, k, tables, leaves })
    }

    /// The instance with every table entry and leaf equal to 1.
    pub fn all_ones(shape: TreeShape, k: usize) -> Self {
        let rows = k.pow(shape.d as u32);
        TepInstance {
            shape,
            k,
            tables: vec![vec![1; rows]; shape.internal_count()],
            leaves: vec![1; shape.leaf_count()],
        }
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn table(&self, node: NodeId) -> &[u32] {
        &self.tables[node - 1]
    }

    pub fn leaf(&self, node: NodeId) -> u32 {
        self.leaves[node - self.shape.first_leaf()]
    }

    pub fn f(&self, node: NodeId, args: &[u32]) -> u32 {
        self.tables[node - 1][tuple_index(args, self.k)]
    }

    pub fn set_entry(&mut self, node: NodeId, args: &[u32], value: u32) {
        assert!(value >= 1 && value as usize <= self.k);
        let idx = tuple_index(args, self.k);
        self.tables[node - 1][idx] = value;
    }

    pub fn set_leaf(&mut self, node: NodeId, value: u32) {
        assert!(value >= 1 && value as usize <= self.k);
        let first = self.shape.first_leaf();
        self.leaves[node - first] = value;
    }

    /// Value of a single input variable.
    pub fn var(&self, var: VarId) -> u32 {
        match var {
            VarId::Func { node, tuple } => self.tables[node - 1][tuple],
            VarId::Leaf { node } => self.leaf(node),
        }
    }

    pub fn variable_count(&self) -> u128 {
        self.shape.variable_count(self.k)
    }

    /// All node values `v_1..v_N` (index 0 unused), computed by an
    /// explicit-stack post-order traversal.
    pub fn node_values(&self) -> Vec<u32> {
        let n = self.shape.node_count();
        let d = self.shape.d;
        let mut values = vec![0u32; n + 1];
        // (node, index of next child to visit)
        let mut stack: Vec<(NodeId, usize)> = vec![(1, 0)];
        let mut args: Vec<Vec<u32>> = vec![Vec::with_capacity(d)];
        while let Some(&(node, next)) = stack.last() {
            if self.shape.is_leaf(node) {
                values[node] = self.leaf(node);
            } else if next < d {
                let child = d * (node - 1) + 2 + next;
                stack.last_mut().expect("frame").1 += 1;
                stack.push((child, 0));
                args.push(Vec::with_capacity(d));
                continue;
            } else {
                values[node] = self.f(node, args.last().expect("argument frame"));
            }
            stack.pop();
            args.pop();
            if let Some(parent) = args.last_mut() {
                parent.push(values[node]);
            }
        }
        values
    }

    /// Root value (function problem) or `v_1 == 1` (Boolean problem),
    /// encoded as 1 = true and 0 = false for the latter.
    pub fn evaluate(&self, kind: ProblemKind) -> u32 {
        let root = self.node_values()[1];
        match kind {
            ProblemKind::Function => root,
            ProblemKind::Boolean => u32::from(root == 1),
        }
    }

    /// Tuple of true child values of an internal node.
    pub fn child_values(&self, values: &[u32], node: NodeId) -> Vec<u32> {
        self.shape.children(node).map(|c| values[c]).collect()
    }

    pub fn to_json(&self) -> InstanceJson {
        let tables = self
            .tables
            .iter()
            .enumerate()
            .map(|(i, t)| ((i + 1).to_string(), t.clone()))
            .collect();
        InstanceJson {
            d: self.shape.d,
            h: self.shape.h,
            k: self.k,
            leaves: self.leaves.clone(),
            tables,
        }
    }

    pub fn from_json(json: &InstanceJson) -> Result<Self, InstanceError> {
        if json.d < 2 || json.h < 1 {
            return Err(InstanceError::Malformed("need d >= 2 and h >= 1".into()));
        }
        let shape = TreeShape::new(json.d, json.h);
        let mut tables = Vec::with_capacity(shape.internal_count());
        for node in 1..=shape.internal_count() {
            let t = json
                .tables
                .get(&node.to_string())
                .ok_or_else(|| InstanceError::Malformed(format!("missing table for node {node}")))?;
            tables.push(t.clone());
        }
        if json.tables.len() != shape.internal_count() {
            return Err(InstanceError::Malformed("unexpected table keys".into()));
        }
        TepInstance::new(shape, json.k, tables, json.leaves.clone())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("instance serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, InstanceError> {
        let json: InstanceJson = serde_json::from_str(text)?;
        TepInstance::from_json(&json)
    }
}

/// Wire format: `{"d","h","k","leaves":[..],"tables":{"<node>":[..]}}`,
/// 1-based values, tables row-major over lexicographic child tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub d: usize,
    pub h: usize,
    pub k: usize,
    pub leaves: Vec<u32>,
    pub tables: BTreeMap<String, Vec<u32>>,
}

/// `k^m`, or `None` if it overflows `u128`.
pub fn count_instances(shape: TreeShape, k: usize) -> Option<u128> {
    let m = u32::try_from(shape.variable_count(k)).ok()?;
    (k as u128).checked_pow(m)
}

/// Iterator over every instance of a shape, in lexicographic order of the
/// variable vector (tables of nodes 1.. in row-major order, then leaves in
/// heap order; the first variable is the most significant digit). The first
/// instance is all ones.
pub struct InstanceEnumerator {
    current: Option<TepInstance>,
}

impl Iterator for InstanceEnumerator {
    type Item = TepInstance;

    fn next(&mut self) -> Option<TepInstance> {
        let out = self.current.take()?;
        let mut next = out.clone();
        if advance(&mut next) {
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Odometer increment from the least significant variable. Returns false on
/// wrap-around.
fn advance(inst: &mut TepInstance) -> bool {
    let k = inst.k as u32;
    for v in inst.leaves.iter_mut().rev() {
        if *v < k {
            *v += 1;
            return true;
        }
        *v = 1;
    }
    for table in inst.tables.iter_mut().rev() {
        for v in table.iter_mut().rev() {
            if *v < k {
                *v += 1;
                return true;
            }
            *v = 1;
        }
    }
    false
}

pub fn enumerate_instances(
    shape: TreeShape,
    k: usize,
    cap: u128,
) -> Result<InstanceEnumerator, InstanceError> {
    let m = shape.variable_count(k);
    match count_instances(shape, k) {
        Some(n) if n <= cap => Ok(InstanceEnumerator { current: Some(TepInstance::all_ones(shape, k)) }),
        _ => Err(InstanceError::TooManyInstances { k, m, cap }),
    }
}

/// Uniformly random instance, deterministic in `seed`.
pub fn random_instance(shape: TreeShape, k: usize, seed: u64) -> TepInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = k.pow(shape.d as u32);
    let tables = (0..shape.internal_count())
        .map(|_| (0..rows).map(|_| rng.gen_range(1..=k as u32)).collect())
        .collect();
    let leaves = (0..shape.leaf_count()).map(|_| rng.gen_range(1..=k as u32)).collect();
    TepInstance { shape, k, tables, leaves }
}
