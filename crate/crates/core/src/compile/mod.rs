//! Compilers from pebbling strategies to branching programs.

pub mod black;
pub mod fractional;
pub mod logsave;

use std::collections::VecDeque;
use std::hash::Hash;

use num_traits::Zero;
use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::bp::{output_range, BranchingProgram, State, StateId};
use crate::instance::{ProblemKind, VarId};
use crate::pebbling::{PebbleMove, SequenceError};
use crate::tree::{NodeId, TreeShape};

pub use black::{compile_black_det, compile_black_default};
pub use fractional::{compile_fractional_default, compile_fractional_nondet};
pub use logsave::{compile_boolean_logsave, default_block_size};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CompileError {
    #[error("input sequence is invalid: {0}")]
    InvalidSequence(#[from] SequenceError),
    #[error("{0}")]
    Unsupported(String),
    #[error("block size {m} must lie in 1..={k}")]
    InvalidBlockSize { m: usize, k: usize },
    #[error("k must be at least 2")]
    AlphabetTooSmall,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompilationReport {
    pub compiler: String,
    /// Cost of the source pebbling, as `p/q`.
    pub source_cost: String,
    pub k: usize,
    pub states: usize,
    /// Query states created for each step (phase steps for the log-saving
    /// compiler), in order.
    pub states_per_step: Vec<usize>,
    /// Bits stored per configuration (fractional compiler only).
    pub bits_per_config: Option<Vec<u32>>,
    /// `p log2 k + 2T` for the fractional compiler.
    pub bit_bound: Option<f64>,
    /// Query states per phase (log-saving compiler only).
    pub phase_states: Option<[usize; 4]>,
}

/// What a state does, expressed over abstract keys.
pub(crate) enum Node<K> {
    Final(u32),
    Query { var: VarId, edges: Vec<(u32, K)> },
}

/// Explores the keys reachable from `start`, numbering states in
/// breadth-first order. Finals that never become reachable are appended so
/// the program has one final per output.
pub(crate) fn build_program<K: Clone + Eq + Hash>(
    shape: TreeShape,
    k: usize,
    kind: ProblemKind,
    deterministic: bool,
    start: K,
    mut expand: impl FnMut(&K) -> Node<K>,
) -> (BranchingProgram, Vec<K>) {
    let mut ids: FxHashMap<K, StateId> = FxHashMap::default();
    let mut keys = vec![start.clone()];
    ids.insert(start, 0);
    let mut states: Vec<State> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut slots: Vec<Option<State>> = vec![None];
    while let Some(id) = queue.pop_front() {
        let node = expand(&keys[id]);
        let state = match node {
            Node::Final(output) => State::Final { output },
            Node::Query { var, edges } => {
                let edges = edges
                    .into_iter()
                    .map(|(label, key)| {
                        let to = *ids.entry(key.clone()).or_insert_with(|| {
                            keys.push(key);
                            slots.push(None);
                            queue.push_back(keys.len() - 1);
                            keys.len() - 1
                        });
                        (label, to)
                    })
                    .collect();
                State::Query { var, edges }
            }
        };
        slots[id] = Some(state);
    }
    states.extend(slots.into_iter().map(|s| s.expect("every key expanded")));
    for output in output_range(kind, k) {
        if !states.contains(&State::Final { output }) {
            states.push(State::Final { output });
        }
    }
    let bp = BranchingProgram { shape, k, kind, deterministic, start: 0, states };
    (bp, keys)
}

/// One query of a black pebbling run, with pebbles held in numbered slots.
#[derive(Clone, Debug)]
pub(crate) struct SlotQuery {
    pub node: NodeId,
    /// Slots holding the children's values, in child order.
    pub child_slots: Vec<usize>,
    /// Slot receiving the queried value.
    pub slot: usize,
    /// Slots whose pebbles leave the tree before the next query; their
    /// values reset to 1.
    pub released: Vec<usize>,
}

/// A black pebbling run compiled to slot operations. Removals between
/// queries are folded into the preceding query.
#[derive(Clone, Debug)]
pub(crate) struct SlotSchedule {
    pub slots: usize,
    pub queries: Vec<SlotQuery>,
}

impl SlotSchedule {
    /// Follows `moves` (a valid black pebbling of `shape` or of one of its
    /// subtrees) up to the move placing a pebble on `top`.
    pub fn new(shape: TreeShape, moves: &[PebbleMove], top: NodeId) -> Result<Self, CompileError> {
        let mut slot_of: FxHashMap<NodeId, usize> = FxHashMap::default();
        let mut used = 0usize;
        let mut free: Vec<usize> = Vec::new();
        let mut queries: Vec<SlotQuery> = Vec::new();
        let take = |free: &mut Vec<usize>, used: &mut usize| {
            free.sort_unstable_by(|a, b| b.cmp(a));
            free.pop().unwrap_or_else(|| {
                *used += 1;
                *used - 1
            })
        };
        for mv in moves {
            match mv {
                PebbleMove::DecreaseBlack { node, amount } if !amount.is_zero() => {
                    let s = slot_of.remove(node).ok_or_else(|| unsupported(mv))?;
                    free.push(s);
                    if let Some(q) = queries.last_mut() {
                        q.released.push(s);
                    }
                }
                PebbleMove::DecreaseBlack { .. } => {}
                PebbleMove::Finish { node, decrease, .. } if !slot_of.contains_key(node) => {
                    let children: Vec<NodeId> = if shape.is_leaf(*node) { vec![] } else { shape.children(*node).collect() };
                    let child_slots = children
                        .iter()
                        .map(|c| slot_of.get(c).copied().ok_or_else(|| unsupported(mv)))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mut released = Vec::new();
                    for (c, _) in decrease {
                        released.push(slot_of.remove(c).ok_or_else(|| unsupported(mv))?);
                    }
                    let slot = if released.is_empty() {
                        take(&mut free, &mut used)
                    } else {
                        released.sort_unstable();
                        released.remove(0)
                    };
                    free.extend(&released);
                    slot_of.insert(*node, slot);
                    queries.push(SlotQuery { node: *node, child_slots, slot, released });
                    if *node == top {
                        return Ok(SlotSchedule { slots: used, queries });
                    }
                }
                PebbleMove::Finish { decrease, .. } => {
                    for (c, _) in decrease {
                        let s = slot_of.remove(c).ok_or_else(|| unsupported(mv))?;
                        free.push(s);
                        if let Some(q) = queries.last_mut() {
                            q.released.push(s);
                        }
                    }
                }
                other => return Err(unsupported(other)),
            }
        }
        Err(CompileError::Unsupported(format!("node {top} never receives a pebble")))
    }

    pub fn var(&self, shape: TreeShape, k: usize, t: usize, slots: &[u32]) -> VarId {
        let q = &self.queries[t];
        if q.child_slots.is_empty() {
            VarId::Leaf { node: q.node }
        } else {
            debug_assert!(!shape.is_leaf(q.node));
            let args: Vec<u32> = q.child_slots.iter().map(|&s| slots[s]).collect();
            VarId::func(q.node, &args, k)
        }
    }

    /// Slot contents after query `t` answered `value`.
    pub fn advance(&self, t: usize, slots: &[u32], value: u32) -> Vec<u32> {
        let q = &self.queries[t];
        let mut next = slots.to_vec();
        next[q.slot] = value;
        for &s in &q.released {
            next[s] = 1;
        }
        next
    }
}

fn unsupported(mv: &PebbleMove) -> CompileError {
    CompileError::Unsupported(format!("move `{mv}` is not a whole black pebbling move here"))
}

/// The moves of a black pebbling of the subtree below `top`, obtained by
/// relabelling a pebbling of a complete tree of the subtree's height.
pub(crate) fn subtree_moves(shape: TreeShape, top: NodeId, local: &[PebbleMove]) -> Vec<PebbleMove> {
    let h = shape.subtree_height(top);
    if h < 2 {
        return vec![PebbleMove::place(top)];
    }
    let small = TreeShape::new(shape.d, h);
    let mut map = vec![0; small.node_count() + 1];
    map[1] = top;
    for v in 1..small.first_leaf() {
        for (lc, gc) in small.children(v).zip(shape.children(map[v])) {
            map[lc] = gc;
        }
    }
    local
        .iter()
        .map(|mv| match mv.clone() {
            PebbleMove::DecreaseBlack { node, amount } => PebbleMove::DecreaseBlack { node: map[node], amount },
            PebbleMove::IncreaseWhite { node, amount } => PebbleMove::IncreaseWhite { node: map[node], amount },
            PebbleMove::Finish { node, black, white, decrease } => PebbleMove::Finish {
                node: map[node],
                black,
                white,
                decrease: decrease.into_iter().map(|(c, a)| (map[c], a)).collect(),
            },
            PebbleMove::WhiteSlide { node, child } => PebbleMove::WhiteSlide { node: map[node], child: map[child] },
        })
        .collect()
}
