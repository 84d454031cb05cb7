//! k-way branching programs over tree evaluation inputs.

pub mod check;
pub mod dot;
pub mod run;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{tuple_values, ProblemKind, VarId};
use crate::tree::{NodeId, TreeShape};

pub use check::{
    check_correct, check_thrifty, growth_exponent, CheckError, CheckMode, CheckReport, Counterexample,
    ThriftyReport, ThriftyViolation,
};
pub use dot::{export_dot, parse_dot};
pub use run::{reachable_finals, run_deterministic, RunOutcome};

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum State {
    /// Reads `var` and follows an edge carrying its value.
    Query { var: VarId, edges: Vec<(u32, StateId)> },
    Final { output: u32 },
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum BpError {
    #[error("state {0} does not exist")]
    MissingState(StateId),
    #[error("state {state}: edge label {label} outside 1..={k}")]
    BadLabel { state: StateId, label: u32, k: usize },
    #[error("deterministic state {0} must have exactly one edge per value")]
    NotDeterministic(StateId),
    #[error("variable {0:?} does not belong to the tree")]
    BadVariable(VarId),
    #[error("final states must be labelled exactly once by each output in {0:?}")]
    BadFinals(Vec<u32>),
    #[error("{0}")]
    Parse(String),
}

/// A directed multigraph of states; cycles are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchingProgram {
    pub shape: TreeShape,
    pub k: usize,
    pub kind: ProblemKind,
    pub deterministic: bool,
    pub start: StateId,
    pub states: Vec<State>,
}

/// Output range of a problem: `1..=k` for the function problem, `{0, 1}`
/// for the Boolean one.
pub fn output_range(kind: ProblemKind, k: usize) -> Vec<u32> {
    match kind {
        ProblemKind::Function => (1..=k as u32).collect(),
        ProblemKind::Boolean => vec![0, 1],
    }
}

impl BranchingProgram {
    /// Checks edge labels, determinism, variables and the final states.
    pub fn validate(&self) -> Result<(), BpError> {
        let n = self.states.len();
        if self.start >= n {
            return Err(BpError::MissingState(self.start));
        }
        let mut outputs = Vec::new();
        for (id, st) in self.states.iter().enumerate() {
            match st {
                State::Final { output } => outputs.push(*output),
                State::Query { var, edges } => {
                    self.check_var(*var)?;
                    for &(label, to) in edges {
                        if label == 0 || label as usize > self.k {
                            return Err(BpError::BadLabel { state: id, label, k: self.k });
                        }
                        if to >= n {
                            return Err(BpError::MissingState(to));
                        }
                    }
                    if self.deterministic {
                        let mut labels: Vec<u32> = edges.iter().map(|e| e.0).collect();
                        labels.sort_unstable();
                        if labels != (1..=self.k as u32).collect::<Vec<_>>() {
                            return Err(BpError::NotDeterministic(id));
                        }
                    }
                }
            }
        }
        outputs.sort_unstable();
        let range = output_range(self.kind, self.k);
        if outputs != range {
            return Err(BpError::BadFinals(range));
        }
        Ok(())
    }

    fn check_var(&self, var: VarId) -> Result<(), BpError> {
        let ok = match var {
            VarId::Leaf { node } => self.shape.contains(node) && self.shape.is_leaf(node),
            VarId::Func { node, tuple } => {
                self.shape.contains(node) && !self.shape.is_leaf(node) && tuple < self.k.pow(self.shape.d as u32)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(BpError::BadVariable(var))
        }
    }

    /// Size: the number of states, finals included.
    pub fn size(&self) -> usize {
        self.states.len()
    }

    pub fn final_state(&self, output: u32) -> Option<StateId> {
        self.states.iter().position(|s| *s == State::Final { output })
    }

    pub fn metrics(&self) -> BpMetrics {
        let mut per_node = BTreeMap::new();
        let mut edges = 0;
        let mut finals = 0;
        for st in &self.states {
            match st {
                State::Query { var, edges: e } => {
                    *per_node.entry(var.node()).or_insert(0) += 1;
                    edges += e.len();
                }
                State::Final { .. } => finals += 1,
            }
        }
        BpMetrics { states: self.states.len(), finals, edges, queries_per_node: per_node }
    }

    /// Boolean program obtained by relabelling output `1` as true and every
    /// other output as false, then merging finals with equal labels.
    pub fn merge_finals_to_boolean(&self) -> BranchingProgram {
        let mut remap = vec![0; self.states.len()];
        let mut states = Vec::with_capacity(self.states.len());
        let mut finals: [Option<StateId>; 2] = [None, None];
        for (id, st) in self.states.iter().enumerate() {
            match st {
                State::Final { output } => {
                    let b = u32::from(*output == 1);
                    let slot = &mut finals[b as usize];
                    remap[id] = *slot.get_or_insert_with(|| {
                        states.push(State::Final { output: b });
                        states.len() - 1
                    });
                }
                q @ State::Query { .. } => {
                    remap[id] = states.len();
                    states.push(q.clone());
                }
            }
        }
        for b in 0..2u32 {
            if finals[b as usize].is_none() {
                states.push(State::Final { output: b });
            }
        }
        for st in states.iter_mut() {
            if let State::Query { edges, .. } = st {
                for e in edges.iter_mut() {
                    e.1 = remap[e.1];
                }
            }
        }
        BranchingProgram {
            shape: self.shape,
            k: self.k,
            kind: ProblemKind::Boolean,
            deterministic: self.deterministic,
            start: remap[self.start],
            states,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, BpError> {
        let bp: BranchingProgram = serde_json::from_str(text).map_err(|e| BpError::Parse(e.to_string()))?;
        bp.validate()?;
        Ok(bp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BpMetrics {
    pub states: usize,
    pub finals: usize,
    pub edges: usize,
    /// Number of query states reading a variable of each node.
    pub queries_per_node: BTreeMap<NodeId, usize>,
}

/// Human-readable variable name: `x5` for a leaf, `f2(1,3)` for a table
/// entry.
pub struct VarLabel {
    pub var: VarId,
    pub d: usize,
    pub k: usize,
}

impl fmt::Display for VarLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.var {
            VarId::Leaf { node } => write!(f, "x{node}"),
            VarId::Func { node, tuple } => {
                let args: Vec<String> = tuple_values(tuple, self.d, self.k).iter().map(u32::to_string).collect();
                write!(f, "f{node}({})", args.join(","))
            }
        }
    }
}
