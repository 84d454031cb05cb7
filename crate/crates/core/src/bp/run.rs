//! Executing a program on one input.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{BranchingProgram, State, StateId};
use crate::instance::TepInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunOutcome {
    Output(u32),
    /// No edge carries the queried value.
    Abort,
    /// A state repeated, so the computation never halts.
    Diverge,
}

/// Follows the first activated edge from each state.
pub fn run_deterministic(bp: &BranchingProgram, inst: &TepInstance) -> RunOutcome {
    run_path(bp, inst).0
}

/// The outcome together with the visited states.
pub(crate) fn run_path(bp: &BranchingProgram, inst: &TepInstance) -> (RunOutcome, Vec<StateId>) {
    let mut seen = vec![false; bp.states.len()];
    let mut path = Vec::new();
    let mut s = bp.start;
    loop {
        if seen[s] {
            return (RunOutcome::Diverge, path);
        }
        seen[s] = true;
        path.push(s);
        match &bp.states[s] {
            State::Final { output } => return (RunOutcome::Output(*output), path),
            State::Query { var, edges } => {
                let value = inst.var(*var);
                match edges.iter().find(|e| e.0 == value) {
                    Some(&(_, to)) => s = to,
                    None => return (RunOutcome::Abort, path),
                }
            }
        }
    }
}

/// States reachable from the start along activated edges.
pub(crate) fn forward_reachable(bp: &BranchingProgram, inst: &TepInstance) -> Vec<bool> {
    let mut seen = vec![false; bp.states.len()];
    let mut stack = vec![bp.start];
    seen[bp.start] = true;
    while let Some(s) = stack.pop() {
        if let State::Query { var, edges } = &bp.states[s] {
            let value = inst.var(*var);
            for &(label, to) in edges {
                if label == value && !seen[to] {
                    seen[to] = true;
                    stack.push(to);
                }
            }
        }
    }
    seen
}

/// Outputs of the final states reachable along activated edges.
pub fn reachable_finals(bp: &BranchingProgram, inst: &TepInstance) -> BTreeSet<u32> {
    forward_reachable(bp, inst)
        .iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .filter_map(|(s, _)| match bp.states[s] {
            State::Final { output } => Some(output),
            State::Query { .. } => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::tests::echo_leaf;
    use crate::instance::{ProblemKind, VarId};
    use crate::tree::TreeShape;

    #[test]
    fn single_final() {
        let shape = TreeShape::new(2, 2);
        let bp = BranchingProgram {
            shape,
            k: 1,
            kind: ProblemKind::Function,
            deterministic: true,
            start: 0,
            states: vec![State::Final { output: 1 }],
        };
        let inst = TepInstance::all_ones(shape, 1);
        assert_eq!(run_deterministic(&bp, &inst), RunOutcome::Output(1));
        assert_eq!(reachable_finals(&bp, &inst), BTreeSet::from([1]));
    }

    #[test]
    fn echo_and_cycle() {
        let bp = echo_leaf(2);
        let mut inst = TepInstance::all_ones(bp.shape, 2);
        inst.set_leaf(2, 2);
        assert_eq!(run_deterministic(&bp, &inst), RunOutcome::Output(2));
        let looping = BranchingProgram {
            states: vec![
                State::Query { var: VarId::Leaf { node: 2 }, edges: vec![(1, 1), (2, 1)] },
                State::Query { var: VarId::Leaf { node: 3 }, edges: vec![(1, 0), (2, 0)] },
                State::Final { output: 1 },
                State::Final { output: 2 },
            ],
            ..bp
        };
        assert_eq!(run_deterministic(&looping, &inst), RunOutcome::Diverge);
        assert!(reachable_finals(&looping, &inst).is_empty());
    }

    #[test]
    fn nondeterministic_guess() {
        // Guess the first leaf's value, then check it; only the right guess
        // survives.
        let shape = TreeShape::new(2, 2);
        let x2 = VarId::Leaf { node: 2 };
        let x3 = VarId::Leaf { node: 3 };
        let bp = BranchingProgram {
            shape,
            k: 2,
            kind: ProblemKind::Function,
            deterministic: false,
            start: 0,
            states: vec![
                State::Query { var: x3, edges: vec![(1, 1), (1, 2), (2, 1), (2, 2)] },
                State::Query { var: x2, edges: vec![(1, 3)] },
                State::Query { var: x2, edges: vec![(2, 4)] },
                State::Final { output: 1 },
                State::Final { output: 2 },
            ],
        };
        bp.validate().unwrap();
        let mut inst = TepInstance::all_ones(shape, 2);
        assert_eq!(reachable_finals(&bp, &inst), BTreeSet::from([1]));
        inst.set_leaf(2, 2);
        assert_eq!(reachable_finals(&bp, &inst), BTreeSet::from([2]));
    }
}
