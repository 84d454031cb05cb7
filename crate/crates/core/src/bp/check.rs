//! Correctness and thriftiness checks over exhaustive or sampled inputs.

use serde::Serialize;
use thiserror::Error;

use super::run::{forward_reachable, reachable_finals, run_path, RunOutcome};
use super::{BranchingProgram, State, StateId, VarLabel};
use crate::instance::{enumerate_instances, random_instance, InstanceError, InstanceJson, TepInstance, VarId};
use crate::instance::tuple_values;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every input; refuses if `k^m` exceeds `cap`.
    Exhaustive { cap: u128 },
    /// `samples` random inputs derived from `seed`.
    Sampled { samples: u64, seed: u64 },
}

impl CheckMode {
    pub fn exhaustive() -> Self {
        CheckMode::Exhaustive { cap: 1 << 24 }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Cap(#[from] InstanceError),
    #[error("growth series needs at least 3 points with increasing k and positive counts")]
    DegenerateSeries,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub instance: InstanceJson,
    pub expected: u32,
    /// Outputs of reachable final states.
    pub reached: Vec<u32>,
    /// Run outcome, for deterministic programs.
    pub outcome: Option<RunOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub inputs_checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThriftyViolation {
    pub instance: InstanceJson,
    pub state: StateId,
    pub var: VarId,
    /// Rendered variable, e.g. `f1(2,1)`.
    pub query: String,
    /// Correct values of the children of the queried node.
    pub children_values: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThriftyReport {
    pub inputs_checked: u64,
    pub violation: Option<ThriftyViolation>,
}

impl ThriftyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Calls `f` on every input selected by `mode` until it returns false.
/// Returns the number of inputs visited.
fn for_inputs(
    bp: &BranchingProgram,
    mode: CheckMode,
    mut f: impl FnMut(&TepInstance) -> bool,
) -> Result<u64, CheckError> {
    let mut count = 0;
    match mode {
        CheckMode::Exhaustive { cap } => {
            for inst in enumerate_instances(bp.shape, bp.k, cap)? {
                count += 1;
                if !f(&inst) {
                    break;
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            for i in 0..samples {
                count += 1;
                if !f(&random_instance(bp.shape, bp.k, seed.wrapping_add(i))) {
                    break;
                }
            }
        }
    }
    Ok(count)
}

/// A deterministic program must output `g(x)`; a nondeterministic one must
/// reach exactly the final labelled `g(x)` and no other.
pub fn check_correct(bp: &BranchingProgram, mode: CheckMode) -> Result<CheckReport, CheckError> {
    let mut counterexample = None;
    let inputs_checked = for_inputs(bp, mode, |inst| {
        let expected = inst.evaluate(bp.kind);
        let (ok, reached, outcome) = if bp.deterministic {
            let (outcome, _) = run_path(bp, inst);
            let reached = match outcome {
                RunOutcome::Output(r) => vec![r],
                _ => vec![],
            };
            (outcome == RunOutcome::Output(expected), reached, Some(outcome))
        } else {
            let reached: Vec<u32> = reachable_finals(bp, inst).into_iter().collect();
            (reached == [expected], reached, None)
        };
        if !ok {
            counterexample = Some(Counterexample { instance: inst.to_json(), expected, reached, outcome });
        }
        ok
    })?;
    Ok(CheckReport { inputs_checked, counterexample })
}

/// Every function query on a halting computation must be at the correct
/// child values. For nondeterministic programs these are exactly the states
/// reachable from the start and co-reachable to some final state in the
/// activated subgraph.
pub fn check_thrifty(bp: &BranchingProgram, mode: CheckMode) -> Result<ThriftyReport, CheckError> {
    let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); bp.states.len()];
    for (s, st) in bp.states.iter().enumerate() {
        if let State::Query { edges, .. } = st {
            for &(_, to) in edges {
                reverse[to].push(s);
            }
        }
    }
    for r in reverse.iter_mut() {
        r.dedup();
    }
    let mut violation = None;
    let inputs_checked = for_inputs(bp, mode, |inst| {
        let values = inst.node_values();
        let on_path: Vec<StateId> = if bp.deterministic {
            run_path(bp, inst).1
        } else {
            let fwd = forward_reachable(bp, inst);
            let back = co_reachable(bp, inst, &reverse);
            (0..bp.states.len()).filter(|&s| fwd[s] && back[s]).collect()
        };
        for s in on_path {
            if let State::Query { var: var @ VarId::Func { node, tuple }, .. } = bp.states[s] {
                let children = inst.child_values(&values, node);
                if tuple_values(tuple, bp.shape.d, bp.k) != children {
                    violation = Some(ThriftyViolation {
                        instance: inst.to_json(),
                        state: s,
                        var,
                        query: VarLabel { var, d: bp.shape.d, k: bp.k }.to_string(),
                        children_values: children,
                    });
                    return false;
                }
            }
        }
        true
    })?;
    Ok(ThriftyReport { inputs_checked, violation })
}

fn co_reachable(bp: &BranchingProgram, inst: &TepInstance, reverse: &[Vec<StateId>]) -> Vec<bool> {
    let mut seen = vec![false; bp.states.len()];
    let mut stack: Vec<StateId> =
        (0..bp.states.len()).filter(|&s| matches!(bp.states[s], State::Final { .. })).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(t) = stack.pop() {
        for &s in &reverse[t] {
            if seen[s] {
                continue;
            }
            let State::Query { var, edges } = &bp.states[s] else { continue };
            let value = inst.var(*var);
            if edges.iter().any(|&(label, to)| to == t && label == value) {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// Least-squares slope of `ln(states)` against `ln(k)`.
pub fn growth_exponent(series: &[(usize, usize)]) -> Result<f64, CheckError> {
    if series.len() < 3
        || series.windows(2).any(|w| w[0].0 >= w[1].0)
        || series.iter().any(|&(k, s)| k == 0 || s == 0)
    {
        return Err(CheckError::DegenerateSeries);
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|&(k, s)| ((k as f64).ln(), (s as f64).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::tests::echo_leaf;
    use crate::instance::ProblemKind;
    use crate::tree::TreeShape;

    /// Correct program for the height-2 binary tree: read both leaves and
    /// then the root table entry.
    pub fn height2(k: usize) -> BranchingProgram {
        let shape = TreeShape::new(2, 2);
        let mut states = Vec::new();
        let leaf3 = |a: u32| 1 + (a as usize - 1);
        states.push(State::Query { var: VarId::Leaf { node: 2 }, edges: (1..=k as u32).map(|a| (a, leaf3(a))).collect() });
        let f_base = 1 + k;
        for a in 1..=k as u32 {
            let edges = (1..=k as u32).map(|b| (b, f_base + (a as usize - 1) * k + (b as usize - 1))).collect();
            states.push(State::Query { var: VarId::Leaf { node: 3 }, edges });
        }
        let fin = 1 + k + k * k;
        for a in 1..=k as u32 {
            for b in 1..=k as u32 {
                let edges = (1..=k as u32).map(|r| (r, fin + r as usize - 1)).collect();
                states.push(State::Query { var: VarId::func(1, &[a, b], k), edges });
            }
        }
        states.extend((1..=k as u32).map(|output| State::Final { output }));
        BranchingProgram { shape, k, kind: ProblemKind::Function, deterministic: true, start: 0, states }
    }

    #[test]
    fn correct_program_passes() {
        let bp = height2(2);
        bp.validate().unwrap();
        let r = check_correct(&bp, CheckMode::exhaustive()).unwrap();
        assert!(r.passed());
        assert_eq!(r.inputs_checked, 64);
        assert!(check_thrifty(&bp, CheckMode::exhaustive()).unwrap().passed());
        let r = check_correct(&bp, CheckMode::Sampled { samples: 100, seed: 7 }).unwrap();
        assert_eq!(r.inputs_checked, 100);
    }

    #[test]
    fn swapped_final_is_caught() {
        let mut bp = height2(2);
        let n = bp.states.len();
        bp.states.swap(n - 1, n - 2);
        let r = check_correct(&bp, CheckMode::exhaustive()).unwrap();
        let ce = r.counterexample.expect("mutation detected");
        let inst = TepInstance::from_json(&ce.instance).unwrap();
        assert_eq!(inst.evaluate(ProblemKind::Function), ce.expected);
        assert_ne!(ce.reached, vec![ce.expected]);
    }

    #[test]
    fn leaf_echo_is_wrong_but_thrifty() {
        let bp = echo_leaf(2);
        assert!(!check_correct(&bp, CheckMode::exhaustive()).unwrap().passed());
        assert!(check_thrifty(&bp, CheckMode::exhaustive()).unwrap().passed());
    }

    #[test]
    fn eager_query_is_not_thrifty() {
        let mut bp = height2(2);
        // Start by querying f1(1,1) regardless of the leaves.
        let old_start = bp.start;
        bp.states.push(State::Query { var: VarId::func(1, &[1, 1], 2), edges: vec![(1, old_start), (2, old_start)] });
        bp.start = bp.states.len() - 1;
        let r = check_thrifty(&bp, CheckMode::exhaustive()).unwrap();
        let v = r.violation.expect("violation");
        assert_eq!(v.query, "f1(1,1)");
        assert_ne!(v.children_values, vec![1, 1]);
        assert!(check_correct(&bp, CheckMode::exhaustive()).unwrap().passed());
    }

    #[test]
    fn exhaustive_cap() {
        let bp = height2(2);
        assert!(matches!(check_correct(&bp, CheckMode::Exhaustive { cap: 10 }), Err(CheckError::Cap(_))));
    }

    #[test]
    fn exponents() {
        assert!((growth_exponent(&[(2, 8), (4, 64), (8, 512)]).unwrap() - 3.0).abs() < 1e-12);
        assert!(growth_exponent(&[(2, 8), (4, 64)]).is_err());
        assert!(growth_exponent(&[(4, 8), (2, 64), (8, 1)]).is_err());
    }
}
