//! Deterministic thrifty programs from black pebblings.
//!
//! Each pebble is a slot holding the value of the node it sits on; a slot
//! whose pebble is off the tree holds 1. A state is a query step together
//! with the contents of all slots, so a configuration with `p` pebbles has
//! at most `k^p` states.

use super::{build_program, CompilationReport, CompileError, Node, SlotSchedule};
use crate::bp::BranchingProgram;
use crate::instance::ProblemKind;
use crate::pebbling::strategies::strategy_black;
use crate::pebbling::{validate_sequence, GameVariant, PebbleDag, PebbleMove};
use crate::tree::TreeShape;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    Step(usize, Vec<u32>),
    Out(u32),
}

/// Final label for the root value `r`.
pub(crate) fn output(kind: ProblemKind, r: u32) -> u32 {
    match kind {
        ProblemKind::Function => r,
        ProblemKind::Boolean => u32::from(r == 1),
    }
}

pub fn compile_black_det(
    shape: TreeShape,
    moves: &[PebbleMove],
    k: usize,
    kind: ProblemKind,
) -> Result<(BranchingProgram, CompilationReport), CompileError> {
    if k < 2 {
        return Err(CompileError::AlphabetTooSmall);
    }
    let cost = validate_sequence(&PebbleDag::from_tree(shape), moves, GameVariant::Black)?.cost;
    let schedule = SlotSchedule::new(shape, moves, 1)?;
    let last = schedule.queries.len() - 1;
    let start = Key::Step(0, vec![1u32; schedule.slots]);
    let (bp, keys) = build_program(shape, k, kind, true, start, |key| match key {
        Key::Out(r) => Node::Final(*r),
        Key::Step(t, slots) => {
            let edges = (1..=k as u32)
                .map(|r| {
                    let next = if *t == last {
                        Key::Out(output(kind, r))
                    } else {
                        Key::Step(t + 1, schedule.advance(*t, slots, r))
                    };
                    (r, next)
                })
                .collect();
            Node::Query { var: schedule.var(shape, k, *t, slots), edges }
        }
    });
    let mut per_step = vec![0; schedule.queries.len()];
    for key in &keys {
        if let Key::Step(t, _) = key {
            per_step[*t] += 1;
        }
    }
    let report = CompilationReport {
        compiler: "black-det".into(),
        source_cost: cost.to_string(),
        k,
        states: bp.size(),
        states_per_step: per_step,
        bits_per_config: None,
        bit_bound: None,
        phase_states: None,
    };
    Ok((bp, report))
}

/// [`compile_black_det`] applied to the recursive black strategy.
pub fn compile_black_default(
    d: usize,
    h: usize,
    k: usize,
    kind: ProblemKind,
) -> Result<(BranchingProgram, CompilationReport), CompileError> {
    compile_black_det(TreeShape::new(d, h), &strategy_black(d, h), k, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{check_correct, check_thrifty, run_deterministic, CheckMode, RunOutcome, State};
    use crate::instance::random_instance;

    #[test]
    fn height2_exhaustive() {
        let (bp, report) = compile_black_default(2, 2, 2, ProblemKind::Function).unwrap();
        bp.validate().unwrap();
        assert_eq!(report.states, bp.size());
        let r = check_correct(&bp, CheckMode::exhaustive()).unwrap();
        assert!(r.passed());
        assert_eq!(r.inputs_checked, 64);
        assert!(check_thrifty(&bp, CheckMode::exhaustive()).unwrap().passed());
    }

    #[test]
    fn seeded_runs_match_evaluator() {
        for kind in [ProblemKind::Function, ProblemKind::Boolean] {
            let (bp, _) = compile_black_default(3, 3, 3, kind).unwrap();
            for seed in 0..50 {
                let inst = random_instance(bp.shape, 3, seed);
                assert_eq!(run_deterministic(&bp, &inst), RunOutcome::Output(inst.evaluate(kind)));
            }
        }
    }

    #[test]
    fn start_state_reads_first_leaf_with_all_slots_one() {
        let (bp, report) = compile_black_default(2, 3, 3, ProblemKind::Function).unwrap();
        assert_eq!(report.states_per_step[0], 1);
        assert!(matches!(bp.states[bp.start], State::Query { var: crate::instance::VarId::Leaf { node: 4 }, .. }));
    }

    #[test]
    fn state_count_bound() {
        // at most (#queries) * k^p + |R| states
        for k in 2..=4 {
            let (bp, report) = compile_black_default(2, 3, k, ProblemKind::Function).unwrap();
            assert!(bp.size() <= report.states_per_step.len() * k.pow(3) + k);
        }
    }

    #[test]
    fn rejects_non_black_input() {
        let shape = TreeShape::new(2, 2);
        let moves = crate::pebbling::strategies::strategy_bw(2, 2);
        assert!(compile_black_det(shape, &moves, 2, ProblemKind::Function).is_ok());
        let frac = crate::pebbling::strategies::strategy_fractional(2, 3);
        assert!(matches!(
            compile_black_det(TreeShape::new(2, 3), &frac, 2, ProblemKind::Function),
            Err(CompileError::InvalidSequence(_))
        ));
    }
}
