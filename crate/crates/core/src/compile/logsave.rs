//! A deterministic Boolean program that saves a log factor by not being
//! thrifty.
//!
//! Let `c_1 = 2, ..., c_d` be the root's children. The program
//!
//! 1. computes `v(c_1)` and keeps only its block `(v - 1) / m`;
//! 2. computes `v(c_2), ..., v(c_d)`;
//! 3. queries `f_1(a, v(c_2), ...)` for every `a` in the block, recording
//!    which answers are 1 in an `m`-bit mask (an empty mask rejects);
//! 4. recomputes `v(c_1)` and accepts iff its bit in the mask is set.
//!
//! Children are evaluated with the recursive black pebbling of their
//! subtrees.

use super::black::output;
use super::{build_program, subtree_moves, CompilationReport, CompileError, Node, SlotSchedule};
use crate::bp::BranchingProgram;
use crate::instance::{ProblemKind, VarId};
use crate::pebbling::strategies::{black_cost, strategy_black};
use crate::tree::{NodeId, TreeShape};

/// `ceil(log2 k^(d-1) - log2 log2 k^(d-1))`, clamped to `1..=k`.
pub fn default_block_size(d: usize, k: usize) -> usize {
    let x = (d - 1) as f64 * (k as f64).log2();
    let m = if x > 1.0 { (x - x.log2()).ceil() } else { 1.0 };
    (m.max(1.0) as usize).min(k)
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    One { t: usize, slots: Vec<u32> },
    Two { j: usize, t: usize, slots: Vec<u32>, block: u32, vals: Vec<u32> },
    Three { a: u32, block: u32, vals: Vec<u32>, mask: u32 },
    Four { t: usize, slots: Vec<u32>, mask: u32 },
    Out(u32),
}

impl Key {
    fn phase(&self) -> Option<usize> {
        match self {
            Key::One { .. } => Some(0),
            Key::Two { .. } => Some(1),
            Key::Three { .. } => Some(2),
            Key::Four { .. } => Some(3),
            Key::Out(_) => None,
        }
    }
}

pub fn compile_boolean_logsave(
    d: usize,
    h: usize,
    k: usize,
    m: usize,
) -> Result<(BranchingProgram, CompilationReport), CompileError> {
    if k < 2 {
        return Err(CompileError::AlphabetTooSmall);
    }
    if m == 0 || m > k {
        return Err(CompileError::InvalidBlockSize { m, k });
    }
    let shape = TreeShape::new(d, h);
    let local = if h > 2 { strategy_black(d, h - 1) } else { Vec::new() };
    let children: Vec<NodeId> = shape.children(1).collect();
    let schedules: Vec<SlotSchedule> = children
        .iter()
        .map(|&c| SlotSchedule::new(shape, &subtree_moves(shape, c, &local), c))
        .collect::<Result<_, _>>()?;
    let fresh = |i: usize| vec![1u32; schedules[i].slots];
    let m32 = m as u32;
    let k32 = k as u32;

    // Continuation once the schedule of child `i` has produced `r`.
    let after_one = |r: u32| Key::Two { j: 0, t: 0, slots: fresh(1), block: (r - 1) / m32, vals: vec![] };
    let after_two = |j: usize, block: u32, vals: &[u32], r: u32| {
        let mut vals = vals.to_vec();
        vals.push(r);
        if j + 2 < d {
            Key::Two { j: j + 1, t: 0, slots: fresh(j + 2), block, vals }
        } else {
            Key::Three { a: 0, block, vals, mask: 0 }
        }
    };
    let after_three = |a: u32, block: u32, vals: &[u32], mask: u32| {
        let next = a + 1;
        if next < m32 && block * m32 + next < k32 {
            Key::Three { a: next, block, vals: vals.to_vec(), mask }
        } else if mask == 0 {
            Key::Out(0)
        } else {
            Key::Four { t: 0, slots: fresh(0), mask }
        }
    };

    let step = |i: usize, t: usize, slots: &[u32], done: &dyn Fn(u32) -> Key, cont: &dyn Fn(Vec<u32>) -> Key| {
        let s = &schedules[i];
        let last = t + 1 == s.queries.len();
        let edges = (1..=k32)
            .map(|r| (r, if last { done(r) } else { cont(s.advance(t, slots, r)) }))
            .collect();
        Node::Query { var: s.var(shape, k, t, slots), edges }
    };

    let start = Key::One { t: 0, slots: fresh(0) };
    let (bp, keys) = build_program(shape, k, ProblemKind::Boolean, true, start, |key| match key {
        Key::Out(r) => Node::Final(*r),
        Key::One { t, slots } => {
            step(0, *t, slots, &after_one, &|s| Key::One { t: t + 1, slots: s })
        }
        Key::Two { j, t, slots, block, vals } => step(
            j + 1,
            *t,
            slots,
            &|r| after_two(*j, *block, vals, r),
            &|s| Key::Two { j: *j, t: t + 1, slots: s, block: *block, vals: vals.clone() },
        ),
        Key::Three { a, block, vals, mask } => {
            let mut args = vec![block * m32 + a + 1];
            args.extend(vals);
            let edges = (1..=k32)
                .map(|r| (r, after_three(*a, *block, vals, mask | (u32::from(r == 1) << a))))
                .collect();
            Node::Query { var: VarId::func(1, &args, k), edges }
        }
        Key::Four { t, slots, mask } => step(
            0,
            *t,
            slots,
            &|r| Key::Out(output(ProblemKind::Boolean, if (mask >> ((r - 1) % m32)) & 1 == 1 { 1 } else { 2 })),
            &|s| Key::Four { t: t + 1, slots: s, mask: *mask },
        ),
    });
    let mut phases = [0usize; 4];
    for p in keys.iter().filter_map(Key::phase) {
        phases[p] += 1;
    }
    let report = CompilationReport {
        compiler: "boolean-logsave".into(),
        source_cost: if h > 2 { black_cost(d, h - 1).to_string() } else { "1".into() },
        k,
        states: bp.size(),
        states_per_step: phases.to_vec(),
        bits_per_config: None,
        bit_bound: None,
        phase_states: Some(phases),
    };
    Ok((bp, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{check_correct, check_thrifty, run_deterministic, CheckMode, RunOutcome};
    use crate::instance::random_instance;

    #[test]
    fn block_sizes() {
        assert_eq!(default_block_size(2, 2), 1);
        assert_eq!(default_block_size(2, 4), 1);
        assert_eq!(default_block_size(2, 16), 2);
        assert_eq!(default_block_size(3, 16), 5);
        assert_eq!(default_block_size(2, 256), 5);
    }

    #[test]
    fn height2_exhaustive() {
        for m in 1..=2 {
            let (bp, _) = compile_boolean_logsave(2, 2, 2, m).unwrap();
            bp.validate().unwrap();
            assert!(check_correct(&bp, CheckMode::exhaustive()).unwrap().passed(), "m={m}");
        }
    }

    #[test]
    fn sampled_runs() {
        for (d, h, k, m) in [(2, 3, 3, 2), (2, 3, 4, 3), (3, 3, 2, 2), (2, 4, 2, 2)] {
            let (bp, report) = compile_boolean_logsave(d, h, k, m).unwrap();
            assert_eq!(report.phase_states.unwrap().iter().sum::<usize>() + 2, bp.size());
            for seed in 0..200 {
                let inst = random_instance(bp.shape, k, seed);
                assert_eq!(run_deterministic(&bp, &inst), RunOutcome::Output(inst.evaluate(ProblemKind::Boolean)));
            }
        }
    }

    #[test]
    fn wide_blocks_are_not_thrifty() {
        let (bp, _) = compile_boolean_logsave(2, 3, 3, 3).unwrap();
        let r = check_thrifty(&bp, CheckMode::Sampled { samples: 200, seed: 1 }).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn bad_block() {
        assert_eq!(compile_boolean_logsave(2, 3, 2, 3).unwrap_err(), CompileError::InvalidBlockSize { m: 3, k: 2 });
        assert!(compile_boolean_logsave(2, 3, 2, 0).is_err());
    }
}
