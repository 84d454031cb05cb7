//! Nondeterministic thrifty programs from fractional pebblings.
//!
//! Values are written with `L = ceil(log2 k)` bits (of `v - 1`). A node
//! with black weight `b` stores the top `ceil(b L)` bits of its value, which
//! were read from the input; a white weight `w` stores the bottom
//! `ceil(w L)` bits, which were guessed. Whenever guessed bits are dropped
//! the node's function is queried and the computation aborts unless the
//! guess was right.

use num_traits::One;

use super::black::output;
use super::{build_program, CompilationReport, CompileError, Node};
use crate::bp::BranchingProgram;
use crate::instance::{ProblemKind, VarId};
use crate::pebbling::sequence::trace;
use crate::pebbling::strategies::strategy_fractional;
use crate::pebbling::{validate_sequence, GameVariant, PebbleDag, PebbleMove, Weight};
use crate::tree::{NodeId, TreeShape};

/// `ceil(x * bits)` for a weight in `[0, 1]`.
fn width(x: Weight, bits: u32) -> u32 {
    let scaled = x * Weight::from_integer(bits as i64);
    scaled.ceil().to_integer() as u32
}

#[derive(Clone, Copy, Debug)]
struct Widths {
    verified: u32,
    guessed: u32,
}

#[derive(Clone, Debug)]
enum Step {
    /// Nothing to read or guess; only widths change.
    Silent,
    /// Guess bits `from..to` of the node's low part.
    Guess { node: NodeId, from: u32, to: u32 },
    /// Read the node's value and verify its guessed bits.
    Read { node: NodeId },
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Key {
    /// Before step `t`: verified and guessed bits per node, then the root
    /// flag (0 unknown, 1 false, 2 true).
    At(usize, Vec<u32>, u8),
    Out(u32),
}

struct Compiler {
    shape: TreeShape,
    k: usize,
    bits: u32,
    n: usize,
    /// Widths after each prefix of the sequence.
    widths: Vec<Vec<Widths>>,
    steps: Vec<Step>,
    /// Index of the first non-silent step at or after each index.
    next_active: Vec<usize>,
    root_black_at: Vec<bool>,
}

impl Compiler {
    fn mask(w: u32) -> u32 {
        if w >= 32 {
            u32::MAX
        } else {
            (1 << w) - 1
        }
    }

    /// Full value `v - 1` of a node whose bits cover all `L` positions, or
    /// `None` if the stored parts disagree or exceed `k`.
    fn full_value(&self, t: usize, node: NodeId, data: &[u32]) -> Option<u32> {
        let wd = self.widths[t][node];
        let (ver, guess) = (data[2 * node], data[2 * node + 1]);
        let low_len = self.bits - wd.verified;
        debug_assert!(wd.guessed >= low_len);
        let value = (ver << low_len) | (guess & Self::mask(low_len));
        // where guessed and verified bits overlap they must agree
        if value & Self::mask(wd.guessed) != guess {
            return None;
        }
        (value < self.k as u32).then_some(value)
    }

    /// Whether some value in `[k]` agrees with the stored bits.
    fn consistent(&self, w: Widths, ver: u32, guess: u32) -> bool {
        (0..self.k as u32).any(|v| {
            v >> (self.bits - w.verified) == ver && v & Self::mask(w.guessed) == guess
        })
    }

    /// Applies the width changes of step `t` to `data` (silent parts only).
    fn shrink(&self, t: usize, data: &mut [u32]) {
        for v in 1..=self.n {
            let (a, b) = (self.widths[t][v], self.widths[t + 1][v]);
            if b.verified < a.verified {
                data[2 * v] >>= a.verified - b.verified;
            }
            if b.guessed < a.guessed {
                data[2 * v + 1] &= Self::mask(b.guessed);
            }
        }
    }

    /// Root flag after step `t` given the data after it.
    fn flag_after(&self, t: usize, data: &[u32], flag: u8) -> u8 {
        if flag == 0 && self.root_black_at[t + 1] {
            // the root's verified part is its whole value
            let v = data[2];
            return if v == 0 { 2 } else { 1 };
        }
        flag
    }

    /// Runs silent steps from `t` and returns the next key.
    fn settle(&self, mut t: usize, mut data: Vec<u32>, mut flag: u8, kind: ProblemKind) -> Key {
        while t < self.steps.len() && matches!(self.steps[t], Step::Silent) {
            self.shrink(t, &mut data);
            flag = self.flag_after(t, &data, flag);
            t += 1;
        }
        if t == self.steps.len() {
            debug_assert!(flag != 0);
            return Key::Out(output(kind, if flag == 2 { 1 } else { 2 }));
        }
        Key::At(t, data, flag)
    }

    fn expand(&self, key: &Key, kind: ProblemKind) -> Node<Key> {
        let (t, data, flag) = match key {
            Key::Out(r) => return Node::Final(*r),
            Key::At(t, data, flag) => (*t, data, *flag),
        };
        match self.steps[t] {
            Step::Silent => unreachable!("settled keys start at active steps"),
            Step::Guess { node, from, to } => {
                let after = self.widths[t + 1][node];
                let mut targets = Vec::new();
                for g in 0..(1u32 << (to - from)) {
                    let mut next = data.clone();
                    next[2 * node + 1] |= g << from;
                    if !self.consistent(after, next[2 * node], next[2 * node + 1]) {
                        continue;
                    }
                    self.shrink(t, &mut next);
                    let f = self.flag_after(t, &next, flag);
                    targets.push(self.settle(t + 1, next, f, kind));
                }
                let var = VarId::Leaf { node: self.shape.first_leaf() };
                let edges = (1..=self.k as u32)
                    .flat_map(|label| targets.iter().map(move |key| (label, key.clone())))
                    .collect();
                Node::Query { var, edges }
            }
            Step::Read { node } => {
                let var = if self.shape.is_leaf(node) {
                    VarId::Leaf { node }
                } else {
                    let mut args = Vec::with_capacity(self.shape.d);
                    for c in self.shape.children(node) {
                        match self.full_value(t, c, data) {
                            Some(v) => args.push(v + 1),
                            None => return Node::Query { var: VarId::Leaf { node: self.shape.first_leaf() }, edges: vec![] },
                        }
                    }
                    VarId::func(node, &args, self.k)
                };
                let (before, after) = (self.widths[t][node], self.widths[t + 1][node]);
                let mut edges = Vec::new();
                for r in 1..=self.k as u32 {
                    let v = r - 1;
                    if before.guessed > 0 && v & Self::mask(before.guessed) != data[2 * node + 1] {
                        continue;
                    }
                    let mut next = data.clone();
                    self.shrink(t, &mut next);
                    next[2 * node] = if after.verified == 0 { 0 } else { v >> (self.bits - after.verified) };
                    next[2 * node + 1] = v & Self::mask(after.guessed);
                    if after.guessed == 0 {
                        next[2 * node + 1] = 0;
                    }
                    let f = self.flag_after(t, &next, flag);
                    edges.push((r, self.settle(t + 1, next, f, kind)));
                }
                Node::Query { var, edges }
            }
        }
    }
}

/// Compiles a fractional pebbling of `shape` into a nondeterministic
/// program for the Boolean problem.
pub fn compile_fractional_nondet(
    shape: TreeShape,
    moves: &[PebbleMove],
    k: usize,
) -> Result<(BranchingProgram, CompilationReport), CompileError> {
    if k < 2 {
        return Err(CompileError::AlphabetTooSmall);
    }
    let dag = PebbleDag::from_tree(shape);
    let cost = validate_sequence(&dag, moves, GameVariant::Fractional)?.cost;
    let configs = trace(&dag, moves, GameVariant::Fractional)?;
    let bits = usize::BITS - (k - 1).leading_zeros();
    let n = shape.node_count();
    let widths: Vec<Vec<Widths>> = configs
        .iter()
        .map(|c| {
            (0..=n)
                .map(|v| {
                    if v == 0 {
                        Widths { verified: 0, guessed: 0 }
                    } else {
                        Widths { verified: width(c.black(v), bits), guessed: width(c.white(v), bits) }
                    }
                })
                .collect()
        })
        .collect();
    let steps: Vec<Step> = moves
        .iter()
        .enumerate()
        .map(|(t, mv)| {
            let node = mv.node();
            let (a, b) = (widths[t][node], widths[t + 1][node]);
            match mv {
                PebbleMove::IncreaseWhite { .. } if b.guessed > a.guessed => {
                    Step::Guess { node, from: a.guessed, to: b.guessed }
                }
                PebbleMove::Finish { .. } if b.verified > a.verified || b.guessed < a.guessed => Step::Read { node },
                _ => Step::Silent,
            }
        })
        .collect();
    let mut next_active = vec![steps.len(); steps.len() + 1];
    for t in (0..steps.len()).rev() {
        next_active[t] = if matches!(steps[t], Step::Silent) { next_active[t + 1] } else { t };
    }
    let root_black_at = configs.iter().map(|c| c.black(1) == Weight::one()).collect();
    let compiler = Compiler { shape, k, bits, n, widths, steps, next_active, root_black_at };
    let start = compiler.settle(0, vec![0; 2 * (n + 1)], 0, ProblemKind::Boolean);
    let (bp, keys) = build_program(shape, k, ProblemKind::Boolean, false, start, |key| {
        compiler.expand(key, ProblemKind::Boolean)
    });
    let mut per_step = vec![0; compiler.steps.len()];
    for key in &keys {
        if let Key::At(t, _, _) = key {
            per_step[*t] += 1;
        }
    }
    let per_step: Vec<usize> = per_step
        .into_iter()
        .enumerate()
        .filter(|&(t, _)| compiler.next_active[t] == t)
        .map(|(_, c)| c)
        .collect();
    let bits_per_config: Vec<u32> = compiler
        .widths
        .iter()
        .map(|w| w.iter().map(|x| x.verified + x.guessed).sum())
        .collect();
    let p = *cost.numer() as f64 / *cost.denom() as f64;
    let report = CompilationReport {
        compiler: "fractional-nondet".into(),
        source_cost: cost.to_string(),
        k,
        states: bp.size(),
        states_per_step: per_step,
        bits_per_config: Some(bits_per_config),
        bit_bound: Some(p * (k as f64).log2() + 2.0 * n as f64),
        phase_states: None,
    };
    Ok((bp, report))
}

/// [`compile_fractional_nondet`] applied to the fractional strategy.
pub fn compile_fractional_default(
    d: usize,
    h: usize,
    k: usize,
) -> Result<(BranchingProgram, CompilationReport), CompileError> {
    compile_fractional_nondet(TreeShape::new(d, h), &strategy_fractional(d, h), k)
}
