//! Explicit pebbling strategies for complete trees.
//!
//! Each builder replays its own moves through [`apply_move`] as it goes, so
//! a strategy that ever produced an illegal move would panic immediately.

use num_traits::{One, Zero};

use super::dag::PebbleDag;
use super::moves::{apply_move_mut, GameVariant, PebbleConfig, PebbleMove};
use super::sequence::parse_sequence;
use super::{w, Weight};
use crate::tree::{NodeId, TreeShape};

struct Builder {
    shape: TreeShape,
    dag: PebbleDag,
    variant: GameVariant,
    config: PebbleConfig,
    moves: Vec<PebbleMove>,
}

impl Builder {
    fn new(d: usize, h: usize, variant: GameVariant) -> Self {
        let shape = TreeShape::new(d, h);
        let dag = PebbleDag::from_tree(shape);
        let config = PebbleConfig::empty(dag.node_count());
        Builder { shape, dag, variant, config, moves: Vec::new() }
    }

    fn push(&mut self, mv: PebbleMove) {
        apply_move_mut(&self.dag, &mut self.config, &mv, self.variant)
            .unwrap_or_else(|e| panic!("strategy produced `{mv}`: {e}"));
        self.moves.push(mv);
    }

    fn children(&self, v: NodeId) -> Vec<NodeId> {
        self.shape.children(v).collect()
    }

    fn height(&self, v: NodeId) -> usize {
        self.shape.subtree_height(v)
    }

    fn finish(&mut self, v: NodeId, black: Weight, decrease: Vec<(NodeId, Weight)>) {
        self.push(PebbleMove::Finish { node: v, black, white: Weight::zero(), decrease });
    }

    fn white(&mut self, v: NodeId, amount: Weight) {
        self.push(PebbleMove::IncreaseWhite { node: v, amount });
    }

    fn decb(&mut self, v: NodeId, amount: Weight) {
        self.push(PebbleMove::DecreaseBlack { node: v, amount });
    }

    fn place_leaves(&mut self, v: NodeId) {
        for c in self.children(v) {
            self.push(PebbleMove::place(c));
        }
    }

    fn finish_sliding_all(&mut self, v: NodeId, black: Weight) {
        let dec = self.children(v).into_iter().map(|c| (c, Weight::one())).collect();
        self.finish(v, black, dec);
    }
}

/// Recursive black pebbling: pebble the children left to right, then slide
/// one of their pebbles up. Cost `(d-1)h - d + 2`.
pub fn strategy_black(d: usize, h: usize) -> Vec<PebbleMove> {
    fn rec(b: &mut Builder, v: NodeId) {
        for c in b.children(v) {
            rec(b, c);
        }
        b.finish_sliding_all(v, Weight::one());
    }
    let mut b = Builder::new(d, h, GameVariant::Black);
    rec(&mut b, 1);
    b.decb(1, Weight::one());
    b.moves
}

/// How an `up` pass ends at its top node.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Top {
    /// Place a black pebble.
    Black,
    /// Remove the white pebble already sitting there.
    ClearWhite,
}

impl Top {
    fn weight(self) -> Weight {
        match self {
            Top::Black => Weight::one(),
            Top::ClearWhite => Weight::zero(),
        }
    }
}

/// Black-white pebbling with cost `ceil((d-1)h/2) + 1`.
///
/// `up(v)` brings the top of the subtree to its final state (the critical
/// time) while leaving white pebbles below; `down(v)` then removes them with
/// the top pebble in place.
pub fn strategy_bw(d: usize, h: usize) -> Vec<PebbleMove> {
    let mut b = Builder::new(d, h, GameVariant::BlackWhite);
    up(&mut b, 1, Top::Black);
    b.decb(1, Weight::one());
    down(&mut b, 1);
    b.moves
}

fn up(b: &mut Builder, v: NodeId, top: Top) {
    let h = b.height(v);
    let d = b.shape.d;
    let c = b.children(v);
    if h == 2 {
        b.place_leaves(v);
        b.finish_sliding_all(v, top.weight());
        return;
    }
    if d % 2 == 1 {
        let m = d.div_ceil(2);
        for &x in &c[..m - 1] {
            full_keep(b, x);
        }
        up(b, c[m - 1], Top::Black);
        for &x in &c[m..] {
            b.white(x, Weight::one());
        }
        let dec = c[..m].iter().map(|&x| (x, Weight::one())).collect();
        b.finish(v, top.weight(), dec);
        return;
    }
    let half = d / 2;
    if h == 3 {
        for &x in &c[..=half] {
            full_keep(b, x);
        }
    } else {
        for &x in &c[..half] {
            keep_with_pass(b, x, Top::Black);
        }
        let z = b.children(c[half]);
        for &x in &z[..half - 1] {
            full_keep(b, x);
        }
        up(b, z[half - 1], Top::Black);
        for &x in &z[half..] {
            b.white(x, Weight::one());
        }
        let dec = z[..half].iter().map(|&x| (x, Weight::one())).collect();
        b.finish(c[half], Weight::one(), dec);
    }
    for &x in &c[half + 1..] {
        b.white(x, Weight::one());
    }
    let dec = c[..=half].iter().map(|&x| (x, Weight::one())).collect();
    b.finish(v, top.weight(), dec);
}

fn down(b: &mut Builder, v: NodeId) {
    let h = b.height(v);
    let d = b.shape.d;
    let c = b.children(v);
    if h == 2 {
        return;
    }
    if d % 2 == 1 {
        let m = d.div_ceil(2);
        down(b, c[m - 1]);
        for &x in &c[m..] {
            clear_white(b, x);
        }
        return;
    }
    let half = d / 2;
    if h == 3 {
        for &x in &c[half + 1..] {
            clear_white(b, x);
        }
        return;
    }
    let z = b.children(c[half]);
    down(b, z[half - 1]);
    for &x in &z[half..] {
        clear_white(b, x);
    }
    for &x in &c[half + 1..] {
        keep_with_pass(b, x, Top::ClearWhite);
    }
}

/// Leaves exactly one black pebble on `v`.
fn full_keep(b: &mut Builder, v: NodeId) {
    up(b, v, Top::Black);
    down(b, v);
}

/// Removes the white pebble on `v` together with everything used to do so.
fn clear_white(b: &mut Builder, v: NodeId) {
    up(b, v, Top::ClearWhite);
    down(b, v);
}

/// Even-degree helper: finishes `v` and immediately cleans up below it, so
/// nothing but the top effect remains.
fn keep_with_pass(b: &mut Builder, v: NodeId, top: Top) {
    let half = b.shape.d / 2;
    let y = b.children(v);
    for &x in &y[..half] {
        full_keep(b, x);
    }
    up(b, y[half], Top::Black);
    for &x in &y[half + 1..] {
        b.white(x, Weight::one());
    }
    let dec = y[..=half].iter().map(|&x| (x, Weight::one())).collect();
    b.finish(v, top.weight(), dec);
    down(b, y[half]);
    for &x in &y[half + 1..] {
        clear_white(b, x);
    }
}

/// Fractional pebbling with cost `(d-1)h/2 + 1`, built from the mutually
/// recursive procedures `A`, `A'`, `B` and `C`.
pub fn strategy_fractional(d: usize, h: usize) -> Vec<PebbleMove> {
    let mut b = Builder::new(d, h, GameVariant::Fractional);
    frac_a(&mut b, 1, Weight::one(), Top::Black);
    b.moves
}

/// `B`: ends with a black pebble on `v` (or its white half pebble removed
/// when `top` is `ClearWhite`) and white half pebbles on the first `d-1`
/// children of every node along the rightmost path below.
fn frac_b(b: &mut Builder, v: NodeId, top: Top) {
    if b.height(v) == 2 {
        b.place_leaves(v);
        b.finish_sliding_all(v, top.weight());
        return;
    }
    let c = b.children(v);
    let (last, firsts) = c.split_last().expect("internal node");
    for &x in firsts {
        frac_a(b, x, w(1, 2), Top::Black);
    }
    frac_b(b, *last, Top::Black);
    for &x in firsts {
        b.white(x, w(1, 2));
    }
    let mut dec: Vec<_> = firsts.iter().map(|&x| (x, w(1, 2))).collect();
    dec.push((*last, Weight::one()));
    b.finish(v, top.weight(), dec);
}

/// `C`: removes the white half pebbles left behind by `B`.
fn frac_c(b: &mut Builder, v: NodeId) {
    if b.height(v) == 2 {
        return;
    }
    let c = b.children(v);
    let (last, firsts) = c.split_last().expect("internal node");
    frac_c(b, *last);
    for &x in firsts {
        frac_a(b, x, Weight::zero(), Top::ClearWhite);
    }
}

/// `A` (`lower` = 1) and `A'` (`lower` = 1/2): run `B`, lower the black
/// pebble on `v` by `lower`, then run `C`.
fn frac_a(b: &mut Builder, v: NodeId, lower: Weight, top: Top) {
    frac_b(b, v, top);
    if !lower.is_zero() {
        b.decb(v, lower);
    }
    frac_c(b, v);
}

/// The hard-coded white-sliding pebbling of the height-4 binary tree with
/// 8/3 pebbles.
pub const WHITESLIDE_H4: &str = "\
# left subtree: black on 2 via white on 5
finish 8
finish 9
finish 4 b=1 w=0 dec 8=1 9=1
incw 5 1
finish 2 b=1 w=0 dec 4=1
decb 2 2/3
# remove the white on 5 by sliding it to 11
finish 10
slide 5 11
decb 10 1
finish 11 b=0 w=0
# right subtree
finish 12
finish 13
finish 6 b=1/3 w=0 dec 12=1/3
decb 12 2/3
decb 13 1
finish 14
finish 15
finish 7 b=1 w=0 dec 14=1
decb 15 1
incw 6 2/3
finish 3 b=1 w=0 dec 7=1
decb 6 1/3
# root
incw 2 2/3
finish 1 b=1 w=0 dec 3=1
decb 1 1
decb 2 1/3
# clean up the white on 6
finish 12
finish 13 b=1/3 w=0
slide 6 13
decb 12 1
decb 13 1/3
finish 13 b=0 w=0
# clean up the white on 2
finish 8
finish 9
finish 4 b=1 w=0 dec 8=1 9=1
incw 5 1
finish 2 b=0 w=0 dec 4=1
finish 10
slide 5 11
decb 10 1
finish 11 b=0 w=0
";

pub fn strategy_whiteslide_h4() -> Vec<PebbleMove> {
    parse_sequence(WHITESLIDE_H4).expect("fixture parses")
}

/// Fractional pebbling of the height-3 binary tree with 2.5 pebbles, written
/// out by hand.
pub const FRACTIONAL_H3: &str = "\
finish 4
finish 5
finish 2 b=1/2 w=0 dec 4=1 5=1
finish 6
finish 7
finish 3 b=1 w=0 dec 6=1 7=1
incw 2 1/2
finish 1 b=1 w=0 dec 2=1/2 3=1
decb 1 1
finish 4
finish 5
finish 2 b=0 w=0 dec 4=1 5=1
";

pub fn fractional_h3_fixture() -> Vec<PebbleMove> {
    parse_sequence(FRACTIONAL_H3).expect("fixture parses")
}

/// Cost of [`strategy_black`].
pub fn black_cost(d: usize, h: usize) -> Weight {
    Weight::from_integer(((d - 1) * h + 2 - d) as i64)
}

/// Cost of [`strategy_bw`].
pub fn bw_cost(d: usize, h: usize) -> Weight {
    Weight::from_integer(((d - 1) * h).div_ceil(2) as i64 + 1)
}

/// Cost of [`strategy_fractional`].
pub fn fractional_cost(d: usize, h: usize) -> Weight {
    Weight::new(((d - 1) * h) as i64, 2) + 1
}
