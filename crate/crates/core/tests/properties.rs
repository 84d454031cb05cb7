//! Randomised properties of pebbling sequences, conversion, LP and search.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeval::pebbling::sequence::trace;
use treeval::pebbling::strategies::{fractional_h3_fixture, strategy_black, strategy_bw, strategy_fractional};
use treeval::pebbling::{fractional_to_bw, validate_sequence, w, GameVariant, PebbleDag, PebbleMove, Weight};
use treeval::search::{lp_min_over_skeleton, min_pebbles_tree, skeleton_of, SearchOptions};
use treeval::tree::TreeShape;

/// A valid fractional pebbling of the binary tree of height `h`: a base
/// strategy with up to three white detours on leaves, each placed at a
/// random point and removed by a leaf Finish at a later one.
fn random_fractional(rng: &mut ChaCha8Rng, h: usize) -> (Vec<PebbleMove>, usize) {
    let shape = TreeShape::new(2, h);
    let dag = PebbleDag::from_tree(shape);
    let mut moves = match rng.gen_range(0..4) {
        0 => strategy_black(2, h),
        1 => strategy_bw(2, h),
        2 if h == 3 => fractional_h3_fixture(),
        _ => strategy_fractional(2, h),
    };
    let mut detours = 0;
    for _ in 0..rng.gen_range(0..=3) {
        let configs = trace(&dag, &moves, GameVariant::Fractional).expect("valid so far");
        let leaf = rng.gen_range(shape.first_leaf()..=shape.node_count());
        let i = rng.gen_range(0..=moves.len());
        let j = rng.gen_range(i..=moves.len());
        let slack = configs[i..=j].iter().map(|c| Weight::one() - c.value(leaf)).min().expect("nonempty");
        let q = [2, 3, 4, 6][rng.gen_range(0..4)];
        let amount = (1..=q).rev().map(|p| w(p, q)).find(|&a| a <= slack && rng.gen_bool(0.5)).unwrap_or(Weight::zero());
        if amount.is_zero() {
            continue;
        }
        let black = configs[j].black(leaf);
        moves.insert(j, PebbleMove::Finish { node: leaf, black, white: Weight::zero(), decrease: vec![] });
        moves.insert(i, PebbleMove::IncreaseWhite { node: leaf, amount });
        detours += 1;
    }
    (moves, detours)
}

#[test]
fn conversion_and_lp_on_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut detoured = 0;
    for n in 0..100 {
        let h = 2 + n % 3;
        let dag = PebbleDag::from_tree(TreeShape::new(2, h));
        let (seq, detours) = random_fractional(&mut rng, h);
        let cost = validate_sequence(&dag, &seq, GameVariant::Fractional).expect("generator yields valid sequences").cost;
        detoured += usize::from(detours > 0);
        let bw = fractional_to_bw(&dag, &seq).unwrap();
        let bw_cost = validate_sequence(&dag, &bw, GameVariant::BlackWhite).unwrap().cost;
        assert!(bw_cost <= cost * 2, "h={h}: {bw_cost} > 2 * {cost}");
        let lp = lp_min_over_skeleton(&dag, &skeleton_of(&seq)).unwrap();
        assert!(lp.cost <= cost);
        let lp_cost = validate_sequence(&dag, &lp.sequence, GameVariant::Fractional).unwrap().cost;
        assert_eq!(lp_cost, lp.cost);
    }
    assert!(detoured > 20, "only {detoured} sequences had detours");
}

#[test]
fn finer_granularity_never_costs_more() {
    let opts = SearchOptions::default();
    for h in 2..=3 {
        let shape = TreeShape::new(2, h);
        let cost = |c| min_pebbles_tree(shape, GameVariant::Fractional, c, &opts).unwrap().cost;
        let (c1, c2, c3, c4) = (cost(1), cost(2), cost(3), cost(4));
        assert!(c2 <= c1 && c4 <= c2 && c3 <= c1, "h={h}: {c1} {c2} {c3} {c4}");
        let bw = min_pebbles_tree(shape, GameVariant::BlackWhite, 1, &opts).unwrap().cost;
        let black = min_pebbles_tree(shape, GameVariant::Black, 1, &opts).unwrap().cost;
        assert!(c1 <= bw && bw <= black);
    }
}
