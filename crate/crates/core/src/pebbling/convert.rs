//! Fractional to whole black-white conversion by thresholding.

use num_traits::Zero;

use super::dag::PebbleDag;
use super::moves::{GameVariant, PebbleConfig, PebbleMove};
use super::sequence::{trace, SequenceError};
use super::{w, Weight};
use crate::tree::NodeId;

fn has_black(c: &PebbleConfig, v: NodeId) -> bool {
    c.black(v) >= w(1, 2)
}

fn has_white(c: &PebbleConfig, v: NodeId) -> bool {
    c.white(v) > w(1, 2)
}

fn whole(flag: bool) -> Weight {
    if flag {
        Weight::from_integer(1)
    } else {
        Weight::zero()
    }
}

/// Converts a fractional pebbling into a whole black-white pebbling that
/// holds a black pebble exactly where `b >= 1/2` and a white one exactly
/// where `w > 1/2`. The result costs at most twice the input.
///
/// Moves whose thresholded effect is empty are dropped. White sliding is
/// rejected since the input must be a plain fractional pebbling.
pub fn fractional_to_bw(dag: &PebbleDag, moves: &[PebbleMove]) -> Result<Vec<PebbleMove>, SequenceError> {
    let configs = trace(dag, moves, GameVariant::Fractional)?;
    let mut out = Vec::with_capacity(moves.len());
    for (mv, pair) in moves.iter().zip(configs.windows(2)) {
        let (before, after) = (&pair[0], &pair[1]);
        let v = mv.node();
        match mv {
            PebbleMove::DecreaseBlack { .. } => {
                if has_black(before, v) && !has_black(after, v) {
                    out.push(PebbleMove::DecreaseBlack { node: v, amount: Weight::from_integer(1) });
                }
            }
            PebbleMove::IncreaseWhite { .. } => {
                if !has_white(before, v) && has_white(after, v) {
                    out.push(PebbleMove::IncreaseWhite { node: v, amount: Weight::from_integer(1) });
                }
            }
            PebbleMove::Finish { decrease, .. } => {
                let dec: Vec<_> = decrease
                    .iter()
                    .filter(|&&(c, _)| has_black(before, c) && !has_black(after, c))
                    .map(|&(c, _)| (c, Weight::from_integer(1)))
                    .collect();
                let changed = has_black(before, v) != has_black(after, v)
                    || has_white(before, v) != has_white(after, v);
                if changed || !dec.is_empty() {
                    out.push(PebbleMove::Finish {
                        node: v,
                        black: whole(has_black(after, v)),
                        white: whole(has_white(after, v)),
                        decrease: dec,
                    });
                }
            }
            PebbleMove::WhiteSlide { .. } => unreachable!("rejected by fractional validation"),
        }
    }
    Ok(out)
}
