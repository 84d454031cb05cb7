//! Optimal weights for a fixed move skeleton by exact linear programming.
//!
//! A skeleton fixes which move is applied to which node at every step; the
//! weights become variables `b_{v,t}` and `w_{v,t}`. Only the nodes a step
//! touches get fresh variables, so unchanged weights share a variable.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simplex::{q, Cmp, LinearProgram, LpOutcome, Q};
use crate::pebbling::{validate_sequence, GameVariant, PebbleDag, PebbleMove, Weight};
use crate::tree::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    DecreaseBlack,
    IncreaseWhite,
    Finish,
    WhiteSlide { child: NodeId },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSkeleton {
    pub steps: Vec<(StepKind, NodeId)>,
}

pub fn skeleton_of(moves: &[PebbleMove]) -> MoveSkeleton {
    let steps = moves
        .iter()
        .map(|m| match *m {
            PebbleMove::DecreaseBlack { node, .. } => (StepKind::DecreaseBlack, node),
            PebbleMove::IncreaseWhite { node, .. } => (StepKind::IncreaseWhite, node),
            PebbleMove::Finish { node, .. } => (StepKind::Finish, node),
            PebbleMove::WhiteSlide { node, child } => (StepKind::WhiteSlide { child }, node),
        })
        .collect();
    MoveSkeleton { steps }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("no weights make the skeleton a valid pebbling")]
    Infeasible,
    #[error("step {0} names a node or child outside the target")]
    BadStep(usize),
    #[error("optimal weights do not fit 64-bit rationals")]
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub cost: Weight,
    pub sequence: Vec<PebbleMove>,
}

/// Current variable of a weight; `None` is the constant 0.
type Slot = Option<usize>;

struct Model {
    lp: LinearProgram,
    /// `(b, w)` slots of every node after each step; index 0 is the start.
    history: Vec<Vec<(Slot, Slot)>>,
}

fn term(slot: Slot, coef: i64) -> Vec<(usize, Q)> {
    slot.map(|v| vec![(v, q(coef))]).unwrap_or_default()
}

fn build(dag: &PebbleDag, skeleton: &MoveSkeleton) -> Result<Model, LpError> {
    let n = dag.node_count();
    let mut lp = LinearProgram::new(1);
    let p = 0;
    lp.objective = vec![(p, q(1))];
    let mut cur: Vec<(Slot, Slot)> = vec![(None, None); n + 1];
    let mut history = vec![cur.clone()];
    let full = |lp: &mut LinearProgram, (b, w): (Slot, Slot)| {
        let mut t = term(b, 1);
        t.extend(term(w, 1));
        lp.constrain(t, Cmp::Eq, q(1));
    };
    let fresh = |lp: &mut LinearProgram, old: Slot, cmp: Cmp| -> Slot {
        let v = lp.add_var();
        let mut t = vec![(v, q(1))];
        t.extend(term(old, -1));
        lp.constrain(t, cmp, q(0));
        Some(v)
    };
    for (i, &(kind, v)) in skeleton.steps.iter().enumerate() {
        if !dag.contains(v) {
            return Err(LpError::BadStep(i));
        }
        let mut touched = vec![v];
        match kind {
            StepKind::DecreaseBlack => cur[v].0 = fresh(&mut lp, cur[v].0, Cmp::Le),
            StepKind::IncreaseWhite => cur[v].1 = fresh(&mut lp, cur[v].1, Cmp::Ge),
            StepKind::Finish => {
                for &u in dag.children(v) {
                    full(&mut lp, cur[u]);
                }
                let (b, w) = cur[v];
                cur[v] = (fresh(&mut lp, b, Cmp::Ge), fresh(&mut lp, w, Cmp::Le));
                for &u in dag.children(v) {
                    cur[u].0 = fresh(&mut lp, cur[u].0, Cmp::Le);
                    touched.push(u);
                }
            }
            StepKind::WhiteSlide { child } => {
                if !dag.children(v).contains(&child) {
                    return Err(LpError::BadStep(i));
                }
                for &u in dag.children(v) {
                    if u != child {
                        full(&mut lp, cur[u]);
                    }
                }
                // w(v) >= 1 - b(child) - w(child)
                let mut t = term(cur[v].1, 1);
                t.extend(term(cur[child].0, 1));
                t.extend(term(cur[child].1, 1));
                lp.constrain(t, Cmp::Ge, q(1));
                cur[v].1 = None;
                let nw = lp.add_var();
                let mut t = vec![(nw, q(1))];
                t.extend(term(cur[child].0, 1));
                lp.constrain(t, Cmp::Eq, q(1));
                cur[child].1 = Some(nw);
                touched.push(child);
            }
        }
        for &u in &touched {
            let mut t = term(cur[u].0, 1);
            t.extend(term(cur[u].1, 1));
            if !t.is_empty() {
                lp.constrain(t, Cmp::Le, q(1));
            }
        }
        let mut sum: Vec<(usize, Q)> = cur.iter().flat_map(|&(b, w)| term(b, 1).into_iter().chain(term(w, 1))).collect();
        sum.push((p, q(-1)));
        lp.constrain(sum, Cmp::Le, q(0));
        history.push(cur.clone());
    }
    for &(b, w) in &cur[1..] {
        for slot in [b, w].into_iter().flatten() {
            lp.constrain(vec![(slot, q(1))], Cmp::Eq, q(0));
        }
    }
    Ok(Model { lp, history })
}

/// Minimum cost over all weight assignments realizing `skeleton` on `dag`,
/// with a sequence attaining it. Each root is required to be whole black
/// right after one of its `Finish` steps; every choice is tried.
pub fn lp_min_over_skeleton(dag: &PebbleDag, skeleton: &MoveSkeleton) -> Result<LpSolution, LpError> {
    let model = build(dag, skeleton)?;
    let choices: Vec<Vec<usize>> = dag
        .roots()
        .iter()
        .map(|&r| {
            skeleton
                .steps
                .iter()
                .enumerate()
                .filter(|(_, s)| s.0 == StepKind::Finish && s.1 == r)
                .map(|(i, _)| i + 1)
                .collect()
        })
        .collect();
    let mut best: Option<(Q, Vec<Q>)> = None;
    let mut pick = vec![0; choices.len()];
    if choices.iter().any(Vec::is_empty) {
        return Err(LpError::Infeasible);
    }
    loop {
        let mut lp = model.lp.clone();
        for (ri, &r) in dag.roots().iter().enumerate() {
            let t = choices[ri][pick[ri]];
            let slot = model.history[t][r].0.expect("finish creates a black variable");
            lp.constrain(vec![(slot, q(1))], Cmp::Eq, q(1));
        }
        if let LpOutcome::Optimal { value, x } = lp.solve() {
            if best.as_ref().is_none_or(|(b, _)| value < *b) {
                best = Some((value, x));
            }
        }
        // odometer over root choices
        let mut i = 0;
        while i < pick.len() {
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            break;
        }
    }
    let (value, x) = best.ok_or(LpError::Infeasible)?;
    let sequence = realize(dag, skeleton, &model, &x)?;
    let cost = to_weight(&value)?;
    let variant = if skeleton.steps.iter().any(|s| matches!(s.0, StepKind::WhiteSlide { .. })) {
        GameVariant::FractionalWhiteSlide
    } else {
        GameVariant::Fractional
    };
    let check = validate_sequence(dag, &sequence, variant).expect("LP solution is a valid pebbling");
    debug_assert!(check.cost <= cost);
    Ok(LpSolution { cost, sequence })
}

fn to_weight(x: &Q) -> Result<Weight, LpError> {
    let n = x.numer().to_i64().ok_or(LpError::Overflow)?;
    let d = x.denom().to_i64().ok_or(LpError::Overflow)?;
    Ok(Weight::new(n, d))
}

fn realize(dag: &PebbleDag, skeleton: &MoveSkeleton, model: &Model, x: &[Q]) -> Result<Vec<PebbleMove>, LpError> {
    let val = |slot: Slot| -> Result<Weight, LpError> { slot.map_or(Ok(Weight::zero()), |v| to_weight(&x[v])) };
    let mut moves = Vec::with_capacity(skeleton.steps.len());
    for (t, &(kind, v)) in skeleton.steps.iter().enumerate() {
        let (before, after) = (&model.history[t], &model.history[t + 1]);
        moves.push(match kind {
            StepKind::DecreaseBlack => {
                PebbleMove::DecreaseBlack { node: v, amount: val(before[v].0)? - val(after[v].0)? }
            }
            StepKind::IncreaseWhite => {
                PebbleMove::IncreaseWhite { node: v, amount: val(after[v].1)? - val(before[v].1)? }
            }
            StepKind::Finish => {
                let mut decrease = Vec::new();
                for &u in dag.children(v) {
                    let amount = val(before[u].0)? - val(after[u].0)?;
                    if !amount.is_zero() {
                        decrease.push((u, amount));
                    }
                }
                PebbleMove::Finish { node: v, black: val(after[v].0)?, white: val(after[v].1)?, decrease }
            }
            StepKind::WhiteSlide { child } => PebbleMove::WhiteSlide { node: v, child },
        });
    }
    Ok(moves)
}
