//! Whole pebbling sequences: validation and the text format.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use super::dag::PebbleDag;
use super::moves::{apply_move, apply_move_mut, GameVariant, IllegalMove, PebbleConfig, PebbleMove};
use super::Weight;
use crate::tree::NodeId;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("move {index} (`{mv}`) is illegal: {reason}")]
    IllegalMove { index: usize, mv: String, reason: IllegalMove },
    #[error("root {root} never holds a whole black pebble")]
    RootNeverBlack { root: NodeId },
    #[error("final configuration is not empty")]
    NonEmptyEnd,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceReport {
    /// Maximum total weight over all configurations.
    pub cost: Weight,
    /// Index of the first configuration reaching the maximum (0 = start).
    pub peak_at: usize,
    pub moves: usize,
}

/// Runs `moves` from the empty configuration and checks that every root
/// gets a whole black pebble at some point and the end is empty.
pub fn validate_sequence(
    dag: &PebbleDag,
    moves: &[PebbleMove],
    variant: GameVariant,
) -> Result<SequenceReport, SequenceError> {
    let mut config = PebbleConfig::empty(dag.node_count());
    let mut cost = Weight::zero();
    let mut peak_at = 0;
    let mut root_black = vec![false; dag.roots().len()];
    for (index, mv) in moves.iter().enumerate() {
        apply_move_mut(dag, &mut config, mv, variant).map_err(|reason| SequenceError::IllegalMove {
            index,
            mv: mv.to_string(),
            reason,
        })?;
        if config.total() > cost {
            cost = config.total();
            peak_at = index + 1;
        }
        for (seen, &root) in root_black.iter_mut().zip(dag.roots()) {
            *seen |= config.black(root) == Weight::one();
        }
    }
    if let Some(i) = root_black.iter().position(|&seen| !seen) {
        return Err(SequenceError::RootNeverBlack { root: dag.roots()[i] });
    }
    if !config.is_empty() {
        return Err(SequenceError::NonEmptyEnd);
    }
    Ok(SequenceReport { cost, peak_at, moves: moves.len() })
}

/// All configurations `C_0 .. C_t` visited by `moves`.
pub fn trace(
    dag: &PebbleDag,
    moves: &[PebbleMove],
    variant: GameVariant,
) -> Result<Vec<PebbleConfig>, SequenceError> {
    let mut configs = Vec::with_capacity(moves.len() + 1);
    configs.push(PebbleConfig::empty(dag.node_count()));
    for (index, mv) in moves.iter().enumerate() {
        let next = apply_move(dag, configs.last().expect("nonempty"), mv, variant).map_err(|reason| {
            SequenceError::IllegalMove { index, mv: mv.to_string(), reason }
        })?;
        configs.push(next);
    }
    Ok(configs)
}

/// Parses one move per line; blank lines and `#` comments are skipped.
pub fn parse_sequence(text: &str) -> Result<Vec<PebbleMove>, SequenceError> {
    let mut moves = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mv = line.parse().map_err(|message| SequenceError::Parse { line: i + 1, message })?;
        moves.push(mv);
    }
    Ok(moves)
}

pub fn format_sequence(moves: &[PebbleMove]) -> String {
    let mut out = String::new();
    for mv in moves {
        out.push_str(&mv.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebbling::w;
    use crate::tree::TreeShape;

    #[test]
    fn trivial_tree() {
        let dag = PebbleDag::from_tree(TreeShape::new(2, 2));
        let moves = parse_sequence("finish 2\nfinish 3\nfinish 1 dec 2=1 3=1\ndecb 3 0\ndecb 1 1\n").unwrap();
        let r = validate_sequence(&dag, &moves, GameVariant::Black).unwrap();
        assert_eq!(r.cost, w(2, 1));
        assert_eq!(r.peak_at, 2);
    }

    #[test]
    fn errors_are_reported() {
        let dag = PebbleDag::from_tree(TreeShape::new(2, 2));
        let moves = parse_sequence("finish 2\nfinish 1").unwrap();
        assert!(matches!(
            validate_sequence(&dag, &moves, GameVariant::Black),
            Err(SequenceError::IllegalMove { index: 1, .. })
        ));
        let moves = parse_sequence("finish 2 # leaf\ndecb 2 1").unwrap();
        assert_eq!(
            validate_sequence(&dag, &moves, GameVariant::Black),
            Err(SequenceError::RootNeverBlack { root: 1 })
        );
        let moves = parse_sequence("finish 2\nfinish 3\nfinish 1 dec 2=1 3=1").unwrap();
        assert_eq!(validate_sequence(&dag, &moves, GameVariant::Black), Err(SequenceError::NonEmptyEnd));
        assert!(matches!(parse_sequence("\nbogus"), Err(SequenceError::Parse { line: 2, .. })));
    }
}
