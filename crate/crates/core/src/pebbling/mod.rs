//! Pebbling games on DAGs.

pub mod convert;
pub mod dag;
pub mod moves;
pub mod sequence;
pub mod strategies;

use num_rational::Rational64;

pub use convert::fractional_to_bw;
pub use dag::{DagError, PebbleDag};
pub use moves::{apply_move, apply_move_mut, GameVariant, IllegalMove, PebbleConfig, PebbleMove, Rule};
pub use sequence::{
    format_sequence, parse_sequence, validate_sequence, SequenceError, SequenceReport,
};

/// Exact pebble weight.
pub type Weight = Rational64;

/// Shorthand for the weight `n / d`.
pub fn w(n: i64, d: i64) -> Weight {
    Weight::new(n, d)
}

/// Parses `p`, `p/q` or a decimal such as `0.5`.
pub fn parse_weight(s: &str) -> Result<Weight, String> {
    let bad = |e: &dyn std::fmt::Display| format!("bad weight `{s}`: {e}");
    let value = if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let denom = 10i64.checked_pow(digits).ok_or_else(|| format!("weight `{s}` too precise"))?;
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|e| bad(&e))? };
        let frac: i64 = frac.parse().map_err(|e| bad(&e))?;
        Weight::new(int * denom + frac, denom)
    } else {
        s.parse::<Weight>().map_err(|e| bad(&e))?
    };
    if value < Weight::from_integer(0) {
        return Err(format!("weight `{s}` is negative"));
    }
    Ok(value)
}
