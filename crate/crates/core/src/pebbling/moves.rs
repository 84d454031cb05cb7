//! Configurations, moves and the legality rules of the pebbling games.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dag::PebbleDag;
use super::{parse_weight, Weight};
use crate::tree::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameVariant {
    /// Whole black pebbles only.
    Black,
    /// Whole black and white pebbles, no white sliding.
    BlackWhite,
    /// Real-valued black and white weights, rules (i)-(iii).
    Fractional,
    /// Fractional plus the white sliding move.
    FractionalWhiteSlide,
}

impl GameVariant {
    pub fn is_whole(self) -> bool {
        matches!(self, GameVariant::Black | GameVariant::BlackWhite)
    }

    pub fn allows_white(self) -> bool {
        self != GameVariant::Black
    }
}

impl FromStr for GameVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "black" => Ok(GameVariant::Black),
            "bw" | "black-white" | "blackwhite" => Ok(GameVariant::BlackWhite),
            "fractional" => Ok(GameVariant::Fractional),
            "whiteslide" | "fractional-white-slide" => Ok(GameVariant::FractionalWhiteSlide),
            other => Err(format!("unknown game variant `{other}`")),
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameVariant::Black => "black",
            GameVariant::BlackWhite => "bw",
            GameVariant::Fractional => "fractional",
            GameVariant::FractionalWhiteSlide => "whiteslide",
        })
    }
}

/// Black and white weight of every node; index 0 unused.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PebbleConfig {
    black: Vec<Weight>,
    white: Vec<Weight>,
    total: Weight,
}

impl PebbleConfig {
    pub fn empty(n: usize) -> Self {
        PebbleConfig {
            black: vec![Weight::zero(); n + 1],
            white: vec![Weight::zero(); n + 1],
            total: Weight::zero(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.black.len() - 1
    }

    pub fn black(&self, v: NodeId) -> Weight {
        self.black[v]
    }

    pub fn white(&self, v: NodeId) -> Weight {
        self.white[v]
    }

    pub fn set(&mut self, v: NodeId, black: Weight, white: Weight) {
        self.total += black + white - self.black[v] - self.white[v];
        self.black[v] = black;
        self.white[v] = white;
    }

    /// Pebble value `b(v) + w(v)`.
    pub fn value(&self, v: NodeId) -> Weight {
        self.black[v] + self.white[v]
    }

    pub fn total(&self) -> Weight {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_zero()
    }

    /// Checks `0 <= b, w` and `b + w <= 1` everywhere.
    pub fn is_well_formed(&self) -> bool {
        (1..self.black.len()).all(|v| {
            self.black[v] >= Weight::zero()
                && self.white[v] >= Weight::zero()
                && self.value(v) <= Weight::one()
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PebbleMove {
    /// Rule (i).
    DecreaseBlack { node: NodeId, amount: Weight },
    /// Rule (ii).
    IncreaseWhite { node: NodeId, amount: Weight },
    /// Rule (iii): all children at value 1; set `b(node)` to `black >= b`,
    /// `w(node)` to `white <= w`, and lower children's black weights by the
    /// listed amounts, atomically.
    Finish { node: NodeId, black: Weight, white: Weight, decrease: Vec<(NodeId, Weight)> },
    /// White sliding from `node` down to `child`.
    WhiteSlide { node: NodeId, child: NodeId },
}

impl PebbleMove {
    pub fn node(&self) -> NodeId {
        match *self {
            PebbleMove::DecreaseBlack { node, .. }
            | PebbleMove::IncreaseWhite { node, .. }
            | PebbleMove::Finish { node, .. }
            | PebbleMove::WhiteSlide { node, .. } => node,
        }
    }

    /// Places a whole black pebble on a node whose children are pebbled.
    pub fn place(node: NodeId) -> Self {
        PebbleMove::Finish { node, black: Weight::one(), white: Weight::zero(), decrease: vec![] }
    }

    pub fn remove(node: NodeId) -> Self {
        PebbleMove::DecreaseBlack { node, amount: Weight::one() }
    }
}

impl fmt::Display for PebbleMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PebbleMove::DecreaseBlack { node, amount } => write!(f, "decb {node} {amount}"),
            PebbleMove::IncreaseWhite { node, amount } => write!(f, "incw {node} {amount}"),
            PebbleMove::Finish { node, black, white, decrease } => {
                write!(f, "finish {node} b={black} w={white}")?;
                if !decrease.is_empty() {
                    write!(f, " dec")?;
                    for (c, a) in decrease {
                        write!(f, " {c}={a}")?;
                    }
                }
                Ok(())
            }
            PebbleMove::WhiteSlide { node, child } => write!(f, "slide {node} {child}"),
        }
    }
}

impl FromStr for PebbleMove {
    type Err = String;

    /// Grammar (one move per line):
    ///
    /// ```text
    /// decb   <node> <amount>
    /// incw   <node> <amount>
    /// finish <node> [b=<weight>] [w=<weight>] [dec <child>=<amount> ...]
    /// slide  <node> <child>
    /// ```
    ///
    /// Weights are non-negative rationals written `p/q` or `p`; `b` defaults
    /// to 1 and `w` to 0.
    fn from_str(line: &str) -> Result<Self, String> {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let node = |i: usize| -> Result<NodeId, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("missing field {i} in `{line}`"))?
                .parse::<NodeId>()
                .map_err(|e| format!("bad node id in `{line}`: {e}"))
        };
        let weight = |s: Option<&&str>| -> Result<Weight, String> {
            parse_weight(s.ok_or_else(|| format!("missing amount in `{line}`"))?)
        };
        match parts.first().copied() {
            Some("decb") if parts.len() == 3 => {
                Ok(PebbleMove::DecreaseBlack { node: node(1)?, amount: weight(parts.get(2))? })
            }
            Some("incw") if parts.len() == 3 => {
                Ok(PebbleMove::IncreaseWhite { node: node(1)?, amount: weight(parts.get(2))? })
            }
            Some("slide") if parts.len() == 3 => {
                Ok(PebbleMove::WhiteSlide { node: node(1)?, child: node(2)? })
            }
            Some("finish") if parts.len() >= 2 => {
                let n = node(1)?;
                let mut black = Weight::one();
                let mut white = Weight::zero();
                let mut rest = &parts[2..];
                if let Some(b) = rest.first().and_then(|t| t.strip_prefix("b=")) {
                    black = parse_weight(b)?;
                    rest = &rest[1..];
                }
                if let Some(x) = rest.first().and_then(|t| t.strip_prefix("w=")) {
                    white = parse_weight(x)?;
                    rest = &rest[1..];
                }
                let mut decrease = Vec::new();
                if !rest.is_empty() {
                    if rest[0] != "dec" || rest.len() == 1 {
                        return Err(format!("expected `dec <child>=<amount> ...` in `{line}`"));
                    }
                    for item in &rest[1..] {
                        let (c, a) = item
                            .split_once('=')
                            .ok_or_else(|| format!("expected <child>=<amount>, got `{item}`"))?;
                        let c = c.parse::<NodeId>().map_err(|e| format!("bad child `{c}`: {e}"))?;
                        decrease.push((c, parse_weight(a)?));
                    }
                }
                Ok(PebbleMove::Finish { node: n, black, white, decrease })
            }
            _ => Err(format!("unrecognized move `{line}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    UnknownNode,
    /// Weights must stay non-negative.
    NonNegative,
    /// `b + w <= 1`.
    Capacity,
    RuleI,
    RuleII,
    RuleIII,
    RuleIV,
    /// The variant restricts weights to whole pebbles.
    WholeVariant,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("illegal move ({rule:?}): {message}")]
pub struct IllegalMove {
    pub rule: Rule,
    pub message: String,
}

fn illegal(rule: Rule, message: impl Into<String>) -> IllegalMove {
    IllegalMove { rule, message: message.into() }
}

fn children_full(dag: &PebbleDag, config: &PebbleConfig, node: NodeId, except: Option<NodeId>) -> bool {
    dag.children(node)
        .iter()
        .filter(|&&c| Some(c) != except)
        .all(|&c| config.value(c) == Weight::one())
}

/// Applies one move, returning the successor configuration.
pub fn apply_move(
    dag: &PebbleDag,
    config: &PebbleConfig,
    mv: &PebbleMove,
    variant: GameVariant,
) -> Result<PebbleConfig, IllegalMove> {
    let mut next = config.clone();
    apply_move_mut(dag, &mut next, mv, variant)?;
    Ok(next)
}

/// In-place form of [`apply_move`]; `config` is untouched on error.
pub fn apply_move_mut(
    dag: &PebbleDag,
    config: &mut PebbleConfig,
    mv: &PebbleMove,
    variant: GameVariant,
) -> Result<(), IllegalMove> {
    let updates = move_updates(dag, config, mv, variant)?;
    if variant.is_whole() {
        let one = Weight::one();
        let whole = |x: Weight| x.is_zero() || x == one;
        for &(v, b, w) in &updates {
            if !whole(b) || !whole(w) {
                return Err(illegal(Rule::WholeVariant, format!("node {v} would hold a partial pebble")));
            }
            if variant == GameVariant::Black && !w.is_zero() {
                return Err(illegal(Rule::WholeVariant, "black game has no white pebbles"));
            }
        }
    }
    for (v, b, w) in updates {
        config.set(v, b, w);
    }
    Ok(())
}

/// New `(node, black, white)` values produced by a legal move.
fn move_updates(
    dag: &PebbleDag,
    config: &PebbleConfig,
    mv: &PebbleMove,
    variant: GameVariant,
) -> Result<Vec<(NodeId, Weight, Weight)>, IllegalMove> {
    let node = mv.node();
    if !dag.contains(node) {
        return Err(illegal(Rule::UnknownNode, format!("node {node} not in target")));
    }
    let one = Weight::one();
    let zero = Weight::zero();
    let (b, w) = (config.black(node), config.white(node));
    match mv {
        PebbleMove::DecreaseBlack { amount, .. } => {
            if *amount < zero {
                return Err(illegal(Rule::RuleI, "negative decrease"));
            }
            if *amount > b {
                return Err(illegal(Rule::NonNegative, format!("decrease {amount} exceeds b({node}) = {b}")));
            }
            Ok(vec![(node, b - amount, w)])
        }
        PebbleMove::IncreaseWhite { amount, .. } => {
            if !variant.allows_white() {
                return Err(illegal(Rule::RuleII, "white pebbles are not part of the black game"));
            }
            if *amount < zero {
                return Err(illegal(Rule::RuleII, "negative increase"));
            }
            if b + w + amount > one {
                return Err(illegal(Rule::Capacity, format!("node {node} would exceed value 1")));
            }
            Ok(vec![(node, b, w + amount)])
        }
        PebbleMove::Finish { black, white, decrease, .. } => {
            if !children_full(dag, config, node, None) {
                return Err(illegal(
                    Rule::RuleIII,
                    format!("children of node {node} do not all have pebble value 1"),
                ));
            }
            if *black < b {
                return Err(illegal(Rule::RuleIII, "finishing may not lower the black weight"));
            }
            if *white > w || *white < zero {
                return Err(illegal(Rule::RuleIII, "finishing may only lower the white weight"));
            }
            if black + white > one {
                return Err(illegal(Rule::Capacity, format!("node {node} would exceed value 1")));
            }
            let mut updates = Vec::with_capacity(decrease.len() + 1);
            updates.push((node, *black, *white));
            for &(c, amount) in decrease {
                if !dag.children(node).contains(&c) || updates[1..].iter().any(|u| u.0 == c) {
                    return Err(illegal(Rule::RuleIII, format!("{c} is not a (distinct) child of {node}")));
                }
                if amount < zero || amount > config.black(c) {
                    return Err(illegal(
                        Rule::NonNegative,
                        format!("cannot lower b({c}) = {} by {amount}", config.black(c)),
                    ));
                }
                updates.push((c, config.black(c) - amount, config.white(c)));
            }
            Ok(updates)
        }
        PebbleMove::WhiteSlide { child, .. } => {
            if variant != GameVariant::FractionalWhiteSlide {
                return Err(illegal(Rule::RuleIV, "white sliding is not allowed in this variant"));
            }
            let child = *child;
            if !dag.children(node).contains(&child) {
                return Err(illegal(Rule::RuleIV, format!("{child} is not a child of {node}")));
            }
            if !children_full(dag, config, node, Some(child)) {
                return Err(illegal(Rule::RuleIV, "siblings of the target must have value 1"));
            }
            let missing = one - config.value(child);
            if w < missing || w.is_zero() {
                return Err(illegal(Rule::RuleIV, format!("w({node}) = {w} cannot fill child {child}")));
            }
            Ok(vec![(node, b, zero), (child, config.black(child), config.white(child) + missing)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebbling::w;
    use crate::tree::TreeShape;

    fn tree(d: usize, h: usize) -> PebbleDag {
        PebbleDag::from_tree(TreeShape::new(d, h))
    }

    #[test]
    fn white_placement_is_unconditional() {
        let dag = tree(2, 3);
        let c = PebbleConfig::empty(7);
        let next = apply_move(&dag, &c, &PebbleMove::IncreaseWhite { node: 1, amount: w(1, 1) }, GameVariant::BlackWhite)
            .unwrap();
        assert_eq!(next.white(1), w(1, 1));
    }

    #[test]
    fn finish_needs_full_children() {
        let dag = tree(2, 3);
        let c = PebbleConfig::empty(7);
        let err = apply_move(&dag, &c, &PebbleMove::place(2), GameVariant::Fractional).unwrap_err();
        assert_eq!(err.rule, Rule::RuleIII);
    }

    #[test]
    fn partial_finish_with_slide() {
        let dag = tree(2, 3);
        let mut c = PebbleConfig::empty(7);
        c.set(4, w(1, 1), w(0, 1));
        c.set(5, w(1, 1), w(0, 1));
        let mv: PebbleMove = "finish 2 b=1/2 w=0 dec 4=1 5=1".parse().unwrap();
        let next = apply_move(&dag, &c, &mv, GameVariant::Fractional).unwrap();
        assert_eq!(next.black(2), w(1, 2));
        assert!(next.black(4).is_zero() && next.black(5).is_zero());
        assert_eq!(next.total(), w(1, 2));
    }

    #[test]
    fn whole_variants_reject_fractions() {
        let dag = tree(2, 2);
        let c = PebbleConfig::empty(3);
        let mv = PebbleMove::IncreaseWhite { node: 2, amount: w(1, 2) };
        assert_eq!(apply_move(&dag, &c, &mv, GameVariant::BlackWhite).unwrap_err().rule, Rule::WholeVariant);
        let mv = PebbleMove::IncreaseWhite { node: 2, amount: w(1, 1) };
        assert_eq!(apply_move(&dag, &c, &mv, GameVariant::Black).unwrap_err().rule, Rule::RuleII);
    }

    #[test]
    fn capacity_enforced() {
        let dag = tree(2, 2);
        let mut c = PebbleConfig::empty(3);
        c.set(2, w(1, 2), w(0, 1));
        let mv = PebbleMove::IncreaseWhite { node: 2, amount: w(2, 3) };
        assert_eq!(apply_move(&dag, &c, &mv, GameVariant::Fractional).unwrap_err().rule, Rule::Capacity);
    }

    #[test]
    fn white_slide_only_in_slide_variant() {
        let dag = tree(2, 2);
        let mut c = PebbleConfig::empty(3);
        c.set(1, w(0, 1), w(1, 1));
        c.set(2, w(1, 1), w(0, 1));
        let mv = PebbleMove::WhiteSlide { node: 1, child: 3 };
        assert_eq!(apply_move(&dag, &c, &mv, GameVariant::Fractional).unwrap_err().rule, Rule::RuleIV);
        let next = apply_move(&dag, &c, &mv, GameVariant::FractionalWhiteSlide).unwrap();
        assert_eq!(next.white(3), w(1, 1));
        assert!(next.white(1).is_zero());
    }

    #[test]
    fn move_text_roundtrip() {
        for line in ["decb 4 1/2", "incw 2 1", "finish 2 b=1/2 w=0 dec 4=1 5=1", "finish 7 b=1 w=0", "slide 6 13"] {
            let mv: PebbleMove = line.parse().unwrap();
            assert_eq!(mv.to_string(), line);
        }
        assert_eq!("finish 3".parse::<PebbleMove>().unwrap(), PebbleMove::place(3));
        assert!("finish 2 b=1 4=1".parse::<PebbleMove>().is_err());
        assert!("jump 2".parse::<PebbleMove>().is_err());
    }
}
