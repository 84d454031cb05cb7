//! Exact minimum-pebble search over discretized configurations.
//!
//! Weights are multiples of `1/c`. The search raises the budget one unit at
//! a time and keeps every configuration found so far, so each budget only
//! explores what the previous one could not reach. Complete trees are
//! searched modulo reordering of sibling subtrees.

pub mod construct;
pub mod lp;
pub mod simplex;

use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::pebbling::{GameVariant, PebbleDag, PebbleMove, Weight};
use crate::tree::{NodeId, TreeShape};

pub use construct::{build_g, build_g_prime};
pub use lp::{lp_min_over_skeleton, skeleton_of, LpError, LpSolution, MoveSkeleton, StepKind};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Largest budget tried before giving up; `None` means unbounded.
    pub budget_cap: Option<Weight>,
    /// Limit on stored configurations.
    pub max_states: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget_cap: None, max_states: 40_000_000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub cost: Weight,
    pub witness: Vec<PebbleMove>,
    pub states_explored: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("no pebbling within the budget cap {cap}")]
    BudgetCapExceeded { cap: Weight },
    #[error("more than {limit} configurations needed")]
    StateSpaceTooLarge { limit: usize },
    #[error("configuration encoding needs {bits} bits (limit 128)")]
    EncodingTooWide { bits: usize },
    #[error("granularity {c} is invalid for the {variant} game")]
    BadGranularity { c: u32, variant: GameVariant },
}

/// Minimum cost of pebbling `dag` in `variant` with weights in multiples
/// of `1/c`, plus a witness realizing it.
pub fn min_pebbles(
    dag: &PebbleDag,
    variant: GameVariant,
    c: u32,
    options: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    if c == 0 || c > 15 || (variant.is_whole() && c != 1) {
        return Err(SearchError::BadGranularity { c, variant });
    }
    Searcher::new(dag, variant, c as u8)?.run(options)
}

pub fn min_pebbles_tree(
    shape: TreeShape,
    variant: GameVariant,
    c: u32,
    options: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    min_pebbles(&PebbleDag::from_tree(shape), variant, c, options)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum UnitMove {
    DecB(usize),
    IncW(usize),
    Finish { pos: usize, b: u8, w: u8 },
    Slide { pos: usize, child: usize },
}

struct Searcher {
    variant: GameVariant,
    c: u8,
    /// Node id at each position.
    node_of: Vec<NodeId>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    /// `(first child position, subtree size, degree)` for each internal
    /// tree node, deepest first; empty for general DAGs.
    blocks: Vec<(usize, usize, usize)>,
    bits: usize,
    code: Vec<Vec<u8>>,
    pair: Vec<(u8, u8)>,
}

struct Scratch {
    b: Vec<u8>,
    w: Vec<u8>,
    nb: Vec<u8>,
    nw: Vec<u8>,
    codes: Vec<u8>,
    dec: Vec<u8>,
}

impl Searcher {
    fn new(dag: &PebbleDag, variant: GameVariant, c: u8) -> Result<Self, SearchError> {
        let (node_of, blocks) = match dag.tree() {
            Some(shape) => tree_layout(shape),
            None => (dag.nodes().collect(), Vec::new()),
        };
        let mut pos_of = vec![0; dag.node_count() + 1];
        for (p, &v) in node_of.iter().enumerate() {
            pos_of[v] = p;
        }
        let children = node_of.iter().map(|&v| dag.children(v).iter().map(|&u| pos_of[u]).collect()).collect();
        let roots = dag.roots().iter().map(|&r| pos_of[r]).collect::<Vec<_>>();
        let mut code = vec![vec![u8::MAX; c as usize + 1]; c as usize + 1];
        let mut pair = Vec::new();
        for b in 0..=c {
            for w in 0..=c - b {
                code[b as usize][w as usize] = pair.len() as u8;
                pair.push((b, w));
            }
        }
        let bits = usize::BITS as usize - (pair.len() - 1).leading_zeros() as usize;
        let width = bits * node_of.len() + roots.len();
        if width > 128 {
            return Err(SearchError::EncodingTooWide { bits: width });
        }
        Ok(Searcher { variant, c, node_of, children, roots, blocks, bits, code, pair })
    }

    fn scratch(&self) -> Scratch {
        let n = self.node_of.len();
        Scratch {
            b: vec![0; n],
            w: vec![0; n],
            nb: vec![0; n],
            nw: vec![0; n],
            codes: vec![0; n],
            dec: Vec::new(),
        }
    }

    fn mask_shift(&self) -> usize {
        self.bits * self.node_of.len()
    }

    fn decode(&self, key: u128, b: &mut [u8], w: &mut [u8]) -> u32 {
        let m = (1u128 << self.bits) - 1;
        for p in 0..self.node_of.len() {
            let (x, y) = self.pair[((key >> (p * self.bits)) & m) as usize];
            b[p] = x;
            w[p] = y;
        }
        (key >> self.mask_shift()) as u32
    }

    /// Canonical key of `(b, w)` with root mask `mask`.
    fn encode(&self, b: &[u8], w: &[u8], mask: u32, codes: &mut [u8]) -> u128 {
        for p in 0..codes.len() {
            codes[p] = self.code[b[p] as usize][w[p] as usize];
        }
        for &(start, len, d) in &self.blocks {
            sort_blocks(&mut codes[start..start + len * d], len, d);
        }
        let mut key = (mask as u128) << self.mask_shift();
        for (p, &x) in codes.iter().enumerate() {
            key |= (x as u128) << (p * self.bits);
        }
        key
    }

    fn mask_after(&self, mask: u32, b: &[u8]) -> u32 {
        let mut mask = mask;
        for (i, &r) in self.roots.iter().enumerate() {
            if b[r] == self.c {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Emits every successor of `key` whose total is within `budget`, and
    /// returns the least larger budget that would admit new successors.
    fn expand(
        &self,
        key: u128,
        budget: u32,
        s: &mut Scratch,
        emit: &mut dyn FnMut(&UnitMove, &[u8], u128),
    ) -> Option<u32> {
        let mask = self.decode(key, &mut s.b, &mut s.w);
        let c = self.c;
        let total: u32 = s.b.iter().chain(&s.w).map(|&x| x as u32).sum();
        let mut pending: Option<u32> = None;
        let mut defer = |t: u32| pending = Some(pending.map_or(t, |p| p.min(t)));
        let n = self.node_of.len();
        let slide = self.variant == GameVariant::FractionalWhiteSlide;
        for p in 0..n {
            let (b, w) = (s.b[p], s.w[p]);
            if b > 0 {
                s.nb.copy_from_slice(&s.b);
                s.nb[p] -= 1;
                let k = self.encode(&s.nb, &s.w, mask, &mut s.codes);
                emit(&UnitMove::DecB(p), &[], k);
            }
            if self.variant.allows_white() && b + w < c {
                if total < budget {
                    s.nw.copy_from_slice(&s.w);
                    s.nw[p] += 1;
                    let k = self.encode(&s.b, &s.nw, mask, &mut s.codes);
                    emit(&UnitMove::IncW(p), &[], k);
                } else {
                    defer(total + 1);
                }
            }
            let ch = &self.children[p];
            if !ch.iter().all(|&q| s.b[q] + s.w[q] == c) {
                continue;
            }
            let child_black: u32 = ch.iter().map(|&q| s.b[q] as u32).sum();
            let white_options = if slide { 0..=w } else { 0..=0 };
            for nw in white_options {
                let top = if ch.is_empty() { (b + 1).min(c - nw) } else { c - nw };
                for nb in b..=top {
                    if nb == b && nw == w {
                        continue;
                    }
                    let nt = total + nb as u32 + nw as u32 - b as u32 - w as u32;
                    if nt > budget {
                        defer((nt - child_black).max(budget + 1));
                        if nt - child_black > budget {
                            continue;
                        }
                    }
                    let excess = nt.saturating_sub(budget);
                    s.dec.clear();
                    s.dec.resize(ch.len(), 0);
                    let mv = UnitMove::Finish { pos: p, b: nb, w: nw };
                    self.tight_decs(p, 0, excess, &mv, mask, s, emit);
                }
            }
            if slide && w > 0 {
                for (i, &j) in ch.iter().enumerate() {
                    let siblings_full = ch.iter().enumerate().all(|(x, &q)| x == i || s.b[q] + s.w[q] == c);
                    let missing = c - s.b[j] - s.w[j];
                    if siblings_full && w >= missing && missing > 0 {
                        s.nw.copy_from_slice(&s.w);
                        s.nw[p] = 0;
                        s.nw[j] += missing;
                        let k = self.encode(&s.b, &s.nw, mask, &mut s.codes);
                        emit(&UnitMove::Slide { pos: p, child: j }, &[], k);
                    }
                }
            }
        }
        pending
    }

    /// Enumerates child decrements summing to exactly `left`.
    #[allow(clippy::too_many_arguments)]
    fn tight_decs(
        &self,
        p: usize,
        i: usize,
        left: u32,
        mv: &UnitMove,
        mask: u32,
        s: &mut Scratch,
        emit: &mut dyn FnMut(&UnitMove, &[u8], u128),
    ) {
        let ch = &self.children[p];
        if i == ch.len() {
            if left > 0 {
                return;
            }
            let UnitMove::Finish { b, w, .. } = *mv else { unreachable!() };
            s.nb.copy_from_slice(&s.b);
            s.nw.copy_from_slice(&s.w);
            s.nb[p] = b;
            s.nw[p] = w;
            for (x, &q) in ch.iter().enumerate() {
                s.nb[q] -= s.dec[x];
            }
            let mask = self.mask_after(mask, &s.nb);
            let k = self.encode(&s.nb, &s.nw, mask, &mut s.codes);
            let dec = std::mem::take(&mut s.dec);
            emit(mv, &dec, k);
            s.dec = dec;
            return;
        }
        let rest: u32 = ch[i + 1..].iter().map(|&q| s.b[q] as u32).sum();
        let avail = s.b[ch[i]] as u32;
        for x in left.saturating_sub(rest)..=avail.min(left) {
            s.dec[i] = x as u8;
            self.tight_decs(p, i + 1, left - x, mv, mask, s, emit);
        }
        s.dec[i] = 0;
    }

    fn run(&self, options: &SearchOptions) -> Result<SearchResult, SearchError> {
        let c = self.c as u32;
        let cap_units = options.budget_cap.map(|cap| {
            let scaled = cap * Weight::from_integer(c as i64);
            scaled.floor().to_integer().max(0) as u32
        });
        let mut s = self.scratch();
        let n = self.node_of.len();
        let zeros = vec![0u8; n];
        let start = self.encode(&zeros, &zeros, 0, &mut s.codes);
        let goal = self.encode(&zeros, &zeros, (1u32 << self.roots.len()) - 1, &mut s.codes);
        let mut index: FxHashMap<u128, u32> = FxHashMap::default();
        let mut keys = vec![start];
        let mut parent = vec![u32::MAX];
        let mut found_at = vec![0u32];
        index.insert(start, 0);
        let mut pending: Vec<Vec<u32>> = Vec::new();
        let mut queue: VecDeque<u32> = VecDeque::from([0]);
        let mut budget = 0u32;
        let goal_id;
        'outer: loop {
            while let Some(id) = queue.pop_front() {
                let key = keys[id as usize];
                let mut fresh = Vec::new();
                let later = self.expand(key, budget, &mut s, &mut |_, _, k| {
                    if !index.contains_key(&k) {
                        fresh.push(k);
                    }
                });
                for k in fresh {
                    if index.contains_key(&k) {
                        continue;
                    }
                    let new_id = keys.len() as u32;
                    index.insert(k, new_id);
                    keys.push(k);
                    parent.push(id);
                    found_at.push(budget);
                    if k == goal {
                        goal_id = new_id;
                        break 'outer;
                    }
                    queue.push_back(new_id);
                }
                if keys.len() > options.max_states {
                    return Err(SearchError::StateSpaceTooLarge { limit: options.max_states });
                }
                if let Some(t) = later {
                    let t = t as usize;
                    if pending.len() <= t {
                        pending.resize_with(t + 1, Vec::new);
                    }
                    pending[t].push(id);
                }
            }
            budget += 1;
            if cap_units.is_some_and(|cap| budget > cap) || budget as usize >= pending.len() {
                let cap = options.budget_cap.unwrap_or_else(|| Weight::new(budget as i64 - 1, c as i64));
                return Err(SearchError::BudgetCapExceeded { cap });
            }
            queue.extend(std::mem::take(&mut pending[budget as usize]));
        }
        let mut path = vec![goal_id];
        while parent[*path.last().expect("nonempty") as usize] != u32::MAX {
            path.push(parent[*path.last().expect("nonempty") as usize]);
        }
        path.reverse();
        let witness = self.realize(&path, &keys, &found_at, &mut s);
        Ok(SearchResult { cost: Weight::new(budget as i64, c as i64), witness, states_explored: keys.len() })
    }

    /// Replays a path of canonical keys as concrete moves on the real tree.
    fn realize(&self, path: &[u32], keys: &[u128], found_at: &[u32], s: &mut Scratch) -> Vec<PebbleMove> {
        let n = self.node_of.len();
        let mut b = vec![0u8; n];
        let mut w = vec![0u8; n];
        let mut mask = 0u32;
        let mut moves = Vec::with_capacity(path.len());
        for pair in path.windows(2) {
            let target = keys[pair[1] as usize];
            let budget = found_at[pair[1] as usize];
            let real = {
                let mut raw = vec![0u8; n];
                for p in 0..n {
                    raw[p] = self.code[b[p] as usize][w[p] as usize];
                }
                let mut key = (mask as u128) << self.mask_shift();
                for (p, &x) in raw.iter().enumerate() {
                    key |= (x as u128) << (p * self.bits);
                }
                key
            };
            let mut chosen: Option<(UnitMove, Vec<u8>)> = None;
            self.expand(real, budget, s, &mut |mv, dec, k| {
                if chosen.is_none() && k == target {
                    chosen = Some((*mv, dec.to_vec()));
                }
            });
            let (mv, dec) = chosen.expect("canonical successor has a concrete preimage");
            moves.push(self.apply_unit(&mv, &dec, &mut b, &mut w));
            mask = self.mask_after(mask, &b);
        }
        moves
    }

    fn apply_unit(&self, mv: &UnitMove, dec: &[u8], b: &mut [u8], w: &mut [u8]) -> PebbleMove {
        let c = self.c as i64;
        let unit = |x: u8| Weight::new(x as i64, c);
        match *mv {
            UnitMove::DecB(p) => {
                b[p] -= 1;
                PebbleMove::DecreaseBlack { node: self.node_of[p], amount: unit(1) }
            }
            UnitMove::IncW(p) => {
                w[p] += 1;
                PebbleMove::IncreaseWhite { node: self.node_of[p], amount: unit(1) }
            }
            UnitMove::Finish { pos, b: nb, w: nw } => {
                b[pos] = nb;
                w[pos] = nw;
                let mut decrease = Vec::new();
                for (&q, &x) in self.children[pos].iter().zip(dec) {
                    if x > 0 {
                        b[q] -= x;
                        decrease.push((self.node_of[q], unit(x)));
                    }
                }
                PebbleMove::Finish { node: self.node_of[pos], black: unit(nb), white: unit(nw), decrease }
            }
            UnitMove::Slide { pos, child } => {
                w[child] = self.c - b[child];
                w[pos] = 0;
                PebbleMove::WhiteSlide { node: self.node_of[pos], child: self.node_of[child] }
            }
        }
    }
}

/// Preorder positions of a complete tree and the sibling blocks to sort.
fn tree_layout(shape: TreeShape) -> (Vec<NodeId>, Vec<(usize, usize, usize)>) {
    let mut order = Vec::with_capacity(shape.node_count());
    let mut stack = vec![1];
    while let Some(v) = stack.pop() {
        order.push(v);
        if !shape.is_leaf(v) {
            stack.extend(shape.children(v).rev());
        }
    }
    let mut blocks = Vec::new();
    for (p, &v) in order.iter().enumerate().rev() {
        if !shape.is_leaf(v) {
            let len = (shape.subtree_nodes(v).len() - 1) / shape.d;
            blocks.push((p + 1, len, shape.d));
        }
    }
    (order, blocks)
}

/// Sorts `d` consecutive blocks of length `len` lexicographically.
fn sort_blocks(slice: &mut [u8], len: usize, d: usize) {
    for i in 1..d {
        let mut j = i;
        while j > 0 && slice[(j - 1) * len..j * len] > slice[j * len..(j + 1) * len] {
            let (a, b) = slice.split_at_mut(j * len);
            a[(j - 1) * len..].swap_with_slice(&mut b[..len]);
            j -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pebbling::{validate_sequence, w};

    fn check(d: usize, h: usize, variant: GameVariant, c: u32) -> Weight {
        let shape = TreeShape::new(d, h);
        let r = min_pebbles_tree(shape, variant, c, &SearchOptions::default()).unwrap();
        let dag = PebbleDag::from_tree(shape);
        let report = validate_sequence(&dag, &r.witness, variant).unwrap();
        assert_eq!(report.cost, r.cost, "witness cost for d={d} h={h} {variant} c={c}");
        r.cost
    }

    #[test]
    fn small_black_and_bw() {
        assert_eq!(check(2, 2, GameVariant::Black, 1), w(2, 1));
        assert_eq!(check(2, 3, GameVariant::Black, 1), w(3, 1));
        assert_eq!(check(3, 2, GameVariant::Black, 1), w(3, 1));
        assert_eq!(check(2, 3, GameVariant::BlackWhite, 1), w(3, 1));
        assert_eq!(check(2, 4, GameVariant::BlackWhite, 1), w(3, 1));
    }

    #[test]
    fn fractional_h3() {
        assert_eq!(check(2, 3, GameVariant::Fractional, 2), w(5, 2));
        assert_eq!(check(2, 3, GameVariant::Fractional, 1), w(3, 1));
    }

    #[test]
    fn block_sorting() {
        let mut x = vec![3, 1, 2, 0, 1, 1];
        sort_blocks(&mut x, 2, 3);
        assert_eq!(x, vec![1, 1, 2, 0, 3, 1]);
    }

    #[test]
    fn cap_and_granularity_errors() {
        let shape = TreeShape::new(2, 3);
        let opts = SearchOptions { budget_cap: Some(w(2, 1)), ..Default::default() };
        assert_eq!(
            min_pebbles_tree(shape, GameVariant::Black, 1, &opts).unwrap_err(),
            SearchError::BudgetCapExceeded { cap: w(2, 1) }
        );
        assert!(matches!(
            min_pebbles_tree(shape, GameVariant::Black, 2, &SearchOptions::default()),
            Err(SearchError::BadGranularity { .. })
        ));
        let opts = SearchOptions { max_states: 10, ..Default::default() };
        assert!(matches!(
            min_pebbles_tree(shape, GameVariant::Black, 1, &opts),
            Err(SearchError::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn g_prime_small() {
        let dag = build_g_prime(2, 2, 2);
        let r = min_pebbles(&dag, GameVariant::Black, 1, &SearchOptions::default()).unwrap();
        validate_sequence(&dag, &r.witness, GameVariant::Black).unwrap();
        // c[(d-1)(h-1)+1] = 2*2
        assert_eq!(r.cost, w(4, 1));
    }
}
