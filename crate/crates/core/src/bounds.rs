//! Nečiporuk lower bounds for tree evaluation.
//!
//! The variable partition groups, for every sibling group below the root and
//! every child tuple, the `d` entries `f_i(j), ..., f_{i+d-1}(j)` into one
//! litter. Each litter induces `|R|^(k^d)` subfunctions, so a correct program
//! needs at least `min { s : N(s, d) >= |R|^(k^d) }` states querying it.
//!
//! Closed-form table entries are kept symbolically as
//! `coefficient * k^a * (log2 k)^b` and evaluated in `f64` (relative error
//! below `1e-12` for the parameter ranges used here).

use std::fmt;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::compile::{compile_black_default, compile_fractional_default, CompileError};
use crate::instance::ProblemKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Machine {
    DetKway,
    DetBinary,
    NondetKway,
    NondetBinary,
}

impl Machine {
    pub const ALL: [Machine; 4] = [Machine::DetKway, Machine::DetBinary, Machine::NondetKway, Machine::NondetBinary];

    pub fn deterministic(self) -> bool {
        matches!(self, Machine::DetKway | Machine::DetBinary)
    }

    /// Out-degree of a state: `k` for k-way programs, 2 for binary ones.
    pub fn arity(self, k: usize) -> usize {
        match self {
            Machine::DetKway | Machine::NondetKway => k,
            Machine::DetBinary | Machine::NondetBinary => 2,
        }
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Machine::DetKway => "deterministic k-way",
            Machine::DetBinary => "deterministic binary",
            Machine::NondetKway => "nondeterministic k-way",
            Machine::NondetBinary => "nondeterministic binary",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BoundModel {
    pub machine: Machine,
    pub problem: ProblemKind,
}

impl BoundModel {
    pub fn new(machine: Machine, problem: ProblemKind) -> Self {
        BoundModel { machine, problem }
    }

    /// `|R|`: `k` for the function problem, 2 for the Boolean one.
    pub fn outputs(&self, k: usize) -> usize {
        match self.problem {
            ProblemKind::Function => k,
            ProblemKind::Boolean => 2,
        }
    }
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

fn pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(big(base), exp)
}

/// Upper bound on the number of programs with `s` non-final states over `v`
/// variables: `v^s (s+|R|)^(s a)` (deterministic) or
/// `v^s (|R|+1)^(s a) 2^(s s a)` (nondeterministic), `a` the arity.
pub fn count_programs(model: BoundModel, s: usize, v: usize, k: usize) -> BigUint {
    let r = model.outputs(k);
    let a = model.machine.arity(k);
    if model.machine.deterministic() {
        pow(v, s) * pow(s + r, s * a)
    } else {
        pow(v, s) * pow(r + 1, s * a) * (BigUint::one() << (s * s * a))
    }
}

/// Least `s >= 1` with `count_programs(model, s, v, k) >= required`, by
/// doubling and then binary search.
pub fn min_states_for_restrictions(model: BoundModel, v: usize, k: usize, required: &BigUint) -> usize {
    let fits = |s: usize| count_programs(model, s, v, k) >= *required;
    if fits(1) {
        return 1;
    }
    let mut hi = 2;
    while !fits(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // Invariant: !fits(lo) && fits(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Number of litters: `k^d (d^(h-2) - 1) / (d - 1)`.
pub fn litter_count(d: usize, h: usize, k: usize) -> BigUint {
    if h < 2 {
        return BigUint::zero();
    }
    pow(k, d) * (pow(d, h - 2) - BigUint::one()) / big(d - 1)
}

/// Subfunctions induced on one litter: `|R|^(k^d)`.
pub fn litter_restrictions(model: BoundModel, d: usize, k: usize) -> BigUint {
    pow(model.outputs(k), k.pow(d as u32))
}

/// `coefficient * k^k_exponent * (log2 k)^log_exponent`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEntry {
    pub model: BoundModel,
    #[serde(serialize_with = "ser_ratio")]
    pub coefficient: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub k_exponent: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub log_exponent: Rational64,
    pub value: f64,
    /// Optimal in `k` at height 3.
    pub tight_at_height_3: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn as_f64(r: Rational64) -> f64 {
    r.to_f64().expect("finite rational")
}

impl BoundEntry {
    pub fn formula(&self) -> String {
        let mut out = format!("{} * k^{}", self.coefficient, self.k_exponent);
        if !self.log_exponent.is_zero() {
            out.push_str(&format!(" * log2(k)^{}", self.log_exponent));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    pub d: usize,
    pub h: usize,
    pub k: usize,
    pub litters: String,
    /// At `h = 2` there are no litters and every entry is 0.
    pub vacuous: bool,
    pub entries: Vec<BoundEntry>,
}

impl BoundTable {
    pub fn entry(&self, machine: Machine, problem: ProblemKind) -> &BoundEntry {
        self.entries
            .iter()
            .find(|e| e.model == BoundModel::new(machine, problem))
            .expect("table has every model")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("machine,problem,formula,value,tight_at_h3\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{:.6},{}\n",
                e.model.machine,
                problem_name(e.model.problem),
                e.formula(),
                e.value,
                e.tight_at_height_3
            ));
        }
        out
    }

    /// Rows are machines, columns FT and BT; tight entries are bracketed.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("Lower bounds at d={}, h={}, k={} ({} litters)", self.d, self.h, self.k, self.litters);
        if self.vacuous {
            out.push_str(", method vacuous at h=2");
        }
        out.push_str("\n\n| machine | FT | BT |\n|---|---|---|\n");
        for m in Machine::ALL {
            let cell = |p| {
                let e = self.entry(m, p);
                if e.tight_at_height_3 {
                    format!("[{:.3}]", e.value)
                } else {
                    format!("{:.3}", e.value)
                }
            };
            out.push_str(&format!("| {m} | {} | {} |\n", cell(ProblemKind::Function), cell(ProblemKind::Boolean)));
        }
        out
    }
}

fn problem_name(p: ProblemKind) -> &'static str {
    match p {
        ProblemKind::Function => "FT",
        ProblemKind::Boolean => "BT",
    }
}

/// Evaluates the eight closed-form bounds.
pub fn neciporuk_table(d: usize, h: usize, k: usize) -> BoundTable {
    assert!(d >= 2 && h >= 2 && k >= 2, "need d, h, k >= 2");
    let di = d as i64;
    let tree = Rational64::from_integer(di.pow(h as u32 - 2) - 1);
    let r = |n: i64, m: i64| Rational64::new(n, m);
    let log_k = (k as f64).log2();
    use Machine::*;
    use ProblemKind::*;
    // (machine, problem, coefficient divisor, k exponent, log exponent, tight)
    let rows = [
        (DetKway, Function, 4 * (di - 1) * (di - 1), r(2 * di - 1, 1), r(0, 1), true),
        (DetKway, Boolean, 3 * (di - 1) * (di - 1), r(2 * di - 1, 1), r(-1, 1), true),
        (DetBinary, Function, 5 * (di - 1) * (di - 1), r(2 * di, 1), r(0, 1), false),
        (DetBinary, Boolean, 4 * di * (di - 1), r(2 * di, 1), r(-1, 1), false),
        (NondetKway, Function, 2 * di - 2, r(3 * di - 1, 2), r(1, 2), false),
        (NondetKway, Boolean, 2 * di - 2, r(3 * di - 1, 2), r(0, 1), true),
        (NondetBinary, Function, 2 * di - 2, r(3 * di, 2), r(1, 2), false),
        (NondetBinary, Boolean, 2 * di - 2, r(3 * di, 2), r(0, 1), false),
    ];
    let entries = rows
        .into_iter()
        .map(|(machine, problem, div, k_exponent, log_exponent, tight)| {
            let coefficient = tree / div;
            let value = as_f64(coefficient) * (k as f64).powf(as_f64(k_exponent)) * log_k.powf(as_f64(log_exponent));
            BoundEntry {
                model: BoundModel::new(machine, problem),
                coefficient,
                k_exponent,
                log_exponent,
                value,
                tight_at_height_3: tight,
            }
        })
        .collect();
    BoundTable { d, h, k, litters: litter_count(d, h, k).to_string(), vacuous: h == 2, entries }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub d: usize,
    pub h: usize,
    pub k: usize,
    pub det_states: usize,
    pub det_bound: f64,
    pub nondet_states: usize,
    pub nondet_bound: f64,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("{machine} program has {states} states, below the lower bound {bound}")]
    ConsistencyViolation { machine: Machine, states: usize, bound: f64 },
    #[error(transparent)]
    Compile(#[from] CompileError),
}

/// Compiled upper bounds must dominate the matching lower bounds:
/// deterministic programs for FT and nondeterministic ones for BT.
pub fn consistency_check(d: usize, h: usize, k: usize) -> Result<ConsistencyReport, BoundsError> {
    let table = neciporuk_table(d, h, k);
    let det_bound = table.entry(Machine::DetKway, ProblemKind::Function).value;
    let nondet_bound = table.entry(Machine::NondetKway, ProblemKind::Boolean).value;
    let det_states = compile_black_default(d, h, k, ProblemKind::Function)?.0.size();
    let nondet_states = compile_fractional_default(d, h, k)?.0.size();
    if (det_states as f64) < det_bound {
        return Err(BoundsError::ConsistencyViolation { machine: Machine::DetKway, states: det_states, bound: det_bound });
    }
    if (nondet_states as f64) < nondet_bound {
        return Err(BoundsError::ConsistencyViolation {
            machine: Machine::NondetKway,
            states: nondet_states,
            bound: nondet_bound,
        });
    }
    Ok(ConsistencyReport { d, h, k, det_states, det_bound, nondet_states, nondet_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ProblemKind::*;

    fn linear_scan(model: BoundModel, v: usize, k: usize, required: &BigUint) -> usize {
        (1..).find(|&s| count_programs(model, s, v, k) >= *required).expect("unbounded")
    }

    #[test]
    fn counting_spot_values() {
        assert_eq!(count_programs(BoundModel::new(Machine::DetKway, Boolean), 1, 1, 2), big(9));
        assert_eq!(count_programs(BoundModel::new(Machine::NondetKway, Boolean), 1, 1, 2), big(36));
    }

    #[test]
    fn min_states_spot_values() {
        let m = BoundModel::new(Machine::NondetKway, Function);
        assert_eq!(min_states_for_restrictions(m, 2, 16, &BigUint::one()), 1);
        let s = min_states_for_restrictions(m, 2, 16, &litter_restrictions(m, 2, 16));
        assert!(s >= 4, "s = {s}");
        let det = BoundModel::new(Machine::DetKway, Boolean);
        let req = litter_restrictions(det, 2, 8);
        assert_eq!(min_states_for_restrictions(det, 2, 8, &req), linear_scan(det, 2, 8, &req));
    }

    #[test]
    fn table_spot_values() {
        let t = neciporuk_table(2, 3, 4);
        assert_eq!(t.entry(Machine::NondetKway, Boolean).value, 16.0);
        assert_eq!(t.entry(Machine::DetKway, Function).value, 16.0);
        assert_eq!(t.litters, "16");
        assert!(!t.vacuous);
        let t2 = neciporuk_table(3, 2, 5);
        assert!(t2.vacuous);
        assert!(t2.entries.iter().all(|e| e.value == 0.0));
        assert_eq!(litter_count(3, 2, 5), BigUint::zero());
    }

    #[test]
    fn table_scales_with_k() {
        for d in 2..=3 {
            let (a, b) = (neciporuk_table(d, 4, 64), neciporuk_table(d, 4, 128));
            for (x, y) in a.entries.iter().zip(&b.entries) {
                let log_ratio = (7.0f64 / 6.0).powf(as_f64(x.log_exponent));
                let expected = 2f64.powf(as_f64(x.k_exponent)) * log_ratio;
                assert!((y.value / x.value / expected - 1.0).abs() < 0.01, "{:?}", x.model);
            }
        }
    }

    #[test]
    fn consistency_small() {
        for (d, h, k) in [(2, 3, 2), (2, 3, 4), (2, 3, 8), (2, 2, 3)] {
            let r = consistency_check(d, h, k).unwrap();
            assert!(r.nondet_states as f64 >= r.nondet_bound);
        }
        assert!(consistency_check(2, 3, 4).unwrap().nondet_states >= 16);
    }

    #[test]
    fn markdown_layout() {
        let md = neciporuk_table(2, 3, 4).to_markdown();
        assert!(md.contains("| deterministic k-way | [16.000] |"));
        assert_eq!(neciporuk_table(2, 3, 4).to_csv().lines().count(), 9);
    }
}
