//! Reproduction tables: pebbling numbers, state counts with fitted growth
//! exponents, and Nečiporuk lower bounds.

use std::path::PathBuf;
use std::thread;

use clap::Args;
use serde_json::json;

use treeval::bounds::{consistency_check, neciporuk_table};
use treeval::bp::growth_exponent;
use treeval::compile::{compile_black_default, compile_boolean_logsave, compile_fractional_default, default_block_size};
use treeval::instance::ProblemKind;
use treeval::pebbling::strategies::{black_cost, bw_cost, fractional_cost};
use treeval::pebbling::{GameVariant, Weight};
use treeval::search::{min_pebbles_tree, SearchOptions};
use treeval::tree::TreeShape;

use super::{usage, write, CliError, Output};

#[derive(Args)]
pub struct ReportArgs {
    /// Directory for the CSV and markdown files.
    #[arg(long)]
    out: PathBuf,
    /// Tree for the state-count and lower-bound tables.
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    h: usize,
    /// State counts for k = 2..=k_max.
    #[arg(long, default_value_t = 8)]
    k_max: usize,
    /// Pebbling numbers for binary trees of height 2..=h_max.
    #[arg(long, default_value_t = 5)]
    h_max: usize,
    /// Per-cell limit on stored search configurations.
    #[arg(long, default_value_t = 5_000_000)]
    max_states: usize,
}

struct Cell {
    d: usize,
    h: usize,
    variant: GameVariant,
    c: u32,
}

fn formula(cell: &Cell) -> Weight {
    match cell.variant {
        GameVariant::Black => black_cost(cell.d, cell.h),
        GameVariant::BlackWhite => bw_cost(cell.d, cell.h),
        _ => fractional_cost(cell.d, cell.h),
    }
}

/// Runs `f` on every item on its own thread; results keep input order.
fn pool<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|item| s.spawn(|| f(item))).collect();
        handles.into_iter().map(|h| h.join().expect("report cell panicked")).collect()
    })
}

pub fn run(a: ReportArgs) -> Result<Output, CliError> {
    if a.d < 2 || a.h < 2 || a.k_max < 4 || a.h_max < 2 {
        return Err(usage("need --d >= 2, --h >= 2, --k-max >= 4, --h-max >= 2"));
    }
    std::fs::create_dir_all(&a.out).map_err(|e| usage(format!("cannot create {}: {e}", a.out.display())))?;
    let args: Vec<String> = std::env::args().skip(1).collect();
    let header = format!("# treeval {}\n", args.join(" "));

    // Pebbling numbers.
    let mut cells = Vec::new();
    for h in 2..=a.h_max {
        cells.push(Cell { d: 2, h, variant: GameVariant::Black, c: 1 });
        cells.push(Cell { d: 2, h, variant: GameVariant::BlackWhite, c: 1 });
    }
    for h in 2..=a.h_max.min(4) {
        cells.push(Cell { d: 2, h, variant: GameVariant::Fractional, c: 2 });
        cells.push(Cell { d: 3, h, variant: GameVariant::Black, c: 1 });
    }
    for h in 2..=a.h_max.min(3) {
        cells.push(Cell { d: 3, h, variant: GameVariant::BlackWhite, c: 1 });
    }
    let options = SearchOptions { budget_cap: None, max_states: a.max_states };
    let results = pool(&cells, |cell| {
        min_pebbles_tree(TreeShape::new(cell.d, cell.h), cell.variant, cell.c, &options)
    });
    let mut csv = format!("{header}d,h,variant,c,search,formula,match\n");
    let mut md = format!("{header}\n| d | h | variant | c | search | formula | match |\n|---|---|---|---|---|---|---|\n");
    for (cell, r) in cells.iter().zip(&results) {
        let f = formula(cell);
        let (found, ok) = match r {
            Ok(r) => (r.cost.to_string(), (r.cost == f).to_string()),
            Err(e) => (format!("error: {e}"), "n/a".into()),
        };
        csv.push_str(&format!("{},{},{},{},{found},{f},{ok}\n", cell.d, cell.h, cell.variant, cell.c));
        md.push_str(&format!("| {} | {} | {} | {} | {found} | {f} | {ok} |\n", cell.d, cell.h, cell.variant, cell.c));
    }
    write(&a.out.join("pebbling.csv"), &csv)?;
    write(&a.out.join("pebbling.md"), &md)?;

    // State counts.
    let ks: Vec<usize> = (2..=a.k_max).collect();
    let (d, h) = (a.d, a.h);
    let counts = pool(&ks, |&k| {
        let det = compile_black_default(d, h, k, ProblemKind::Function).map(|p| p.0.size());
        let nondet = compile_fractional_default(d, h, k).map(|p| p.0.size());
        let logsave = compile_boolean_logsave(d, h, k, default_block_size(d, k)).map(|p| p.0.size());
        (k, det, nondet, logsave)
    });
    let mut csv = format!("{header}k,deterministic,nondeterministic,logsave\n");
    let mut md = format!(
        "{header}\nStates at d={d}, h={h}\n\n| k | deterministic | nondeterministic | logsave |\n|---|---|---|---|\n"
    );
    let show = |r: &Result<usize, _>| match r {
        Ok(n) => n.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let mut series = [vec![], vec![], vec![]];
    for (k, det, nondet, logsave) in &counts {
        for (s, r) in series.iter_mut().zip([det, nondet, logsave]) {
            if let Ok(n) = r {
                s.push((*k, *n));
            }
        }
        let row = [show(det), show(nondet), show(logsave)];
        csv.push_str(&format!("{k},{}\n", row.join(",")));
        md.push_str(&format!("| {k} | {} |\n", row.join(" | ")));
    }
    let fits: Vec<String> = series
        .iter()
        .map(|s| growth_exponent(s).map(|e| format!("{e:.3}")).unwrap_or_else(|e| format!("error: {e}")))
        .collect();
    csv.push_str(&format!("exponent,{}\n", fits.join(",")));
    md.push_str(&format!("| fitted exponent | {} |\n", fits.join(" | ")));
    write(&a.out.join("exponents.csv"), &csv)?;
    write(&a.out.join("exponents.md"), &md)?;

    // Lower bounds.
    let tables = pool(&ks, |&k| (neciporuk_table(d, h, k), consistency_check(d, h, k)));
    let mut csv = format!("{header}k,machine,problem,formula,value,tight_at_h3\n");
    let mut md = header.clone();
    for (table, check) in &tables {
        for line in table.to_csv().lines().skip(1) {
            csv.push_str(&format!("{},{line}\n", table.k));
        }
        md.push('\n');
        md.push_str(&table.to_markdown());
        md.push_str(&match check {
            Ok(r) => format!(
                "\nconsistency: deterministic {} >= {:.3}, nondeterministic {} >= {:.3}\n",
                r.det_states, r.det_bound, r.nondet_states, r.nondet_bound
            ),
            Err(e) => format!("\nconsistency: FAILED: {e}\n"),
        });
    }
    write(&a.out.join("neciporuk.csv"), &csv)?;
    write(&a.out.join("neciporuk.md"), &md)?;

    let mismatches = results
        .iter()
        .zip(&cells)
        .filter(|(r, cell)| r.as_ref().map(|r| r.cost != formula(cell)).unwrap_or(false))
        .count();
    let violations = tables.iter().filter(|(_, c)| c.is_err()).count();
    let files = ["pebbling", "exponents", "neciporuk"];
    let text = format!(
        "wrote {} (pebbling cells: {}, mismatches: {mismatches}; exponents det/nondet/logsave: {}; consistency violations: {violations})\n",
        a.out.display(),
        cells.len(),
        fits.join("/")
    );
    let out = json!({
        "dir": a.out.display().to_string(),
        "files": files,
        "pebbling_mismatches": mismatches,
        "exponents": fits,
        "consistency_violations": violations,
    });
    if mismatches > 0 || violations > 0 {
        return Err(CliError::Failed(text));
    }
    Ok(Output { text, json: out })
}
