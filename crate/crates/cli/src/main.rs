//! `treeval`: tree evaluation, pebbling, search and branching programs.
//!
//! Exit codes: 0 on success, 1 when a verification finds a counterexample,
//! 2 on usage or input errors.

mod report;

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use treeval::bp::{
    check_correct, check_thrifty, export_dot, parse_dot, BranchingProgram, CheckMode,
};
use treeval::compile::{
    compile_black_det, compile_boolean_logsave, compile_fractional_nondet, default_block_size, CompilationReport,
};
use treeval::instance::{random_instance, ProblemKind, TepInstance};
use treeval::pebbling::sequence::trace;
use treeval::pebbling::strategies::{
    strategy_black, strategy_bw, strategy_fractional, strategy_whiteslide_h4,
};
use treeval::pebbling::{
    format_sequence, parse_sequence, parse_weight, validate_sequence, GameVariant, PebbleDag, PebbleMove, Weight,
};
use treeval::search::{build_g, build_g_prime, lp_min_over_skeleton, min_pebbles, skeleton_of, SearchOptions};
use treeval::single::to_single_function;
use treeval::tree::TreeShape;

#[derive(Parser)]
#[command(name = "treeval", version, about = "Tree evaluation, pebbling games and branching programs")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an instance (from a file, or random from a seed).
    Eval(EvalArgs),
    /// Pebbling games on trees.
    #[command(subcommand)]
    Pebble(PebbleCommand),
    /// Exact minimum pebbling of G, G', a tree, or an edge-list DAG.
    Search(SearchArgs),
    /// Compile a pebbling strategy into a branching program.
    Compile(CompileArgs),
    /// Check a program's output on every (or sampled) input.
    Verify(CheckArgs),
    /// Check that a program only queries functions at true child values.
    Thrifty(CheckArgs),
    /// Write pebbling, state-count and lower-bound tables.
    Report(report::ReportArgs),
    /// Render a program as DOT.
    ExportDot(ExportArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with = "seed")]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    h: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Random instance seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Kind::Function)]
    kind: Kind,
    /// Also evaluate the shared-function reduction.
    #[arg(long)]
    single: bool,
}

#[derive(Subcommand)]
enum PebbleCommand {
    /// Minimum cost and a witness for the complete tree.
    Find(FindArgs),
    /// Validate a move sequence and print its cost.
    Verify(SequenceArgs),
    /// Print every configuration of a sequence or generated strategy.
    Show(SequenceArgs),
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    h: usize,
}

impl TreeArgs {
    fn shape(&self) -> Result<TreeShape, CliError> {
        if self.d < 2 || self.h < 1 {
            return Err(usage("need --d >= 2 and --h >= 1"));
        }
        Ok(TreeShape::new(self.d, self.h))
    }
}

#[derive(Args)]
struct FindArgs {
    #[command(flatten)]
    tree: TreeArgs,
    /// black, bw, fractional or whiteslide.
    #[arg(long, default_value = "black")]
    variant: GameVariant,
    /// Weight granularity 1/c (default 1 for whole games, 2 otherwise).
    #[arg(long)]
    c: Option<u32>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Args)]
struct LimitArgs {
    /// Largest budget to try.
    #[arg(long, value_parser = parse_weight)]
    budget_cap: Option<Weight>,
    /// Largest number of stored configurations.
    #[arg(long, default_value_t = 40_000_000)]
    max_states: usize,
}

impl LimitArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions { budget_cap: self.budget_cap, max_states: self.max_states }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Black,
    Bw,
    Fractional,
    Whiteslide,
}

#[derive(Args)]
struct SequenceArgs {
    #[command(flatten)]
    tree: TreeArgs,
    #[arg(long, default_value = "black")]
    variant: GameVariant,
    /// Move file, one move per line.
    #[arg(long, required_unless_present = "strategy")]
    sequence: Option<PathBuf>,
    /// Use a generated strategy instead of a file.
    #[arg(long, value_enum, conflicts_with = "sequence")]
    strategy: Option<Strategy>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Graph {
    Tree,
    G,
    Gprime,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = Graph::Gprime)]
    graph: Graph,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    h: usize,
    /// Copies per tree node for G and G'; granularity for trees.
    #[arg(long, default_value_t = 2)]
    c: u32,
    #[arg(long, default_value = "black")]
    variant: GameVariant,
    /// Edge-list DAG file (`parent child` per line) instead of --graph.
    #[arg(long)]
    dag: Option<PathBuf>,
    /// Optimise the weights of this sequence's move skeleton by LP.
    #[arg(long)]
    lp: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Function,
    Boolean,
}

impl From<Kind> for ProblemKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Function => ProblemKind::Function,
            Kind::Boolean => ProblemKind::Boolean,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Compiler {
    /// Deterministic, from a black pebbling.
    Black,
    /// Nondeterministic Boolean, from a fractional pebbling.
    Fractional,
    /// Deterministic Boolean, non-thrifty block method.
    Logsave,
}

#[derive(Args)]
struct ProgramArgs {
    /// Program JSON (or DOT) file; otherwise compile one from the flags.
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 3)]
    h: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Compiler::Black)]
    compiler: Compiler,
    /// Problem for the black compiler.
    #[arg(long, value_enum, default_value_t = Kind::Function)]
    kind: Kind,
    /// Block size for the log-saving compiler.
    #[arg(long)]
    m: Option<usize>,
    /// Source pebbling for the black or fractional compiler.
    #[arg(long)]
    sequence: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    program: ProgramArgs,
    /// Write the program JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    mode: Mode,
    /// Refuse exhaustive checks over more inputs than this.
    #[arg(long, default_value_t = 1 << 24)]
    cap: u128,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CheckArgs {
    fn mode(&self) -> CheckMode {
        match self.mode {
            Mode::Exhaustive => CheckMode::Exhaustive { cap: self.cap },
            Mode::Sampled => CheckMode::Sampled { samples: self.samples, seed: self.seed },
        }
    }
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    program: ProgramArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

fn usage(msg: impl Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

/// Human-readable text and its JSON counterpart.
struct Output {
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.json;
    let result = run(cli.command);
    let (out, code) = match result {
        Ok(out) => (out, 0),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Failed(msg)) => (Output { text: msg.clone(), json: json!({ "ok": false, "error": msg }) }, 1),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
    } else {
        print!("{}", out.text);
        if !out.text.ends_with('\n') {
            println!();
        }
    }
    ExitCode::from(code)
}

fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Pebble(PebbleCommand::Find(a)) => pebble_find(a),
        Command::Pebble(PebbleCommand::Verify(a)) => pebble_verify(a, false),
        Command::Pebble(PebbleCommand::Show(a)) => pebble_verify(a, true),
        Command::Search(a) => search(a),
        Command::Compile(a) => compile(a),
        Command::Verify(a) => verify(a),
        Command::Thrifty(a) => thrifty(a),
        Command::Report(a) => report::run(a),
        Command::ExportDot(a) => export(a),
    }
}

fn eval(a: EvalArgs) -> Result<Output, CliError> {
    let inst = match (&a.instance, a.seed) {
        (Some(path), _) => TepInstance::from_json_str(&read(path)?).map_err(usage)?,
        (None, Some(seed)) => {
            if a.d < 2 || a.h < 1 || a.k < 2 {
                return Err(usage("need --d >= 2, --h >= 1, --k >= 2"));
            }
            random_instance(TreeShape::new(a.d, a.h), a.k, seed)
        }
        (None, None) => return Err(usage("give --instance FILE or --seed N")),
    };
    let kind = ProblemKind::from(a.kind);
    let value = inst.evaluate(kind);
    let values = inst.node_values();
    let mut text = format!("value: {value}\nnode values: {:?}\n", &values[1..]);
    let mut out = json!({ "value": value, "node_values": &values[1..] });
    if a.single {
        let single = to_single_function(&inst);
        let sv = single.evaluate(kind);
        text.push_str(&format!("shared-function value: {sv}\n"));
        out["single_value"] = json!(sv);
    }
    Ok(Output { text, json: out })
}

fn default_c(variant: GameVariant, c: Option<u32>) -> u32 {
    c.unwrap_or(if variant.is_whole() { 1 } else { 2 })
}

fn pebble_find(a: FindArgs) -> Result<Output, CliError> {
    let shape = a.tree.shape()?;
    let c = default_c(a.variant, a.c);
    let r = min_pebbles(&PebbleDag::from_tree(shape), a.variant, c, &a.limits.options()).map_err(usage)?;
    let text = format!(
        "cost: {}\nstates explored: {}\nwitness ({} moves):\n{}",
        r.cost,
        r.states_explored,
        r.witness.len(),
        format_sequence(&r.witness)
    );
    Ok(Output { text, json: search_json(&r.cost, &r.witness, r.states_explored) })
}

fn search_json(cost: &Weight, witness: &[PebbleMove], states: usize) -> Value {
    let moves: Vec<String> = witness.iter().map(ToString::to_string).collect();
    json!({ "cost": cost.to_string(), "states_explored": states, "witness": moves })
}

fn load_moves(a: &SequenceArgs) -> Result<Vec<PebbleMove>, CliError> {
    let (d, h) = (a.tree.d, a.tree.h);
    Ok(match (a.strategy, &a.sequence) {
        (Some(Strategy::Black), _) => strategy_black(d, h),
        (Some(Strategy::Bw), _) => strategy_bw(d, h),
        (Some(Strategy::Fractional), _) => strategy_fractional(d, h),
        (Some(Strategy::Whiteslide), _) => {
            if (d, h) != (2, 4) {
                return Err(usage("the white-sliding strategy is for --d 2 --h 4"));
            }
            strategy_whiteslide_h4()
        }
        (None, Some(path)) => parse_sequence(&read(path)?).map_err(usage)?,
        (None, None) => return Err(usage("give --sequence FILE or --strategy NAME")),
    })
}

fn pebble_verify(a: SequenceArgs, show: bool) -> Result<Output, CliError> {
    let shape = a.tree.shape()?;
    let moves = load_moves(&a)?;
    let dag = PebbleDag::from_tree(shape);
    let report = validate_sequence(&dag, &moves, a.variant).map_err(|e| CliError::Failed(format!("invalid: {e}")))?;
    let mut text = format!("valid {} pebbling, cost {}, {} moves\n", a.variant, report.cost, report.moves);
    let mut out = json!({ "ok": true, "cost": report.cost.to_string(), "moves": report.moves, "peak_at": report.peak_at });
    if show {
        let configs = trace(&dag, &moves, a.variant).map_err(|e| CliError::Failed(e.to_string()))?;
        let mut rows = Vec::new();
        for (i, config) in configs.iter().enumerate() {
            let pebbles: Vec<String> = dag
                .nodes()
                .filter(|&v| config.value(v) > Weight::from_integer(0))
                .map(|v| format!("{v}:b={},w={}", config.black(v), config.white(v)))
                .collect();
            let step = if i == 0 { "start".to_string() } else { moves[i - 1].to_string() };
            text.push_str(&format!("{i:>4} {step:<28} total={} [{}]\n", config.total(), pebbles.join(" ")));
            rows.push(json!({ "move": step, "total": config.total().to_string(), "pebbles": pebbles }));
        }
        out["trace"] = json!(rows);
    }
    Ok(Output { text, json: out })
}

fn search(a: SearchArgs) -> Result<Output, CliError> {
    let c = a.c as usize;
    let (dag, granularity) = match (&a.dag, a.graph) {
        (Some(path), _) => (PebbleDag::parse_edge_list(&read(path)?).map_err(usage)?, default_c(a.variant, None)),
        (None, Graph::Tree) => (PebbleDag::from_tree(TreeShape::new(a.d, a.h)), a.c),
        (None, Graph::G) => (build_g(a.d, a.h, c), 1),
        (None, Graph::Gprime) => (build_g_prime(a.d, a.h, c), 1),
    };
    if a.d < 2 || a.h < 1 || a.c == 0 {
        return Err(usage("need --d >= 2, --h >= 1, --c >= 1"));
    }
    if let Some(path) = &a.lp {
        let moves = parse_sequence(&read(path)?).map_err(usage)?;
        let sol = lp_min_over_skeleton(&dag, &skeleton_of(&moves)).map_err(|e| CliError::Failed(e.to_string()))?;
        let text = format!("LP optimum over the skeleton: {}\n{}", sol.cost, format_sequence(&sol.sequence));
        let moves: Vec<String> = sol.sequence.iter().map(ToString::to_string).collect();
        return Ok(Output { text, json: json!({ "cost": sol.cost.to_string(), "sequence": moves }) });
    }
    let r = min_pebbles(&dag, a.variant, granularity, &a.limits.options()).map_err(usage)?;
    let text = format!(
        "graph with {} nodes, {} edges\ncost: {}\nstates explored: {}\nwitness ({} moves):\n{}",
        dag.node_count(),
        dag.edges().len(),
        r.cost,
        r.states_explored,
        r.witness.len(),
        format_sequence(&r.witness)
    );
    Ok(Output { text, json: search_json(&r.cost, &r.witness, r.states_explored) })
}

fn build(p: &ProgramArgs) -> Result<(BranchingProgram, Option<CompilationReport>), CliError> {
    if let Some(path) = &p.program {
        let text = read(path)?;
        let bp = if text.trim_start().starts_with('{') {
            BranchingProgram::from_json_str(&text).map_err(usage)?
        } else {
            parse_dot(&text).map_err(usage)?
        };
        return Ok((bp, None));
    }
    if p.d < 2 || p.h < 1 || p.k < 2 {
        return Err(usage("need --d >= 2, --h >= 1, --k >= 2"));
    }
    let shape = TreeShape::new(p.d, p.h);
    let moves = |default: fn(usize, usize) -> Vec<PebbleMove>| -> Result<Vec<PebbleMove>, CliError> {
        match &p.sequence {
            Some(path) => parse_sequence(&read(path)?).map_err(usage),
            None => Ok(default(p.d, p.h)),
        }
    };
    let (bp, report) = match p.compiler {
        Compiler::Black => compile_black_det(shape, &moves(strategy_black)?, p.k, p.kind.into()),
        Compiler::Fractional => compile_fractional_nondet(shape, &moves(strategy_fractional)?, p.k),
        Compiler::Logsave => {
            if p.h < 2 {
                return Err(usage("the log-saving compiler needs --h >= 2"));
            }
            compile_boolean_logsave(p.d, p.h, p.k, p.m.unwrap_or_else(|| default_block_size(p.d, p.k)))
        }
    }
    .map_err(usage)?;
    Ok((bp, Some(report)))
}

fn compile(a: CompileArgs) -> Result<Output, CliError> {
    let (bp, report) = build(&a.program)?;
    let report = report.ok_or_else(|| usage("compile needs compiler flags, not --program"))?;
    if let Some(path) = &a.out {
        write(path, &bp.to_json_string())?;
    }
    let metrics = bp.metrics();
    let mut text = format!(
        "compiler: {}\nsource cost: {}\nk: {}\nstates: {} ({} final)\nedges: {}\n",
        report.compiler, report.source_cost, report.k, metrics.states, metrics.finals, metrics.edges
    );
    if let Some(phases) = report.phase_states {
        text.push_str(&format!("phase states: {phases:?}\n"));
    }
    if let Some(bound) = report.bit_bound {
        let max = report.bits_per_config.as_ref().and_then(|b| b.iter().max().copied()).unwrap_or(0);
        text.push_str(&format!("max bits per configuration: {max} (bound {bound:.3})\n"));
    }
    Ok(Output { text, json: json!({ "report": report, "metrics": metrics }) })
}

fn verify(a: CheckArgs) -> Result<Output, CliError> {
    let (bp, _) = build(&a.program)?;
    bp.validate().map_err(usage)?;
    let r = check_correct(&bp, a.mode()).map_err(usage)?;
    match &r.counterexample {
        None => Ok(Output {
            text: format!("{}/{} inputs OK\n", r.inputs_checked, r.inputs_checked),
            json: json!({ "ok": true, "inputs_checked": r.inputs_checked }),
        }),
        Some(cx) => {
            let msg = format!(
                "counterexample after {} inputs: expected {}, reached {:?}\n{}",
                r.inputs_checked,
                cx.expected,
                cx.reached,
                serde_json::to_string(&cx.instance).expect("json")
            );
            Err(CliError::Failed(msg))
        }
    }
}

fn thrifty(a: CheckArgs) -> Result<Output, CliError> {
    let (bp, _) = build(&a.program)?;
    bp.validate().map_err(usage)?;
    let r = check_thrifty(&bp, a.mode()).map_err(usage)?;
    match &r.violation {
        None => Ok(Output {
            text: format!("thrifty on {}/{} inputs\n", r.inputs_checked, r.inputs_checked),
            json: json!({ "ok": true, "inputs_checked": r.inputs_checked }),
        }),
        Some(v) => Err(CliError::Failed(format!(
            "not thrifty: state {} queries {} but the children values are {:?}\n{}",
            v.state,
            v.query,
            v.children_values,
            serde_json::to_string(&v.instance).expect("json")
        ))),
    }
}

fn export(a: ExportArgs) -> Result<Output, CliError> {
    let (bp, _) = build(&a.program)?;
    let dot = export_dot(&bp);
    match &a.out {
        Some(path) => {
            write(path, &dot)?;
            Ok(Output {
                text: format!("wrote {} ({} states)\n", path.display(), bp.size()),
                json: json!({ "path": path.display().to_string(), "states": bp.size() }),
            })
        }
        None => Ok(Output { json: json!({ "dot": dot }), text: dot }),
    }
}
