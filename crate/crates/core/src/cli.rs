//! The `mps` command line.
//!
//! Exit codes: 0 proved (or holds), 1 disproved, 2 input or usage error,
//! 3 verification mismatch or fuzz failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::arena::ExplicitArena;
use crate::cost::BuiltinModel;
use crate::engine::{trace_line, Search, SelectionRule};
use crate::formula::{parse_formula, Formula};
use crate::fuzz::{run_fuzz, Bounds, CheckOptions, FuzzConfig};
use crate::oracle::min_cost;
use crate::proof::{check_proof, extract, proof_cost, serialize_proof, Polarity, ProofFormat};
use crate::StateId;

pub const EXIT_PROVED: i32 = 0;
pub const EXIT_DISPROVED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mps", version, about = "Minimal proof search for modal logic K over game arenas")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a model checking problem and report the minimal (dis)proof
    Check(CheckArgs),
    /// Compute the answer and minimal costs by exhaustive recursion
    Oracle(ProblemArgs),
    /// Compare the search against the oracles on random instances
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Arena file (JSON)
    #[arg(long)]
    arena: PathBuf,
    /// Start state
    #[arg(long)]
    state: String,
    /// Formula, e.g. "[a]p & <b>!q"
    #[arg(long)]
    formula: String,
    /// depth, query_count, weighted or weighted:CONFIG
    #[arg(long)]
    cost: String,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Write the extracted (dis)proof here
    #[arg(long)]
    export_proof: Option<PathBuf>,
    /// Export format
    #[arg(long, default_value = "structured", value_parser = ["dot", "structured"])]
    format: String,
    /// Validate the extracted (dis)proof against the arena
    #[arg(long)]
    verify: bool,
    /// With --verify, also compare verdict and cost with the oracle
    #[arg(long)]
    oracle: bool,
    /// Print one line per iteration to stderr
    #[arg(long)]
    trace: bool,
    /// Include wall-clock time in the report
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    #[arg(long, default_value_t = 6)]
    max_states: usize,
    #[arg(long, default_value_t = 2)]
    max_agents: usize,
    #[arg(long, default_value_t = 3)]
    max_atoms: usize,
    #[arg(long, default_value_t = 3)]
    max_moves: usize,
    #[arg(long, default_value_t = 8)]
    max_formula_size: usize,
    /// Also enumerate all (dis)proofs up to this many nodes
    #[arg(long)]
    enumerate: Option<usize>,
    /// Skip the per-iteration snapshot checks
    #[arg(long)]
    no_snapshots: bool,
    /// Negative control: descend into the first unsolved child
    #[arg(long, hide = true)]
    corrupt_selection: bool,
}

struct Problem {
    arena: ExplicitArena,
    state: StateId,
    formula: Formula,
    model: BuiltinModel,
}

fn load_problem(args: &ProblemArgs) -> Result<Problem, String> {
    let text = fs::read_to_string(&args.arena).map_err(|e| format!("cannot read {}: {e}", args.arena.display()))?;
    let arena = ExplicitArena::load(&text).map_err(|e| format!("{}: {e}", args.arena.display()))?;
    let state = arena.state(&args.state).ok_or_else(|| format!("unknown state `{}`", args.state))?;
    let formula = parse_formula(&args.formula, &arena).map_err(|e| format!("formula: {e}"))?;
    let model = parse_cost(&args.cost)?;
    Ok(Problem { arena, state, formula, model })
}

fn parse_cost(text: &str) -> Result<BuiltinModel, String> {
    match text.split_once(':') {
        Some(("weighted", path)) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            let model = BuiltinModel::from_config(&text).map_err(|e| format!("{path}: {e}"))?;
            match model {
                BuiltinModel::Weighted(_) => Ok(model),
                other => Err(format!("{path}: expected a weighted configuration, found {}", other.name())),
            }
        }
        Some(_) => Err(format!("bad cost `{text}` (expected depth, query_count, weighted or weighted:CONFIG)")),
        None => BuiltinModel::from_name(text).map_err(|e| e.to_string()),
    }
}

/// Runs the CLI with explicit argument list and output streams; returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PROVED };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check(args) => cmd_check(&args, out, err),
        Command::Oracle(args) => cmd_oracle(&args, out),
        Command::Fuzz(args) => cmd_fuzz(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}

fn io(e: std::io::Error) -> String {
    e.to_string()
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let problem = load_problem(&args.problem)?;
    let model = &problem.model;
    let started = Instant::now();
    let search = Search::new(&problem.arena, model, problem.state.clone(), problem.formula.clone());
    let result = if args.trace {
        search.run_observed(|tree, step| {
            let _ = writeln!(err, "{}", trace_line(tree, step));
        })
    } else {
        search.run()
    }
    .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let proof = extract(model, &result.tree).map_err(|e| e.to_string())?;

    writeln!(out, "verdict: {}", if result.verdict == Polarity::Proof { "proved" } else { "disproved" }).map_err(io)?;
    writeln!(out, "cost: {}", result.cost()).map_err(io)?;
    writeln!(out, "expansions: {}", result.expansions).map_err(io)?;
    writeln!(out, "iterations: {}", result.iterations).map_err(io)?;
    if args.timing {
        writeln!(out, "elapsed_ms: {:.3}", elapsed.as_secs_f64() * 1e3).map_err(io)?;
    }

    if let Some(path) = &args.export_proof {
        let format: ProofFormat = args.format.parse().map_err(|e: crate::proof::UnknownFormat| e.to_string())?;
        fs::write(path, serialize_proof(&proof, format, model))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }

    let mut mismatch = false;
    if args.verify {
        match check_proof(&problem.arena, &proof) {
            Ok(()) => writeln!(out, "proof check: ok").map_err(io)?,
            Err(e) => {
                writeln!(out, "proof check: FAILED {e}").map_err(io)?;
                mismatch = true;
            }
        }
        let k = proof_cost(model, &proof);
        if k != result.cost() {
            writeln!(out, "cost check: FAILED extracted {k}, search {}", result.cost()).map_err(io)?;
            mismatch = true;
        }
        if args.oracle {
            let truth = min_cost(&problem.arena, &problem.state, &problem.formula, model).map_err(|e| e.to_string())?;
            let agrees = truth.holds == (result.verdict == Polarity::Proof) && truth.cost() == k;
            writeln!(
                out,
                "oracle: holds {} min_proof_cost {} min_disproof_cost {} ({})",
                truth.holds,
                truth.min_proof_cost,
                truth.min_disproof_cost,
                if agrees { "agrees" } else { "MISMATCH" }
            )
            .map_err(io)?;
            mismatch |= !agrees;
        }
    }

    Ok(if mismatch {
        EXIT_MISMATCH
    } else if result.verdict == Polarity::Proof {
        EXIT_PROVED
    } else {
        EXIT_DISPROVED
    })
}

fn cmd_oracle(args: &ProblemArgs, out: &mut dyn Write) -> Result<i32, String> {
    let problem = load_problem(args)?;
    let truth =
        min_cost(&problem.arena, &problem.state, &problem.formula, &problem.model).map_err(|e| e.to_string())?;
    writeln!(out, "holds: {}", truth.holds).map_err(io)?;
    writeln!(out, "min_proof_cost: {}", truth.min_proof_cost).map_err(io)?;
    writeln!(out, "min_disproof_cost: {}", truth.min_disproof_cost).map_err(io)?;
    Ok(if truth.holds { EXIT_PROVED } else { EXIT_DISPROVED })
}

fn cmd_fuzz(args: &FuzzArgs, out: &mut dyn Write) -> Result<i32, String> {
    let bounds = Bounds {
        max_states: args.max_states,
        max_agents: args.max_agents,
        max_atoms: args.max_atoms,
        max_moves: args.max_moves,
        max_formula_size: args.max_formula_size,
    };
    if [bounds.max_states, bounds.max_agents, bounds.max_atoms, bounds.max_formula_size].contains(&0) {
        return Err("state, agent, atom and formula-size bounds must be at least 1".into());
    }
    let config = FuzzConfig {
        seed: args.seed,
        cases: args.cases,
        bounds,
        options: CheckOptions {
            snapshots: !args.no_snapshots,
            enumeration_bound: args.enumerate,
            selection: if args.corrupt_selection {
                SelectionRule::FirstUnsolved
            } else {
                SelectionRule::MinimalDisproof
            },
        },
    };
    let report = run_fuzz(&config);
    write!(out, "{report}").map_err(io)?;
    Ok(if report.failure.is_some() { EXIT_MISMATCH } else { EXIT_PROVED })
}
