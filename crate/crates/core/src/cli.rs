//! The `wise` command line.
//!
//! `wise check FILE` explores FILE breadth-first (or depth-first), prints a
//! `BUG` line for every stuck state whose path condition has a model that
//! replays concretely, and ends with `SAFE`, `BUG FOUND (n)` or `UNKNOWN`.
//!
//! Exit codes: 0 safe, 1 bug found, 2 usage or parse error, 3 unknown,
//! 4 I/O error, 70 internal replay mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{domain_precondition, InputRange};
use crate::engine::{confirm_bug, find_bugs_from, Confirmation, RunOptions, Status, Strategy};
use crate::solver::{emit_smtlib, DEFAULT_BUDGET};
use crate::symbolic::{SymState, SymStore};
use crate::syntax::{is_reserved, parse_program, pretty};

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_BUG: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_INTERNAL: i32 = 70;

pub const SOLVER_BUDGET_VAR: &str = "WISE_SOLVER_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "wise", version, about = "Symbolic-execution bug finder for IMP programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search a program for reachable `fail` statements.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// IMP source file.
    file: PathBuf,
    /// Stream items to examine before giving up.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    /// Explore depth-first instead of breadth-first.
    #[arg(long)]
    depth_first: bool,
    /// Drop states whose path condition is unsatisfiable.
    #[arg(long)]
    prune: bool,
    /// Write an SMT-LIB2 script for each bug to DIR/bug_<k>.smt2.
    #[arg(long, value_name = "DIR")]
    emit_smt: Option<PathBuf>,
    /// Restrict an input variable to an inclusive range.
    #[arg(long = "domain", value_name = "VAR=LO..HI", value_parser = parse_domain)]
    domains: Vec<InputRange>,
    /// Report progress on stderr.
    #[arg(long)]
    verbose: bool,
}

fn parse_domain(text: &str) -> Result<InputRange, String> {
    let (var, range) = text.split_once('=').ok_or("expected VAR=LO..HI")?;
    let (lo, hi) = range.split_once("..").ok_or("expected VAR=LO..HI")?;
    let valid_name = var.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && var.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_reserved(var);
    if !valid_name {
        return Err(format!("`{var}` is not a variable name"));
    }
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower bound `{lo}`: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper bound `{hi}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(InputRange::new(var, lo, hi))
}

/// Everything `check` needs, after flag and environment parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub input_path: PathBuf,
    pub max_steps: u64,
    pub strategy: Strategy,
    pub prune: bool,
    pub emit_smt_dir: Option<PathBuf>,
    pub solver_budget: u64,
    pub domain_bounds: Vec<InputRange>,
    pub verbose: bool,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SAFE };
            let rendered = e.render().to_string();
            let _ =
                if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let Command::Check(args) = cli.command;
    let solver_budget = match std::env::var(SOLVER_BUDGET_VAR) {
        Err(_) => DEFAULT_BUDGET,
        Ok(text) => match text.trim().parse() {
            Ok(n) => n,
            Err(_) => {
                let _ = writeln!(err, "error: {SOLVER_BUDGET_VAR} must be a non-negative integer, got `{text}`");
                return EXIT_USAGE;
            }
        },
    };
    let config = CliConfig {
        input_path: args.file,
        max_steps: args.max_steps,
        strategy: if args.depth_first { Strategy::Dfs } else { Strategy::Bfs },
        prune: args.prune,
        emit_smt_dir: args.emit_smt,
        solver_budget,
        domain_bounds: args.domains,
        verbose: args.verbose,
    };
    check(&config, out, err)
}

pub fn check(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match check_inner(config, out, err) {
        Ok(code) => code,
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_IO
        }
        Err(Failure::Code(code)) => code,
    }
}

enum Failure {
    Io(String),
    Code(i32),
}

fn io_error(context: impl std::fmt::Display) -> impl FnOnce(io::Error) -> Failure {
    move |e| Failure::Io(format!("{context}: {e}"))
}

fn check_inner(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let path = config.input_path.display();
    let text = fs::read_to_string(&config.input_path).map_err(io_error(&path))?;
    let program = match parse_program(&text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {path}:{e}");
            return Err(Failure::Code(EXIT_USAGE));
        }
    };
    if let Some(dir) = &config.emit_smt_dir {
        fs::create_dir_all(dir).map_err(io_error(dir.display()))?;
    }

    let initial = SymState::new(domain_precondition(&config.domain_bounds), SymStore::identity(), program.clone());
    let options = RunOptions { strategy: config.strategy, prune: config.prune.then_some(config.solver_budget) };

    let mut bugs = 0usize;
    let mut undecided = false;
    let mut finished = false;
    let mut statuses = find_bugs_from(initial, options);
    for step in 0..config.max_steps {
        if config.verbose && step > 0 && step % 1000 == 0 {
            let _ = writeln!(err, "[wise] {step} items, {bugs} bugs, {} queued", statuses.run().pending());
        }
        let Some(status) = statuses.next() else { break };
        let state = match status {
            Status::Pending => continue,
            Status::Finished => {
                finished = true;
                break;
            }
            Status::BugFound(state) => state,
        };
        match confirm_bug(&program, &state, config.solver_budget, config.max_steps) {
            Err(mismatch) => {
                let _ = writeln!(err, "internal error: {mismatch}");
                return Err(Failure::Code(EXIT_INTERNAL));
            }
            Ok(Confirmation::Refuted) => {
                if config.verbose {
                    let _ = writeln!(err, "[wise] item {step}: stuck state with unsatisfiable path skipped");
                }
            }
            Ok(Confirmation::Undecided(reason)) => {
                undecided = true;
                if config.verbose {
                    let _ = writeln!(err, "[wise] item {step}: solver undecided ({reason:?})");
                }
            }
            Ok(Confirmation::Confirmed(model)) => {
                bugs += 1;
                let assignment: Vec<String> =
                    state.path.vars().iter().map(|v| format!("{v}={}", model.get(v))).collect();
                writeln!(out, "BUG pc={} path={} model={}", pretty(&state.pc), state.path, assignment.join(","))
                    .map_err(io_error("stdout"))?;
                if let Some(dir) = &config.emit_smt_dir {
                    let file = dir.join(format!("bug_{bugs}.smt2"));
                    fs::write(&file, emit_smtlib(&state.path)).map_err(io_error(file.display()))?;
                }
            }
        }
    }

    let (line, code) = if bugs > 0 {
        (format!("BUG FOUND ({bugs})"), EXIT_BUG)
    } else if finished && !undecided {
        ("SAFE".to_owned(), EXIT_SAFE)
    } else {
        ("UNKNOWN".to_owned(), EXIT_UNKNOWN)
    };
    writeln!(out, "{line}").map_err(io_error("stdout"))?;
    Ok(code)
}
