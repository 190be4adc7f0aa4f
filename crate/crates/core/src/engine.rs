//! Worklist-driven exploration of the symbolic execution tree.
//!
//! [`run`] produces an unbounded stream: each pull emits the head of the
//! worklist and replaces it with its successors, and once the worklist is
//! empty every further item is `None`. [`find_bugs`] maps that stream to
//! [`Status`] values, and [`has_bug`] consumes it under a budget, asking the
//! solver about every stuck state it meets.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::concrete::{exec, ConcState, Env, ExecOutcome};
use crate::solver::{is_sat, SatResult, UnknownReason, DEFAULT_BUDGET};
use crate::symbolic::{expand, is_stuck_sym, simulates, SymState};
use crate::syntax::{Bexpr, Stmt};

/// Order in which successors join the worklist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Successors go to the back.
    #[default]
    Bfs,
    /// Successors go to the front.
    Dfs,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub strategy: Strategy,
    /// When set, successors whose path condition the solver proves
    /// unsatisfiable (within this budget) are dropped. Undecided ones stay.
    pub prune: Option<u64>,
}

impl RunOptions {
    pub fn new(strategy: Strategy) -> Self {
        RunOptions { strategy, prune: None }
    }

    pub fn pruned(strategy: Strategy, solver_budget: u64) -> Self {
        RunOptions { strategy, prune: Some(solver_budget) }
    }
}

/// The state stream. `next` never returns `None`; exhaustion is signalled
/// by `Some(None)` forever after.
#[derive(Clone, Debug)]
pub struct Run {
    worklist: VecDeque<SymState>,
    options: RunOptions,
}

pub fn run(worklist: impl IntoIterator<Item = SymState>, strategy: Strategy) -> Run {
    run_with(worklist, RunOptions::new(strategy))
}

pub fn run_with(worklist: impl IntoIterator<Item = SymState>, options: RunOptions) -> Run {
    Run { worklist: worklist.into_iter().collect(), options }
}

impl Run {
    /// Number of states waiting, including the one the next pull emits.
    pub fn pending(&self) -> usize {
        self.worklist.len()
    }

    pub fn worklist(&self) -> impl Iterator<Item = &SymState> {
        self.worklist.iter()
    }

    fn keep(&self, parent: &SymState, child: &SymState) -> bool {
        match self.options.prune {
            None => true,
            // Same condition as the parent, which was already admitted.
            Some(_) if child.path == parent.path => true,
            Some(budget) => !is_sat(&child.path, budget).is_unsat(),
        }
    }
}

impl Iterator for Run {
    type Item = Option<SymState>;

    fn next(&mut self) -> Option<Option<SymState>> {
        let Some(head) = self.worklist.pop_front() else {
            return Some(None);
        };
        let successors: Vec<SymState> = expand(&head).into_iter().filter(|s| self.keep(&head, s)).collect();
        match self.options.strategy {
            Strategy::Bfs => self.worklist.extend(successors),
            Strategy::Dfs => {
                for s in successors.into_iter().rev() {
                    self.worklist.push_front(s);
                }
            }
        }
        Some(Some(head))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Pending,
    Finished,
    BugFound(SymState),
}

impl Status {
    pub fn is_bug(&self) -> bool {
        matches!(self, Status::BugFound(_))
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pending => f.write_str("Pending"),
            Status::Finished => f.write_str("Finished"),
            Status::BugFound(s) => write!(f, "BugFound({s})"),
        }
    }
}

pub fn display(item: Option<SymState>) -> Status {
    match item {
        None => Status::Finished,
        Some(s) if is_stuck_sym(&s) => Status::BugFound(s),
        Some(_) => Status::Pending,
    }
}

/// The status stream; like [`Run`] it never ends.
#[derive(Clone, Debug)]
pub struct FindBugs {
    run: Run,
}

impl FindBugs {
    pub fn run(&self) -> &Run {
        &self.run
    }
}

impl Iterator for FindBugs {
    type Item = Status;

    fn next(&mut self) -> Option<Status> {
        self.run.next().map(display)
    }
}

pub fn find_bugs(p: &Stmt, strategy: Strategy) -> FindBugs {
    find_bugs_from(SymState::initial(p.clone()), RunOptions::new(strategy))
}

/// Starts from an arbitrary state, e.g. one whose path condition restricts
/// the inputs.
pub fn find_bugs_from(initial: SymState, options: RunOptions) -> FindBugs {
    FindBugs { run: run_with([initial], options) }
}

/// A concrete replay disagreed with a symbolic state the solver vouched for.
/// This indicates a defect in the engine or the solver, not in the program.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("replay of {state} from {model} did not reach the reported stuck state ({observed})")]
pub struct ReplayMismatch {
    pub state: Box<SymState>,
    pub model: Env,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Confirmation {
    /// Feasible; the model drives `p` into the stuck state.
    Confirmed(Env),
    /// The path condition is unsatisfiable.
    Refuted,
    Undecided(UnknownReason),
}

/// Asks the solver about a stuck state and replays any model concretely.
pub fn confirm_bug(p: &Stmt, state: &SymState, solver_budget: u64, fuel: u64) -> Result<Confirmation, ReplayMismatch> {
    match is_sat(&state.path, solver_budget) {
        SatResult::Unsat => Ok(Confirmation::Refuted),
        SatResult::Unknown(reason) => Ok(Confirmation::Undecided(reason)),
        SatResult::Sat(model) => {
            let outcome = exec(&ConcState::new(model.clone(), p.clone()), fuel);
            match outcome {
                ExecOutcome::StuckAt(c) if simulates(&c, &model, state) => Ok(Confirmation::Confirmed(model)),
                other => Err(ReplayMismatch { state: Box::new(state.clone()), model, observed: describe(&other) }),
            }
        }
    }
}

fn describe(outcome: &ExecOutcome) -> String {
    match outcome {
        ExecOutcome::Terminated(env) => format!("terminated with {env}"),
        ExecOutcome::StuckAt(c) => format!("stuck at {} with {}", c.pc, c.env),
        ExecOutcome::OutOfFuel(c) => format!("out of fuel at {}", c.pc),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum BugVerdict {
    Yes { state: SymState, model: Env },
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BugSearch {
    pub strategy: Strategy,
    pub prune: bool,
    /// Conjoined into the initial path condition.
    pub precondition: Bexpr,
    pub step_budget: u64,
    pub solver_budget: u64,
}

impl Default for BugSearch {
    fn default() -> Self {
        BugSearch {
            strategy: Strategy::Bfs,
            prune: false,
            precondition: Bexpr::True,
            step_budget: 10_000,
            solver_budget: DEFAULT_BUDGET,
        }
    }
}

/// Budgeted bug oracle: `Yes` only with a replayed model, `No` only after
/// exhausting every path without undecided queries.
pub fn has_bug(p: &Stmt, step_budget: u64, solver_budget: u64) -> Result<BugVerdict, ReplayMismatch> {
    has_bug_with(p, &BugSearch { step_budget, solver_budget, ..BugSearch::default() })
}

pub fn has_bug_with(p: &Stmt, search: &BugSearch) -> Result<BugVerdict, ReplayMismatch> {
    let initial = SymState::new(search.precondition.clone(), Default::default(), p.clone());
    let options = RunOptions { strategy: search.strategy, prune: search.prune.then_some(search.solver_budget) };
    let mut undecided = false;
    for status in find_bugs_from(initial, options).take(search.step_budget as usize) {
        match status {
            Status::Pending => {}
            Status::Finished => return Ok(if undecided { BugVerdict::Unknown } else { BugVerdict::No }),
            Status::BugFound(state) => match confirm_bug(p, &state, search.solver_budget, search.step_budget)? {
                Confirmation::Confirmed(model) => return Ok(BugVerdict::Yes { state, model }),
                Confirmation::Refuted => {}
                Confirmation::Undecided(_) => undecided = true,
            },
        }
    }
    Ok(BugVerdict::Unknown)
}
