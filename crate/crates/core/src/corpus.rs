//! Case-study programs with seeded faults, and a differential harness that
//! cross-checks the bug finder against exhaustive concrete execution.
//!
//! Each program states its correctness property with `if ... then skip else
//! fail fi` checks. Multiplication is done with repeated-addition loops since
//! IMP only has `+` and `-`.

use std::fmt;

use thiserror::Error;

use crate::concrete::{bad_input, eval_bexpr, exec, BadInput, ConcState, Env, ExecOutcome};
use crate::engine::{find_bugs_from, RunOptions, Status, Strategy};
use crate::solver::DEFAULT_BUDGET;
use crate::symbolic::{simulates, SymState, SymStore};
use crate::syntax::{parse_program, Aexpr, Bexpr, CmpOp, Ident, Stmt};

/// Inclusive integer range for one input variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputRange {
    pub var: Ident,
    pub lo: i64,
    pub hi: i64,
}

impl InputRange {
    pub fn new(var: &str, lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty range {lo}..{hi} for {var}");
        InputRange { var: Ident::from(var), lo, hi }
    }
}

impl fmt::Display for InputRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}..{}", self.var, self.lo, self.hi)
    }
}

/// `lo <= x and x <= hi` for every range, in order; `true` for none.
pub fn domain_precondition(domain: &[InputRange]) -> Bexpr {
    domain
        .iter()
        .flat_map(|r| {
            let x = Aexpr::Var(r.var.clone());
            [Bexpr::cmp(CmpOp::Le, Aexpr::int(r.lo), x.clone()), Bexpr::cmp(CmpOp::Le, x, Aexpr::int(r.hi))]
        })
        .reduce(Bexpr::and)
        .unwrap_or(Bexpr::True)
}

/// Every environment in the box, in lexicographic order of the ranges.
pub fn enumerate_box(domain: &[InputRange]) -> Vec<Env> {
    let mut envs = vec![Env::new()];
    for r in domain {
        envs = envs.into_iter().flat_map(|env| (r.lo..=r.hi).map(move |v| env.clone().with(&r.var, v))).collect();
    }
    envs
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub mutant_source: &'static str,
    /// The single edit that turns `source` into `mutant_source`.
    pub mutation: &'static str,
    pub inputs: Vec<InputRange>,
    /// An input on which the mutant reaches `fail`.
    pub known_bad_input: Option<Env>,
}

impl CorpusEntry {
    pub fn program(&self) -> Stmt {
        parse_program(self.source).unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }

    pub fn mutant(&self) -> Stmt {
        parse_program(self.mutant_source).unwrap_or_else(|e| panic!("{} mutant: {e}", self.name))
    }
}

pub const ISQRT: &str = include_str!("../../../corpus/isqrt.imp");
pub const ISQRT_MUTANT: &str = include_str!("../../../corpus/isqrt_mutant.imp");
pub const FACTORIAL: &str = include_str!("../../../corpus/factorial.imp");
pub const FACTORIAL_MUTANT: &str = include_str!("../../../corpus/factorial_mutant.imp");
pub const GCD: &str = include_str!("../../../corpus/gcd.imp");
pub const GCD_MUTANT: &str = include_str!("../../../corpus/gcd_mutant.imp");

pub fn load_corpus() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "isqrt",
            source: ISQRT,
            mutant_source: ISQRT_MUTANT,
            mutation: "`while _s > x do` becomes `while _s < x do`",
            inputs: vec![InputRange::new("n", 0, 20)],
            known_bad_input: Some(Env::new().with("n", 2)),
        },
        CorpusEntry {
            name: "factorial",
            source: FACTORIAL,
            mutant_source: FACTORIAL_MUTANT,
            mutation: "`while k > 0 do` becomes `while k >= 0 do`",
            inputs: vec![InputRange::new("n", 0, 6)],
            known_bad_input: Some(Env::new().with("n", 0)),
        },
        CorpusEntry {
            name: "gcd",
            source: GCD,
            mutant_source: GCD_MUTANT,
            mutation: "`if x > y then` becomes `if x < y then`",
            inputs: vec![InputRange::new("a", 0, 6), InputRange::new("b", 0, 6)],
            known_bad_input: Some(Env::new().with("a", 2).with("b", 3)),
        },
    ]
}

/// Some input made `bad_input` run out of fuel, so the comparison would be
/// meaningless.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("concrete execution from {input} did not finish within {fuel} steps")]
pub struct InconclusiveBudget {
    pub input: Env,
    pub fuel: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub input: Env,
    pub concrete: BadInput,
    pub symbolic: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifferentialReport {
    pub inputs_checked: usize,
    /// Inputs on which concrete execution gets stuck.
    pub bad_inputs: Vec<Env>,
    pub bug_states: usize,
    /// Whether the status stream reached `Finished` within the prefix.
    pub finished: bool,
    pub disagreements: Vec<Disagreement>,
}

impl DifferentialReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

impl fmt::Display for DifferentialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} inputs, {} bad, {} bug states, stream {}",
            self.inputs_checked,
            self.bad_inputs.len(),
            self.bug_states,
            if self.finished { "finished" } else { "cut off" }
        )?;
        for d in &self.disagreements {
            writeln!(
                f,
                "disagreement at {}: concrete {:?}, symbolic {}: {}",
                d.input, d.concrete, d.symbolic, d.detail
            )?;
        }
        Ok(())
    }
}

/// Compares, for every input in `domain`, the concrete verdict with the
/// bug states found in the first `prefix_len` statuses of a pruned
/// breadth-first search whose initial path condition encodes the domain.
pub fn differential_check(
    p: &Stmt,
    domain: &[InputRange],
    fuel: u64,
    prefix_len: usize,
) -> Result<DifferentialReport, InconclusiveBudget> {
    let initial = SymState::new(domain_precondition(domain), SymStore::identity(), p.clone());
    let mut bugs = Vec::new();
    let mut finished = false;
    for status in find_bugs_from(initial, RunOptions::pruned(Strategy::Bfs, DEFAULT_BUDGET)).take(prefix_len) {
        match status {
            Status::BugFound(s) => bugs.push(s),
            Status::Finished => {
                finished = true;
                break;
            }
            Status::Pending => {}
        }
    }

    let mut report = DifferentialReport { bug_states: bugs.len(), finished, ..Default::default() };
    for v0 in enumerate_box(domain) {
        report.inputs_checked += 1;
        let concrete = bad_input(p, &v0, fuel);
        if concrete == BadInput::Unknown {
            return Err(InconclusiveBudget { input: v0, fuel });
        }
        let stuck_at = match exec(&ConcState::new(v0.clone(), p.clone()), fuel) {
            ExecOutcome::StuckAt(c) => Some(c),
            _ => None,
        };
        let covering: Vec<&SymState> = bugs.iter().filter(|s| eval_bexpr(&s.path, &v0)).collect();
        let symbolic = match &stuck_at {
            Some(c) => covering.iter().any(|s| simulates(c, &v0, s)),
            None => false,
        };
        if concrete == BadInput::Yes {
            report.bad_inputs.push(v0.clone());
        }
        let detail = if !covering.is_empty() && !symbolic {
            Some(format!("{} bug state(s) cover the input but none matches its concrete run", covering.len()))
        } else if (concrete == BadInput::Yes) != symbolic {
            Some(if symbolic {
                "symbolic bug without concrete failure".to_owned()
            } else {
                "concrete failure not found in the stream prefix".to_owned()
            })
        } else {
            None
        };
        if let Some(detail) = detail {
            report.disagreements.push(Disagreement { input: v0, concrete, symbolic, detail });
        }
    }
    Ok(report)
}
