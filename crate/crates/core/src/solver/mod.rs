//! Satisfiability of path conditions over the integers.
//!
//! A condition is put in disjunctive normal form over linear constraints and
//! each clause is decided by exact integer elimination. Every `Sat` answer
//! carries a model that has been checked against the original condition.

mod linear;
mod omega;
mod smtlib;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::concrete::{eval_bexpr, Env};
use crate::syntax::{Bexpr, Ident};

pub use linear::{
    linearize, normalize, normalize_with_cap, Clause, DnfBlowup, LinExpr, LinearConstraint, Relation,
    DEFAULT_CLAUSE_CAP,
};
pub use smtlib::emit_smtlib;

use omega::{Affine, Exhausted, Omega, VarId};

/// Elimination steps allowed per query unless configured otherwise.
pub const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnknownReason {
    BudgetExhausted,
    DnfBlowup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Env),
    Unsat,
    Unknown(UnknownReason),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat)
    }
}

/// Decides `phi` within `budget` elimination steps.
///
/// Each top-level conjunct is put in disjunctive normal form on its own and
/// duplicates are dropped (loop conditions recur verbatim along a path).
/// Single-clause conjuncts form a common base; the remaining choices are
/// explored depth-first, abandoning a branch as soon as the clause built so
/// far is infeasible. The product of the choice counts is what the clause
/// cap bounds.
///
/// # Panics
///
/// If a model produced internally fails to satisfy `phi`. That would be a
/// defect in the elimination core, never a property of the input.
pub fn is_sat(phi: &Bexpr, budget: u64) -> SatResult {
    let mut conjuncts = Vec::new();
    let mut seen = HashSet::new();
    flatten(phi, &mut seen, &mut conjuncts);

    let mut base = BTreeSet::new();
    let mut choices: Vec<Vec<Clause>> = Vec::new();
    let mut distinct = HashSet::new();
    let mut product = 1usize;
    for c in conjuncts {
        let Ok(clauses) = normalize(c) else {
            return SatResult::Unknown(UnknownReason::DnfBlowup);
        };
        match clauses.len() {
            0 => return SatResult::Unsat,
            1 => base.extend(clauses.into_iter().flatten()),
            _ if !distinct.insert(clauses.clone()) => {}
            n => {
                product = product.saturating_mul(n);
                if product > DEFAULT_CLAUSE_CAP {
                    return SatResult::Unknown(UnknownReason::DnfBlowup);
                }
                choices.push(clauses);
            }
        }
    }
    choices.sort_by_key(Vec::len);

    let mut base: Clause = base.into_iter().collect();
    let mut remaining = budget;
    match search(&mut base, &choices, &mut remaining) {
        Ok(Some(model)) => {
            assert!(eval_bexpr(phi, &model), "solver model {model} does not satisfy {phi}");
            SatResult::Sat(model)
        }
        Ok(None) => SatResult::Unsat,
        Err(Exhausted) => SatResult::Unknown(UnknownReason::BudgetExhausted),
    }
}

/// Conjuncts are deduplicated by address here; hashing them structurally
/// could walk an exponentially large tree. Structural duplicates are caught
/// after normalization instead.
fn flatten<'a>(b: &'a Bexpr, seen: &mut HashSet<*const Bexpr>, out: &mut Vec<&'a Bexpr>) {
    match b {
        Bexpr::And(l, r) => {
            flatten(l, seen, out);
            flatten(r, seen, out);
        }
        Bexpr::True => {}
        other => {
            if seen.insert(other as *const Bexpr) {
                out.push(other);
            }
        }
    }
}

fn search(partial: &mut Clause, choices: &[Vec<Clause>], budget: &mut u64) -> Result<Option<Env>, Exhausted> {
    let Some(model) = decide(partial, budget)? else { return Ok(None) };
    let settled = choices.iter().all(|alts| alts.iter().any(|alt| alt.iter().all(|c| c.holds(&model))));
    if settled {
        return Ok(Some(model));
    }
    let (first, rest) = choices.split_first().expect("unsettled choices remain");
    let len = partial.len();
    for alt in first {
        partial.extend(alt.iter().cloned());
        let found = search(partial, rest, budget);
        partial.truncate(len);
        if let Some(model) = found? {
            return Ok(Some(model));
        }
    }
    Ok(None)
}

/// Integer feasibility of a conjunction of normal-form constraints.
pub fn solve_clause(clause: &[LinearConstraint], budget: u64) -> SatResult {
    let mut remaining = budget;
    match decide(clause, &mut remaining) {
        Ok(Some(model)) => {
            assert!(clause.iter().all(|c| c.holds(&model)), "solver model {model} violates a constraint");
            SatResult::Sat(model)
        }
        Ok(None) => SatResult::Unsat,
        Err(Exhausted) => SatResult::Unknown(UnknownReason::BudgetExhausted),
    }
}

/// Disequalities are ignored until a candidate model violates one, at which
/// point that disequality is split into its two strict halves.
fn decide(clause: &[LinearConstraint], budget: &mut u64) -> Result<Option<Env>, Exhausted> {
    let names: BTreeSet<&Ident> = clause.iter().flat_map(|c| c.coefficients.keys()).collect();
    let names: Vec<Ident> = names.into_iter().cloned().collect();
    let index: BTreeMap<&Ident, VarId> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();

    let to_affine = |c: &LinearConstraint| {
        Affine::new(c.coefficients.iter().map(|(n, k)| (index[n], k.clone())).collect(), c.constant.clone())
    };

    let mut eqs = Vec::new();
    let mut les = Vec::new();
    let mut nes = Vec::new();
    for c in clause {
        match c.relation {
            Relation::Eq => eqs.push(to_affine(c)),
            Relation::Le => les.push(to_affine(c)),
            Relation::Ne => nes.push(c),
            _ => les.push(to_affine(&LinearConstraint::new(c.expr(), c.relation))),
        }
    }

    let mut engine = Omega::new(*budget, names.len());
    let result = engine.solve(eqs, les);
    *budget = engine.remaining();
    let Some(model) = result? else { return Ok(None) };
    let env = Env::from_pairs(
        names.iter().enumerate().map(|(i, n)| (n.as_ref(), model.get(&i).cloned().unwrap_or_default())),
    );

    let Some(violated) = nes.iter().position(|c| !c.holds(&env)) else {
        return Ok(Some(env));
    };
    let [below, above] = nes[violated].split_disequality().expect("disequality");
    for half in [below, above] {
        let mut refined: Vec<LinearConstraint> = clause.to_vec();
        let pos = clause.iter().position(|c| c == nes[violated]).expect("present");
        refined[pos] = half;
        if let Some(env) = decide(&refined, budget)? {
            return Ok(Some(env));
        }
    }
    Ok(None)
}
