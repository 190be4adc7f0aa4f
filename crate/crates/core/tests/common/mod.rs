//! Generators, independent oracles and shared property checks.
#![allow(dead_code)]

pub mod formulas;

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::thread;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestCaseError, TestRng, TestRunner};

use wise::concrete::{eval_aexpr, eval_bexpr, exec, step, ConcState, Env, ExecOutcome};
use wise::symbolic::{concretize, expand, simulates, sym_eval_aexpr, SymState, SymStore};
use wise::syntax::{Aexpr, Bexpr, CmpOp, Ident, Stmt};

pub const VARS: [&str; 3] = ["x", "y", "z"];

pub type Lits = RangeInclusive<i64>;

/// Literal range used by the lemma suites.
pub const LITS: Lits = -8..=8;

/// Fixed-seed configuration so every run sees the same cases.
pub fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, rng_seed: RngSeed::Fixed(0x5eed), ..Config::default() }
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(config(cases), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Runs `f` on a thread whose stack can hold very deep path conditions.
pub fn big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(f)
        .expect("spawn")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}

// ---------------------------------------------------------------------------
// Generators

pub fn ident() -> impl Strategy<Value = Ident> {
    prop::sample::select(&VARS[..]).prop_map(Ident::from)
}

pub fn cmp_op() -> impl Strategy<Value = CmpOp> {
    prop::sample::select(vec![CmpOp::Eq, CmpOp::Le, CmpOp::Lt, CmpOp::Ge, CmpOp::Gt])
}

pub fn aexpr(depth: u32, lits: Lits) -> BoxedStrategy<Aexpr> {
    let leaf = prop_oneof![lits.prop_map(Aexpr::int), ident().prop_map(Aexpr::Var)];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Aexpr::add(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Aexpr::sub(l, r)),
        ]
    })
    .boxed()
}

pub fn bexpr(depth: u32, lits: Lits) -> BoxedStrategy<Bexpr> {
    let operand = aexpr(depth.saturating_sub(1).min(2), lits);
    let leaf = prop_oneof![
        1 => Just(Bexpr::True),
        1 => Just(Bexpr::False),
        4 => (cmp_op(), operand.clone(), operand).prop_map(|(op, l, r)| Bexpr::cmp(op, l, r)),
    ];
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Bexpr::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Bexpr::or(l, r)),
            inner.prop_map(Bexpr::not),
        ]
    })
    .boxed()
}

pub fn stmt(depth: u32, lits: Lits) -> BoxedStrategy<Stmt> {
    let cond = bexpr(2, lits.clone());
    let leaf = prop_oneof![
        1 => Just(Stmt::Skip),
        1 => Just(Stmt::Fail),
        3 => (ident(), aexpr(2, lits)).prop_map(|(x, e)| Stmt::Assign(x, e)),
    ];
    leaf.prop_recursive(depth, 48, 3, move |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Stmt::seq(a, b)),
            2 => (cond.clone(), inner.clone(), inner.clone()).prop_map(|(b, t, e)| Stmt::if_then_else(b, t, e)),
            1 => (cond.clone(), inner).prop_map(|(b, s)| Stmt::while_do(b, s)),
        ]
    })
    .boxed()
}

/// Programs without loops: their symbolic execution tree is finite.
pub fn loop_free_stmt(depth: u32, lits: Lits) -> BoxedStrategy<Stmt> {
    let cond = bexpr(2, lits.clone());
    let leaf = prop_oneof![
        1 => Just(Stmt::Skip),
        1 => Just(Stmt::Fail),
        3 => (ident(), aexpr(2, lits)).prop_map(|(x, e)| Stmt::Assign(x, e)),
    ];
    leaf.prop_recursive(depth, 48, 3, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Stmt::seq(a, b)),
            (cond.clone(), inner.clone(), inner).prop_map(|(b, t, e)| Stmt::if_then_else(b, t, e)),
        ]
    })
    .boxed()
}

pub fn env(lits: Lits) -> BoxedStrategy<Env> {
    prop::collection::vec(lits, VARS.len()).prop_map(|vals| Env::from_pairs(VARS.iter().zip(vals))).boxed()
}

pub fn store(depth: u32, lits: Lits) -> BoxedStrategy<SymStore> {
    prop::collection::vec((ident(), aexpr(depth, lits)), 0..=3)
        .prop_map(|bindings| {
            let mut s = SymStore::identity();
            for (x, e) in bindings {
                s.set(x, e);
            }
            s
        })
        .boxed()
}

pub fn sym_state(depth: u32, lits: Lits) -> BoxedStrategy<SymState> {
    (bexpr(2, lits.clone()), store(2, lits.clone()), stmt(depth, lits))
        .prop_map(|(path, store, pc)| SymState::new(path, store, pc))
        .boxed()
}

/// `c·v` written with additions and subtractions only.
pub fn scaled(c: i64, v: &str) -> Aexpr {
    let mut e = Aexpr::int(0);
    for _ in 0..c.unsigned_abs() {
        e = if c > 0 { Aexpr::add(e, Aexpr::var(v)) } else { Aexpr::sub(e, Aexpr::var(v)) };
    }
    e
}

/// `Σ cᵢ·xᵢ  OP  k` with coefficients in [-4, 4].
pub fn linear_atom() -> BoxedStrategy<Bexpr> {
    (prop::collection::vec(-4i64..=4, VARS.len()), cmp_op(), -12i64..=12)
        .prop_map(|(coeffs, op, k)| {
            let lhs = VARS
                .iter()
                .zip(coeffs)
                .filter(|(_, c)| *c != 0)
                .map(|(v, c)| scaled(c, v))
                .reduce(Aexpr::add)
                .unwrap_or(Aexpr::int(0));
            Bexpr::cmp(op, lhs, Aexpr::int(k))
        })
        .boxed()
}

/// Path-condition-like formulas: mostly conjunctions, some disjunction and
/// negation.
pub fn linear_formula(depth: u32) -> BoxedStrategy<Bexpr> {
    linear_atom()
        .prop_recursive(depth, 16, 2, |inner| {
            prop_oneof![
                4 => (inner.clone(), inner.clone()).prop_map(|(l, r)| Bexpr::and(l, r)),
                1 => (inner.clone(), inner.clone()).prop_map(|(l, r)| Bexpr::or(l, r)),
                1 => inner.prop_map(Bexpr::not),
            ]
        })
        .boxed()
}

// ---------------------------------------------------------------------------
// Independent oracles over machine integers

pub fn small(n: &BigInt) -> i128 {
    i128::try_from(n).expect("value fits in i128")
}

pub fn lookup(env: &Env) -> impl Fn(&str) -> i128 + '_ {
    move |name| small(env.get(name))
}

pub fn oracle_aexpr(e: &Aexpr, v: &dyn Fn(&str) -> i128) -> i128 {
    match e {
        Aexpr::Int(n) => small(n),
        Aexpr::Var(x) => v(x),
        Aexpr::Add(l, r) => oracle_aexpr(l, v) + oracle_aexpr(r, v),
        Aexpr::Sub(l, r) => oracle_aexpr(l, v) - oracle_aexpr(r, v),
    }
}

pub fn oracle_bexpr(b: &Bexpr, v: &dyn Fn(&str) -> i128) -> bool {
    match b {
        Bexpr::True => true,
        Bexpr::False => false,
        Bexpr::And(l, r) => oracle_bexpr(l, v) && oracle_bexpr(r, v),
        Bexpr::Or(l, r) => oracle_bexpr(l, v) || oracle_bexpr(r, v),
        Bexpr::Not(inner) => !oracle_bexpr(inner, v),
        Bexpr::Cmp(op, l, r) => {
            let (a, c) = (oracle_aexpr(l, v), oracle_aexpr(r, v));
            match op {
                CmpOp::Eq => a == c,
                CmpOp::Le => a <= c,
                CmpOp::Lt => a < c,
                CmpOp::Ge => a >= c,
                CmpOp::Gt => a > c,
            }
        }
    }
}

/// Per-variable evaluation of a store, written without `concretize`.
pub fn oracle_concretize(v0: &Env, s: &SymStore) -> HashMap<String, i128> {
    let mut names: Vec<String> = v0.iter().map(|(n, _)| n.to_string()).collect();
    names.extend(s.iter().map(|(n, _)| n.to_string()));
    names.extend(VARS.iter().map(|v| v.to_string()));
    names
        .into_iter()
        .map(|n| {
            let value = oracle_aexpr(&s.lookup(&Ident::from(n.as_str())), &lookup(v0));
            (n, value)
        })
        .collect()
}

/// Leftmost statement of the sequence spine.
pub fn leftmost(p: &Stmt) -> &Stmt {
    match p {
        Stmt::Seq(first, _) => leftmost(first),
        other => other,
    }
}

/// Environments over x, y, z with every value in `lo..=hi`.
pub fn box_envs(lo: i64, hi: i64) -> Vec<Env> {
    let mut out = Vec::new();
    for x in lo..=hi {
        for y in lo..=hi {
            for z in lo..=hi {
                out.push(Env::new().with("x", x).with("y", y).with("z", z));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Lemma checks shared by the property suites and the acceptance runner

/// Updating the store then concretising equals concretising then updating.
pub fn check_comp_update(v: &Env, s: &SymStore, x: &Ident, e: &Aexpr) -> Result<(), TestCaseError> {
    let mut updated = s.clone();
    updated.set(x.clone(), sym_eval_aexpr(e, s));
    let left = concretize(v, &updated);
    let mut right = concretize(v, s);
    let value = eval_aexpr(e, &right);
    right.set(x.clone(), value);
    prop_assert_eq!(left, right);
    Ok(())
}

/// Evaluating a substituted expression equals evaluating in the
/// concretised environment.
pub fn check_substitution(v: &Env, s: &SymStore, e: &Aexpr, b: &Bexpr) -> Result<(), TestCaseError> {
    let composed = concretize(v, s);
    prop_assert_eq!(eval_aexpr(&sym_eval_aexpr(e, s), v), eval_aexpr(e, &composed));
    prop_assert_eq!(eval_bexpr(&wise::symbolic::sym_eval_bexpr(b, s), v), eval_bexpr(b, &composed));
    Ok(())
}

/// Along an expand-chain picked by `choices`, every input satisfying the
/// last path condition satisfies all earlier ones.
pub fn check_sym_steps_path(p: &Stmt, choices: &[usize], envs: &[Env]) -> Result<(), TestCaseError> {
    let mut chain = vec![SymState::initial(p.clone())];
    for &c in choices {
        let succ = expand(chain.last().unwrap());
        if succ.is_empty() {
            break;
        }
        chain.push(succ[c % succ.len()].clone());
    }
    let last = &chain.last().unwrap().path;
    for v in envs {
        if eval_bexpr(last, v) {
            for earlier in &chain {
                prop_assert!(eval_bexpr(&earlier.path, v), "{} holds but {} does not at {}", last, earlier.path, v);
            }
        }
    }
    Ok(())
}

/// Each symbolic successor, instantiated at an input satisfying its path
/// condition, is the concrete successor of the instantiated parent.
pub fn check_sym_step_step(s: &SymState, envs: &[Env]) -> Result<(), TestCaseError> {
    for next in expand(s) {
        for v in envs {
            if !eval_bexpr(&next.path, v) {
                continue;
            }
            let here = ConcState::new(concretize(v, &s.store), s.pc.clone());
            let expected = ConcState::new(concretize(v, &next.store), next.pc.clone());
            prop_assert_eq!(step(&here), Some(expected));
        }
    }
    Ok(())
}

/// Every concrete step from a state simulated by `s` is matched by some
/// symbolic successor under the same initial input.
pub fn check_step_simulation(s: &SymState, envs: &[Env]) -> Result<(), TestCaseError> {
    let successors = expand(s);
    for v0 in envs {
        let c = ConcState::new(concretize(v0, &s.store), s.pc.clone());
        if !simulates(&c, v0, s) {
            continue;
        }
        if let Some(next) = step(&c) {
            prop_assert!(
                successors.iter().any(|n| simulates(&next, v0, n)),
                "no successor of {} simulates {:?} from {}",
                s,
                next.pc,
                v0
            );
        }
    }
    Ok(())
}

/// Replays a satisfiable symbolic state: concrete execution from `model`
/// must pass through the instantiated state.
pub fn replays_through(p: &Stmt, model: &Env, s: &SymState, fuel: usize) -> bool {
    let target = ConcState::new(concretize(model, &s.store), s.pc.clone());
    wise::concrete::trace(&ConcState::new(model.clone(), p.clone())).take(fuel + 1).any(|c| c == target)
}

/// Concrete stuck state reached from `v0`, if any, within `fuel`.
pub fn stuck_state(p: &Stmt, v0: &Env, fuel: u64) -> Option<ConcState> {
    match exec(&ConcState::new(v0.clone(), p.clone()), fuel) {
        ExecOutcome::StuckAt(c) => Some(c),
        _ => None,
    }
}

/// First point of the cube `[lo, hi]³` over x, y, z satisfying `phi`.
pub fn brute_force_model(phi: &Bexpr, lo: i64, hi: i64) -> Option<[i64; 3]> {
    for x in lo..=hi {
        for y in lo..=hi {
            for z in lo..=hi {
                let v = |name: &str| -> i128 {
                    match name {
                        "x" => x.into(),
                        "y" => y.into(),
                        "z" => z.into(),
                        _ => 0,
                    }
                };
                if oracle_bexpr(phi, &v) {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

/// Solver agreement with exhaustive search on `[-10, 10]³`. Returns the
/// verdict so callers can tally them.
pub fn check_solver_agreement(phi: &Bexpr) -> Result<wise::solver::SatResult, TestCaseError> {
    use wise::solver::{is_sat, SatResult, DEFAULT_BUDGET};
    let verdict = is_sat(phi, DEFAULT_BUDGET);
    prop_assert_eq!(&is_sat(phi, DEFAULT_BUDGET), &verdict, "nondeterministic verdict for {}", phi);
    let witness = brute_force_model(phi, -10, 10);
    match &verdict {
        SatResult::Sat(model) => {
            prop_assert!(eval_bexpr(phi, model), "model {} does not satisfy {}", model, phi);
            prop_assert!(oracle_bexpr(phi, &lookup(model)), "oracle rejects model {} of {}", model, phi);
        }
        SatResult::Unsat => prop_assert!(witness.is_none(), "false Unsat for {}: {:?}", phi, witness),
        SatResult::Unknown(_) => {}
    }
    Ok(verdict)
}
