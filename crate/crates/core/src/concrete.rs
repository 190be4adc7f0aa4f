//! Concrete small-step semantics of IMP.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::syntax::{Aexpr, Bexpr, Ident, Stmt};

/// A total environment: variables that were never bound hold 0.
///
/// Zero bindings are not stored, so derived equality is extensional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Env {
    bindings: BTreeMap<Ident, BigInt>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, N, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (N, V)>,
        N: AsRef<str>,
        V: Into<BigInt>,
    {
        let mut env = Env::new();
        for (name, value) in pairs {
            env.set(Ident::from(name.as_ref()), value.into());
        }
        env
    }

    pub fn get(&self, name: &str) -> &BigInt {
        self.bindings.get(name).unwrap_or(&BigInt::ZERO)
    }

    pub fn set(&mut self, name: Ident, value: BigInt) {
        if value.is_zero() {
            self.bindings.remove(&name);
        } else {
            self.bindings.insert(name, value);
        }
    }

    pub fn with(mut self, name: &str, value: impl Into<BigInt>) -> Self {
        self.set(Ident::from(name), value.into());
        self
    }

    /// Non-zero bindings in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &BigInt)> {
        self.bindings.iter()
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (name, value)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        f.write_str("}")
    }
}

/// A concrete execution state ⟨V, p⟩.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConcState {
    pub env: Env,
    pub pc: Stmt,
}

impl ConcState {
    pub fn new(env: Env, pc: Stmt) -> Self {
        ConcState { env, pc }
    }
}

/// Result of bounded execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecOutcome {
    Terminated(Env),
    StuckAt(ConcState),
    OutOfFuel(ConcState),
}

/// Three-valued answer to "does this input trigger a bug?".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BadInput {
    Yes,
    NoTerminated,
    Unknown,
}

pub fn eval_aexpr(e: &Aexpr, v: &Env) -> BigInt {
    Evaluator::new(v).aexpr(e)
}

pub fn eval_bexpr(b: &Bexpr, v: &Env) -> bool {
    Evaluator::new(v).bexpr(b)
}

/// Expression evaluation that visits each shared subterm once.
///
/// Symbolic stores build terms whose tree size can be exponential in their
/// size in memory. Any subterm reachable along two different paths has an
/// `Arc` count above one somewhere on the way, so caching exactly those
/// nodes keeps evaluation linear in the number of distinct nodes.
pub(crate) struct Evaluator<'a> {
    env: &'a Env,
    cache: HashMap<*const Aexpr, BigInt>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(env: &'a Env) -> Self {
        Evaluator { env, cache: HashMap::new() }
    }

    pub(crate) fn aexpr(&mut self, e: &Aexpr) -> BigInt {
        match e {
            Aexpr::Int(n) => n.clone(),
            Aexpr::Var(x) => self.env.get(x).clone(),
            Aexpr::Add(l, r) => self.child(l) + self.child(r),
            Aexpr::Sub(l, r) => self.child(l) - self.child(r),
        }
    }

    fn child(&mut self, e: &Arc<Aexpr>) -> BigInt {
        let compound = matches!(**e, Aexpr::Add(..) | Aexpr::Sub(..));
        if !compound || Arc::strong_count(e) == 1 {
            return self.aexpr(e);
        }
        let key = Arc::as_ptr(e);
        if let Some(n) = self.cache.get(&key) {
            return n.clone();
        }
        let n = self.aexpr(e);
        self.cache.insert(key, n.clone());
        n
    }

    pub(crate) fn bexpr(&mut self, b: &Bexpr) -> bool {
        match b {
            Bexpr::True => true,
            Bexpr::False => false,
            Bexpr::And(l, r) => self.bexpr(l) && self.bexpr(r),
            Bexpr::Or(l, r) => self.bexpr(l) || self.bexpr(r),
            Bexpr::Not(b) => !self.bexpr(b),
            Bexpr::Cmp(op, l, r) => {
                let (l, r) = (self.aexpr(l), self.aexpr(r));
                op.holds(&l, &r)
            }
        }
    }
}

/// One small step. `None` when no rule applies.
pub fn step(s: &ConcState) -> Option<ConcState> {
    let env = &s.env;
    match &s.pc {
        Stmt::Skip | Stmt::Fail => None,
        Stmt::Assign(x, e) => {
            let mut next = env.clone();
            next.set(x.clone(), eval_aexpr(e, env));
            Some(ConcState::new(next, Stmt::Skip))
        }
        Stmt::If(b, then, otherwise) => {
            let branch = if eval_bexpr(b, env) { then } else { otherwise };
            Some(ConcState::new(env.clone(), (**branch).clone()))
        }
        Stmt::While(b, body) => {
            if eval_bexpr(b, env) {
                let unrolled = Stmt::Seq(body.clone(), Arc::new(s.pc.clone()));
                Some(ConcState::new(env.clone(), unrolled))
            } else {
                Some(ConcState::new(env.clone(), Stmt::Skip))
            }
        }
        Stmt::Seq(first, rest) => {
            if let Stmt::Skip = **first {
                return Some(ConcState::new(env.clone(), (**rest).clone()));
            }
            let inner = ConcState::new(env.clone(), (**first).clone());
            step(&inner).map(|n| ConcState::new(n.env, Stmt::Seq(Arc::new(n.pc), rest.clone())))
        }
    }
}

/// `p = skip ∨ ∃σ′. σ → σ′`
pub fn progress(s: &ConcState) -> bool {
    s.pc == Stmt::Skip || step(s).is_some()
}

pub fn is_stuck_concrete(s: &ConcState) -> bool {
    !progress(s)
}

/// Runs at most `fuel` steps. Recognising a final (skip or stuck) state
/// consumes no fuel.
pub fn exec(s: &ConcState, fuel: u64) -> ExecOutcome {
    let mut current = s.clone();
    let mut remaining = fuel;
    loop {
        if current.pc == Stmt::Skip {
            return ExecOutcome::Terminated(current.env);
        }
        if remaining == 0 {
            return match step(&current) {
                None => ExecOutcome::StuckAt(current),
                Some(_) => ExecOutcome::OutOfFuel(current),
            };
        }
        match step(&current) {
            None => return ExecOutcome::StuckAt(current),
            Some(next) => current = next,
        }
        remaining -= 1;
    }
}

/// Iterator over the states visited by concrete execution, starting with
/// the initial state itself.
pub struct Trace {
    next: Option<ConcState>,
}

pub fn trace(s: &ConcState) -> Trace {
    Trace { next: Some(s.clone()) }
}

impl Iterator for Trace {
    type Item = ConcState;

    fn next(&mut self) -> Option<ConcState> {
        let current = self.next.take()?;
        self.next = step(&current);
        Some(current)
    }
}

pub fn bad_input(p: &Stmt, v0: &Env, fuel: u64) -> BadInput {
    match exec(&ConcState::new(v0.clone(), p.clone()), fuel) {
        ExecOutcome::StuckAt(_) => BadInput::Yes,
        ExecOutcome::Terminated(_) => BadInput::NoTerminated,
        ExecOutcome::OutOfFuel(_) => BadInput::Unknown,
    }
}
