//! Symbolic stores, symbolic evaluation and the symbolic successor function.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::concrete::{eval_bexpr, ConcState, Env, Evaluator};
use crate::syntax::{Aexpr, Bexpr, Ident, Stmt};

/// Maps variables to expressions over the initial symbolic inputs.
///
/// Unbound variables map to themselves, so `SymStore::identity()` is the
/// empty map. Self-bindings are never stored, which keeps equality
/// extensional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymStore {
    bindings: BTreeMap<Ident, Aexpr>,
}

impl SymStore {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn lookup(&self, name: &Ident) -> Aexpr {
        self.bindings.get(name).cloned().unwrap_or_else(|| Aexpr::Var(name.clone()))
    }

    pub fn set(&mut self, name: Ident, value: Aexpr) {
        if matches!(&value, Aexpr::Var(y) if *y == name) {
            self.bindings.remove(&name);
        } else {
            self.bindings.insert(name, value);
        }
    }

    pub fn with(mut self, name: &str, value: Aexpr) -> Self {
        self.set(Ident::from(name), value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Aexpr)> {
        self.bindings.iter()
    }
}

impl fmt::Display for SymStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("id");
        }
        f.write_str("{")?;
        for (i, (name, e)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name} := {e}")?;
        }
        f.write_str("}")
    }
}

/// A symbolic state ⟨φ, S, p⟩.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymState {
    pub path: Bexpr,
    pub store: SymStore,
    pub pc: Stmt,
}

impl SymState {
    pub fn new(path: Bexpr, store: SymStore, pc: Stmt) -> Self {
        SymState { path, store, pc }
    }

    /// ⟨true, id, p⟩
    pub fn initial(p: Stmt) -> Self {
        SymState::new(Bexpr::True, SymStore::identity(), p)
    }
}

impl fmt::Display for SymState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}, {}>", self.path, self.store, self.pc)
    }
}

pub fn sym_eval_aexpr(e: &Aexpr, s: &SymStore) -> Aexpr {
    match e {
        Aexpr::Int(_) => e.clone(),
        Aexpr::Var(x) => s.lookup(x),
        Aexpr::Add(l, r) => Aexpr::add(sym_eval_aexpr(l, s), sym_eval_aexpr(r, s)),
        Aexpr::Sub(l, r) => Aexpr::sub(sym_eval_aexpr(l, s), sym_eval_aexpr(r, s)),
    }
}

pub fn sym_eval_bexpr(b: &Bexpr, s: &SymStore) -> Bexpr {
    match b {
        Bexpr::True | Bexpr::False => b.clone(),
        Bexpr::And(l, r) => Bexpr::and(sym_eval_bexpr(l, s), sym_eval_bexpr(r, s)),
        Bexpr::Or(l, r) => Bexpr::or(sym_eval_bexpr(l, s), sym_eval_bexpr(r, s)),
        Bexpr::Not(inner) => Bexpr::not(sym_eval_bexpr(inner, s)),
        Bexpr::Cmp(op, l, r) => Bexpr::Cmp(*op, sym_eval_aexpr(l, s), sym_eval_aexpr(r, s)),
    }
}

/// All symbolic successors of `s`, in a fixed order: for branching
/// statements the taken branch comes first.
pub fn expand(s: &SymState) -> Vec<SymState> {
    let SymState { path, store, pc } = s;
    match pc {
        Stmt::Skip | Stmt::Fail => Vec::new(),
        Stmt::Seq(first, rest) if **first == Stmt::Skip => {
            vec![SymState::new(path.clone(), store.clone(), (**rest).clone())]
        }
        Stmt::Assign(x, e) => {
            let mut next = store.clone();
            next.set(x.clone(), sym_eval_aexpr(e, store));
            vec![SymState::new(path.clone(), next, Stmt::Skip)]
        }
        Stmt::Seq(first, rest) => {
            let head = SymState::new(path.clone(), store.clone(), (**first).clone());
            expand(&head)
                .into_iter()
                .map(|n| SymState::new(n.path, n.store, Stmt::Seq(Arc::new(n.pc), rest.clone())))
                .collect()
        }
        Stmt::While(cond, body) => {
            let c = sym_eval_bexpr(cond, store);
            vec![
                SymState::new(
                    Bexpr::and(path.clone(), c.clone()),
                    store.clone(),
                    Stmt::Seq(body.clone(), Arc::new(pc.clone())),
                ),
                SymState::new(Bexpr::and(path.clone(), Bexpr::not(c)), store.clone(), Stmt::Skip),
            ]
        }
        Stmt::If(cond, then, otherwise) => {
            let c = sym_eval_bexpr(cond, store);
            vec![
                SymState::new(Bexpr::and(path.clone(), c.clone()), store.clone(), (**then).clone()),
                SymState::new(Bexpr::and(path.clone(), Bexpr::not(c)), store.clone(), (**otherwise).clone()),
            ]
        }
    }
}

/// V ∘ S: evaluates every store binding under `v0`; unbound variables keep
/// their `v0` value.
pub fn concretize(v0: &Env, s: &SymStore) -> Env {
    let mut eval = Evaluator::new(v0);
    let mut env = v0.clone();
    for (name, e) in s.iter() {
        env.set(name.clone(), eval.aexpr(e));
    }
    env
}

/// σ ≃_{V0} σ̂: same program counter, the environment is the concretised
/// store and `v0` satisfies the path condition.
pub fn simulates(c: &ConcState, v0: &Env, s: &SymState) -> bool {
    c.pc == s.pc && c.env == concretize(v0, &s.store) && eval_bexpr(&s.path, v0)
}

/// Error oracle: the leftmost pending statement is `fail`.
pub fn is_stuck_sym(s: &SymState) -> bool {
    fn stuck(p: &Stmt) -> bool {
        match p {
            Stmt::Fail => true,
            Stmt::Seq(first, _) => stuck(first),
            _ => false,
        }
    }
    stuck(&s.pc)
}
