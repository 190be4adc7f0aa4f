//! Linear normal form of path conditions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::concrete::Env;
use crate::syntax::{Aexpr, Bexpr, CmpOp, Ident};

/// Clause-count cap for the disjunctive normal form.
pub const DEFAULT_CLAUSE_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("disjunctive normal form exceeds {cap} clauses")]
pub struct DnfBlowup {
    pub cap: usize,
}

/// `Σ cᵢ·xᵢ + k`
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    pub coefficients: BTreeMap<Ident, BigInt>,
    pub constant: BigInt,
}

impl LinExpr {
    pub fn constant(k: impl Into<BigInt>) -> Self {
        LinExpr { coefficients: BTreeMap::new(), constant: k.into() }
    }

    pub fn var(name: &str) -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(Ident::from(name), BigInt::one());
        LinExpr { coefficients, constant: BigInt::zero() }
    }

    fn add_scaled(mut self, other: &LinExpr, factor: &BigInt) -> Self {
        for (name, c) in &other.coefficients {
            let entry = self.coefficients.entry(name.clone()).or_default();
            *entry += c * factor;
            if entry.is_zero() {
                self.coefficients.remove(name);
            }
        }
        self.constant += &other.constant * factor;
        self
    }

    pub fn plus(self, other: &LinExpr) -> Self {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn minus(self, other: &LinExpr) -> Self {
        self.add_scaled(other, &-BigInt::one())
    }

    pub fn negated(&self) -> Self {
        LinExpr::default().minus(self)
    }

    pub fn offset(mut self, k: impl Into<BigInt>) -> Self {
        self.constant += k.into();
        self
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn eval(&self, env: &Env) -> BigInt {
        self.coefficients.iter().fold(self.constant.clone(), |acc, (name, c)| acc + c * env.get(name))
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, c) in &self.coefficients {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if c.abs().is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{}*{name}", c.abs())?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant.is_negative() {
            write!(f, " - {}", self.constant.abs())
        } else if self.constant.is_positive() {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

/// Maps an arithmetic expression to its coefficient form.
pub fn linearize(e: &Aexpr) -> LinExpr {
    linearize_shared(e, &mut HashMap::new())
}

/// Symbolic assignment shares subterms, so a term of modest size in memory
/// can be exponentially large as a tree. Results are cached per node.
fn linearize_shared(e: &Aexpr, cache: &mut HashMap<*const Aexpr, LinExpr>) -> LinExpr {
    let (l, r, subtract) = match e {
        Aexpr::Int(n) => return LinExpr::constant(n.clone()),
        Aexpr::Var(x) => return LinExpr::var(x),
        Aexpr::Add(l, r) => (l, r, false),
        Aexpr::Sub(l, r) => (l, r, true),
    };
    let key: *const Aexpr = e;
    if let Some(done) = cache.get(&key) {
        return done.clone();
    }
    let left = linearize_shared(l, cache);
    let right = linearize_shared(r, cache);
    let out = if subtract { left.minus(&right) } else { left.plus(&right) };
    cache.insert(key, out.clone());
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }
}

/// `Σ cᵢ·xᵢ + k  REL  0`, stored with `REL` one of `=`, `≤` or `≠`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<Ident, BigInt>,
    pub constant: BigInt,
    pub relation: Relation,
}

impl LinearConstraint {
    /// Builds `expr REL 0` and rewrites strict and `≥` relations into `≤`
    /// using integrality (`e < 0 ⇔ e + 1 ≤ 0`).
    pub fn new(expr: LinExpr, relation: Relation) -> Self {
        let (expr, relation) = match relation {
            Relation::Eq | Relation::Ne | Relation::Le => (expr, relation),
            Relation::Lt => (expr.offset(1), Relation::Le),
            Relation::Ge => (expr.negated(), Relation::Le),
            Relation::Gt => (expr.negated().offset(1), Relation::Le),
        };
        LinearConstraint { coefficients: expr.coefficients, constant: expr.constant, relation }
    }

    /// `left OP right` as a constraint over `left - right`.
    pub fn compare(op: CmpOp, left: &Aexpr, right: &Aexpr) -> Self {
        let diff = linearize(left).minus(&linearize(right));
        let relation = match op {
            CmpOp::Eq => Relation::Eq,
            CmpOp::Le => Relation::Le,
            CmpOp::Lt => Relation::Lt,
            CmpOp::Ge => Relation::Ge,
            CmpOp::Gt => Relation::Gt,
        };
        LinearConstraint::new(diff, relation)
    }

    pub fn expr(&self) -> LinExpr {
        LinExpr { coefficients: self.coefficients.clone(), constant: self.constant.clone() }
    }

    pub fn holds(&self, env: &Env) -> bool {
        let value = self.expr().eval(env);
        match self.relation {
            Relation::Eq => value.is_zero(),
            Relation::Ne => !value.is_zero(),
            Relation::Le => !value.is_positive(),
            Relation::Lt => value.is_negative(),
            Relation::Ge => !value.is_negative(),
            Relation::Gt => value.is_positive(),
        }
    }

    /// Truth value when no variables remain.
    pub fn constant_truth(&self) -> Option<bool> {
        self.coefficients.is_empty().then(|| self.holds(&Env::new()))
    }

    /// `≠` as the two strict disjuncts `e < 0`, `e > 0`.
    pub fn split_disequality(&self) -> Option<[LinearConstraint; 2]> {
        (self.relation == Relation::Ne).then(|| {
            [LinearConstraint::new(self.expr(), Relation::Lt), LinearConstraint::new(self.expr(), Relation::Gt)]
        })
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} 0", self.expr(), self.relation.symbol())
    }
}

pub type Clause = Vec<LinearConstraint>;

/// Negation normal form followed by distribution into a disjunction of
/// conjunctions. Literals that mention no variables are folded away and
/// `≠` is split into two strict disjuncts.
pub fn normalize(phi: &Bexpr) -> Result<Vec<Clause>, DnfBlowup> {
    normalize_with_cap(phi, DEFAULT_CLAUSE_CAP)
}

pub fn normalize_with_cap(phi: &Bexpr, cap: usize) -> Result<Vec<Clause>, DnfBlowup> {
    dnf(phi, true, cap)
}

fn dnf(b: &Bexpr, positive: bool, cap: usize) -> Result<Vec<Clause>, DnfBlowup> {
    match (b, positive) {
        (Bexpr::True, true) | (Bexpr::False, false) => Ok(vec![Vec::new()]),
        (Bexpr::True, false) | (Bexpr::False, true) => Ok(Vec::new()),
        (Bexpr::Not(inner), _) => dnf(inner, !positive, cap),
        (Bexpr::And(l, r), true) | (Bexpr::Or(l, r), false) => {
            let left = dnf(l, positive, cap)?;
            if left.is_empty() {
                return Ok(left);
            }
            let right = dnf(r, positive, cap)?;
            product(left, right, cap)
        }
        (Bexpr::Or(l, r), true) | (Bexpr::And(l, r), false) => {
            let mut left = dnf(l, positive, cap)?;
            let right = dnf(r, positive, cap)?;
            if left.len() + right.len() > cap {
                return Err(DnfBlowup { cap });
            }
            left.extend(right);
            Ok(left)
        }
        (Bexpr::Cmp(op, l, r), _) => {
            let c = LinearConstraint::compare(*op, l, r);
            let c = if positive { c } else { negate(c) };
            let literals: Vec<LinearConstraint> = match c.split_disequality() {
                Some(parts) => parts.into(),
                None => vec![c],
            };
            Ok(literals
                .into_iter()
                .filter(|lit| lit.constant_truth() != Some(false))
                .map(|lit| if lit.constant_truth() == Some(true) { Vec::new() } else { vec![lit] })
                .collect())
        }
    }
}

fn negate(c: LinearConstraint) -> LinearConstraint {
    let expr = c.expr();
    match c.relation {
        Relation::Eq => LinearConstraint { relation: Relation::Ne, ..c },
        Relation::Ne => LinearConstraint { relation: Relation::Eq, ..c },
        Relation::Le => LinearConstraint::new(expr, Relation::Gt),
        Relation::Lt => LinearConstraint::new(expr, Relation::Ge),
        Relation::Ge => LinearConstraint::new(expr, Relation::Lt),
        Relation::Gt => LinearConstraint::new(expr, Relation::Le),
    }
}

fn product(left: Vec<Clause>, right: Vec<Clause>, cap: usize) -> Result<Vec<Clause>, DnfBlowup> {
    if left.len().saturating_mul(right.len()) > cap {
        return Err(DnfBlowup { cap });
    }
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in &left {
        for b in &right {
            let mut clause = a.clone();
            clause.extend(b.iter().cloned());
            out.push(clause);
        }
    }
    Ok(out)
}
