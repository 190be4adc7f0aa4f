//! Bounded three-valued checking of temporal properties on stream prefixes.
//!
//! Formulas are built from host predicates with "always", "eventually" and
//! implication. A finite prefix can refute an "always" and witness an
//! "eventually" but never the converse, so such cases come out
//! [`Verdict::Undetermined`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

type Predicate<T> = Arc<dyn Fn(&T) -> bool + Send + Sync>;

pub enum TraceFormula<T> {
    /// Decided on the first element of the (suffix of the) trace.
    Atom(Predicate<T>),
    Globally(Box<TraceFormula<T>>),
    Eventually(Box<TraceFormula<T>>),
    Implies(Box<TraceFormula<T>>, Box<TraceFormula<T>>),
}

impl<T> TraceFormula<T> {
    pub fn atom(pred: impl Fn(&T) -> bool + Send + Sync + 'static) -> Self {
        TraceFormula::Atom(Arc::new(pred))
    }

    pub fn globally(f: Self) -> Self {
        TraceFormula::Globally(Box::new(f))
    }

    pub fn eventually(f: Self) -> Self {
        TraceFormula::Eventually(Box::new(f))
    }

    pub fn implies(self, then: Self) -> Self {
        TraceFormula::Implies(Box::new(self), Box::new(then))
    }
}

impl<T> Clone for TraceFormula<T> {
    fn clone(&self) -> Self {
        match self {
            TraceFormula::Atom(p) => TraceFormula::Atom(p.clone()),
            TraceFormula::Globally(f) => TraceFormula::Globally(f.clone()),
            TraceFormula::Eventually(f) => TraceFormula::Eventually(f.clone()),
            TraceFormula::Implies(a, b) => TraceFormula::Implies(a.clone(), b.clone()),
        }
    }
}

impl<T> fmt::Debug for TraceFormula<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceFormula::Atom(_) => f.write_str("atom"),
            TraceFormula::Globally(g) => write!(f, "G({g:?})"),
            TraceFormula::Eventually(g) => write!(f, "F({g:?})"),
            TraceFormula::Implies(a, b) => write!(f, "({a:?} -> {b:?})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Satisfied,
    Violated,
    Undetermined,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("cannot check a formula on an empty prefix")]
pub struct EmptyPrefix;

pub fn check<T>(prefix: &[T], f: &TraceFormula<T>) -> Result<Verdict, EmptyPrefix> {
    if prefix.is_empty() {
        return Err(EmptyPrefix);
    }
    Ok(Checker::new(prefix).verdicts(f)[0])
}

/// Computes the verdict of a formula at every suffix in one backward pass
/// per subformula, so nested temporal operators stay linear in the prefix.
struct Checker<'a, T> {
    prefix: &'a [T],
}

impl<'a, T> Checker<'a, T> {
    fn new(prefix: &'a [T]) -> Self {
        Checker { prefix }
    }

    fn verdicts(&self, f: &TraceFormula<T>) -> Vec<Verdict> {
        use Verdict::*;
        match f {
            TraceFormula::Atom(p) => self.prefix.iter().map(|x| if p(x) { Satisfied } else { Violated }).collect(),
            TraceFormula::Eventually(g) => {
                let inner = self.verdicts(g);
                let mut out = vec![Undetermined; inner.len()];
                let mut seen = false;
                for i in (0..inner.len()).rev() {
                    seen |= inner[i] == Satisfied;
                    if seen {
                        out[i] = Satisfied;
                    }
                }
                out
            }
            TraceFormula::Globally(g) => {
                let inner = self.verdicts(g);
                let mut out = vec![Undetermined; inner.len()];
                let mut seen = false;
                for i in (0..inner.len()).rev() {
                    seen |= inner[i] == Violated;
                    if seen {
                        out[i] = Violated;
                    }
                }
                out
            }
            TraceFormula::Implies(a, b) => {
                let ante = self.verdicts(a);
                let cons = self.verdicts(b);
                ante.iter()
                    .zip(&cons)
                    .map(|(a, b)| match (a, b) {
                        (Violated, _) => Satisfied,
                        (Satisfied, b) => *b,
                        (Undetermined, Satisfied) => Satisfied,
                        (Undetermined, _) => Undetermined,
                    })
                    .collect()
            }
        }
    }
}
