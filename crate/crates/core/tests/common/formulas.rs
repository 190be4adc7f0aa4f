//! Generated temporal formulas over a small alphabet, with a naive
//! evaluator to compare the checker against.

use proptest::prelude::*;
use wise::ltl::{TraceFormula, Verdict};

/// Formula skeleton over atoms "element == k", so it can be generated,
/// printed on failure and evaluated by the oracle below.
#[derive(Clone, Debug)]
pub enum Shape {
    Is(u8),
    AtLeast(u8),
    G(Box<Shape>),
    F(Box<Shape>),
    Imp(Box<Shape>, Box<Shape>),
}

pub const ALPHABET: u8 = 4;

pub fn shape() -> impl Strategy<Value = Shape> {
    let leaf = prop_oneof![(0..ALPHABET).prop_map(Shape::Is), (0..ALPHABET).prop_map(Shape::AtLeast)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Shape::G(Box::new(f))),
            inner.clone().prop_map(|f| Shape::F(Box::new(f))),
            (inner.clone(), inner).prop_map(|(a, b)| Shape::Imp(Box::new(a), Box::new(b))),
        ]
    })
}

pub fn build(s: &Shape) -> TraceFormula<u8> {
    match s {
        Shape::Is(k) => {
            let k = *k;
            TraceFormula::atom(move |x| *x == k)
        }
        Shape::AtLeast(k) => {
            let k = *k;
            TraceFormula::atom(move |x| *x >= k)
        }
        Shape::G(f) => TraceFormula::globally(build(f)),
        Shape::F(f) => TraceFormula::eventually(build(f)),
        Shape::Imp(a, b) => build(a).implies(build(b)),
    }
}

/// Direct reading of the bounded semantics at suffix `i`, re-evaluating
/// subformulas at every position.
pub fn oracle(trace: &[u8], i: usize, s: &Shape) -> Verdict {
    use Verdict::*;
    let atom = |holds: bool| if holds { Satisfied } else { Violated };
    match s {
        Shape::Is(k) => atom(trace[i] == *k),
        Shape::AtLeast(k) => atom(trace[i] >= *k),
        Shape::F(f) => {
            if (i..trace.len()).any(|j| oracle(trace, j, f) == Satisfied) {
                Satisfied
            } else {
                Undetermined
            }
        }
        Shape::G(f) => {
            if (i..trace.len()).any(|j| oracle(trace, j, f) == Violated) {
                Violated
            } else {
                Undetermined
            }
        }
        Shape::Imp(a, b) => match (oracle(trace, i, a), oracle(trace, i, b)) {
            (Violated, _) => Satisfied,
            (Satisfied, v) => v,
            (Undetermined, Satisfied) => Satisfied,
            (Undetermined, _) => Undetermined,
        },
    }
}

pub fn trace(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..ALPHABET, 1..=max)
}
