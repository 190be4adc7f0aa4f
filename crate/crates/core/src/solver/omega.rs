//! Integer feasibility of conjunctions of linear constraints.
//!
//! Equalities are eliminated by substitution, using the symmetric-modulo
//! reduction when no variable has a unit coefficient. Inequalities are
//! eliminated one variable at a time; when the elimination is not exact the
//! real shadow refutes, the dark shadow confirms, and the gap between them
//! is covered by enumerating splinter equalities. Every step that succeeds
//! records how to reconstruct the eliminated variable so that a satisfying
//! assignment comes out at the end.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) type VarId = usize;
pub(crate) type Model = BTreeMap<VarId, BigInt>;

/// The elimination budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

/// `Σ aᵢ·xᵢ + c`
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Affine {
    pub terms: BTreeMap<VarId, BigInt>,
    pub constant: BigInt,
}

impl Affine {
    pub fn new(terms: BTreeMap<VarId, BigInt>, constant: BigInt) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Affine { terms, constant }
    }

    fn coeff(&self, v: VarId) -> BigInt {
        self.terms.get(&v).cloned().unwrap_or_default()
    }

    fn mentions(&self, v: VarId) -> bool {
        self.terms.contains_key(&v)
    }

    fn without(&self, v: VarId) -> Affine {
        let mut out = self.clone();
        out.terms.remove(&v);
        out
    }

    fn scaled(&self, k: &BigInt) -> Affine {
        if k.is_zero() {
            return Affine::default();
        }
        Affine { terms: self.terms.iter().map(|(v, c)| (*v, c * k)).collect(), constant: &self.constant * k }
    }

    fn plus(&self, other: &Affine) -> Affine {
        let mut terms = self.terms.clone();
        for (v, c) in &other.terms {
            let entry = terms.entry(*v).or_default();
            *entry += c;
            if entry.is_zero() {
                terms.remove(v);
            }
        }
        Affine { terms, constant: &self.constant + &other.constant }
    }

    fn substitute(&self, v: VarId, def: &Affine) -> Affine {
        match self.terms.get(&v) {
            None => self.clone(),
            Some(c) => self.without(v).plus(&def.scaled(c)),
        }
    }

    pub fn eval(&self, model: &Model) -> BigInt {
        self.terms.iter().fold(self.constant.clone(), |acc, (v, c)| acc + c * model.get(v).cloned().unwrap_or_default())
    }

    fn gcd_of_terms(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }
}

enum Normalized {
    Trivial,
    Contradiction,
    Keep(Affine),
}

/// `a = 0`: divide through by the coefficient gcd.
fn normalize_eq(a: Affine) -> Normalized {
    if a.terms.is_empty() {
        return if a.constant.is_zero() { Normalized::Trivial } else { Normalized::Contradiction };
    }
    let g = a.gcd_of_terms();
    if !a.constant.is_multiple_of(&g) {
        return Normalized::Contradiction;
    }
    Normalized::Keep(Affine { terms: a.terms.iter().map(|(v, c)| (*v, c / &g)).collect(), constant: &a.constant / &g })
}

/// `a ≤ 0`: divide by the gcd and tighten the constant upwards.
fn normalize_le(a: Affine) -> Normalized {
    if a.terms.is_empty() {
        return if a.constant.is_positive() { Normalized::Contradiction } else { Normalized::Trivial };
    }
    let g = a.gcd_of_terms();
    Normalized::Keep(Affine {
        terms: a.terms.iter().map(|(v, c)| (*v, c / &g)).collect(),
        constant: a.constant.div_ceil(&g),
    })
}

/// `a mod̂ m = a - m·⌊a/m + 1/2⌋`
fn mod_hat(a: &BigInt, m: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    a - m * (&two * a + m).div_floor(&(&two * m))
}

pub(crate) struct Omega {
    budget: u64,
    next_var: VarId,
}

impl Omega {
    /// `first_fresh` must exceed every variable id in the input.
    pub fn new(budget: u64, first_fresh: VarId) -> Self {
        Omega { budget, next_var: first_fresh }
    }

    pub fn remaining(&self) -> u64 {
        self.budget
    }

    fn tick(&mut self, cost: u64) -> Result<(), Exhausted> {
        if self.budget < cost {
            self.budget = 0;
            return Err(Exhausted);
        }
        self.budget -= cost;
        Ok(())
    }

    fn fresh(&mut self) -> VarId {
        let v = self.next_var;
        self.next_var += 1;
        v
    }

    /// Solves `eqs = 0 ∧ les ≤ 0` over the integers.
    pub fn solve(&mut self, eqs: Vec<Affine>, les: Vec<Affine>) -> Result<Option<Model>, Exhausted> {
        self.tick(1)?;

        let mut equalities = Vec::new();
        for e in eqs {
            match normalize_eq(e) {
                Normalized::Trivial => {}
                Normalized::Contradiction => return Ok(None),
                Normalized::Keep(a) => equalities.push(a),
            }
        }

        // Keep only the tightest constant for each coefficient vector.
        let mut tightest: BTreeMap<BTreeMap<VarId, BigInt>, BigInt> = BTreeMap::new();
        for l in les {
            match normalize_le(l) {
                Normalized::Trivial => {}
                Normalized::Contradiction => return Ok(None),
                Normalized::Keep(a) => {
                    tightest
                        .entry(a.terms)
                        .and_modify(|c| {
                            if a.constant > *c {
                                *c = a.constant.clone();
                            }
                        })
                        .or_insert(a.constant);
                }
            }
        }
        let mut inequalities = Vec::with_capacity(tightest.len());
        for (terms, c) in &tightest {
            let opposite: BTreeMap<VarId, BigInt> = terms.iter().map(|(v, a)| (*v, -a)).collect();
            if let Some(d) = tightest.get(&opposite) {
                let slack = c + d;
                if slack.is_positive() {
                    return Ok(None);
                }
                if slack.is_zero() && *terms < opposite {
                    equalities.push(Affine { terms: terms.clone(), constant: c.clone() });
                }
            }
            inequalities.push(Affine { terms: terms.clone(), constant: c.clone() });
        }

        if !equalities.is_empty() {
            return self.eliminate_equality(equalities, inequalities);
        }
        self.eliminate_inequalities(inequalities)
    }

    fn eliminate_equality(&mut self, mut eqs: Vec<Affine>, les: Vec<Affine>) -> Result<Option<Model>, Exhausted> {
        let eq = eqs.remove(0);

        if let Some((&v, a)) = eq.terms.iter().find(|(_, a)| a.abs().is_one()) {
            // a·x + r = 0 with a = ±1, so x = -a·r.
            let def = eq.without(v).scaled(&-a);
            let eqs = eqs.iter().map(|e| e.substitute(v, &def)).collect();
            let les = les.iter().map(|l| l.substitute(v, &def)).collect();
            return Ok(self.solve(eqs, les)?.map(|mut model| {
                let value = def.eval(&model);
                model.insert(v, value);
                model
            }));
        }

        // No unit coefficient: introduce σ with m·σ = Σ (aᵢ mod̂ m)·xᵢ + (c mod̂ m)
        // where m = |a_k| + 1, and solve it for x_k, whose reduced coefficient
        // is -sign(a_k).
        let (&k, a_k) = eq
            .terms
            .iter()
            .min_by(|(v1, c1), (v2, c2)| c1.abs().cmp(&c2.abs()).then(v1.cmp(v2)))
            .expect("normalised equality has terms");
        let m = a_k.abs() + BigInt::one();
        let sign = a_k.signum();
        let sigma = self.fresh();
        let mut terms: BTreeMap<VarId, BigInt> =
            eq.terms.iter().filter(|(v, _)| **v != k).map(|(v, c)| (*v, mod_hat(c, &m))).collect();
        terms.insert(sigma, -&m);
        let def = Affine::new(terms, mod_hat(&eq.constant, &m)).scaled(&sign);

        let mut next_eqs = vec![eq.substitute(k, &def)];
        next_eqs.extend(eqs.iter().map(|e| e.substitute(k, &def)));
        let les = les.iter().map(|l| l.substitute(k, &def)).collect();
        Ok(self.solve(next_eqs, les)?.map(|mut model| {
            let value = def.eval(&model);
            model.insert(k, value);
            model.remove(&sigma);
            model
        }))
    }

    fn eliminate_inequalities(&mut self, les: Vec<Affine>) -> Result<Option<Model>, Exhausted> {
        if les.is_empty() {
            return Ok(Some(Model::new()));
        }

        let vars: BTreeSet<VarId> = les.iter().flat_map(|l| l.terms.keys().copied()).collect();
        let mut best: Option<(bool, usize, VarId)> = None;
        for &v in &vars {
            let lowers: Vec<BigInt> = les.iter().map(|l| l.coeff(v)).filter(|c| c.is_negative()).collect();
            let uppers: Vec<BigInt> = les.iter().map(|l| l.coeff(v)).filter(|c| c.is_positive()).collect();
            if lowers.is_empty() || uppers.is_empty() {
                // Unbounded on one side: every constraint on v can be met.
                let (with, rest): (Vec<_>, Vec<_>) = les.into_iter().partition(|l| l.mentions(v));
                return Ok(self.solve(Vec::new(), rest)?.map(|mut model| {
                    let value = pick_value(v, &with, &model);
                    model.insert(v, value);
                    model
                }));
            }
            let exact = lowers.iter().all(|c| c.abs().is_one()) || uppers.iter().all(|c| c.is_one());
            let pairs = lowers.len() * uppers.len();
            let candidate = (!exact, pairs, v);
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
        let (inexact, _, v) = best.expect("at least one variable");

        let (with, rest): (Vec<_>, Vec<_>) = les.iter().cloned().partition(|l| l.mentions(v));
        // lower: -l·x + R ≤ 0,  upper: u·x + R ≤ 0
        let lowers: Vec<(BigInt, Affine)> =
            with.iter().filter(|l| l.coeff(v).is_negative()).map(|l| (-l.coeff(v), l.without(v))).collect();
        let uppers: Vec<(BigInt, Affine)> =
            with.iter().filter(|l| l.coeff(v).is_positive()).map(|l| (l.coeff(v), l.without(v))).collect();
        self.tick((lowers.len() * uppers.len()) as u64)?;

        let shadow = |slack: bool| -> Vec<Affine> {
            let mut out = rest.clone();
            for (l, lower) in &lowers {
                for (u, upper) in &uppers {
                    let mut combined = lower.scaled(u).plus(&upper.scaled(l));
                    if slack {
                        combined.constant += (l - 1) * (u - 1);
                    }
                    out.push(combined);
                }
            }
            out
        };

        if !inexact {
            return Ok(self.solve(Vec::new(), shadow(false))?.map(|mut model| {
                let value = pick_value(v, &with, &model);
                model.insert(v, value);
                model
            }));
        }

        if self.solve(Vec::new(), shadow(false))?.is_none() {
            return Ok(None);
        }
        if let Some(mut model) = self.solve(Vec::new(), shadow(true))? {
            let value = pick_value(v, &with, &model);
            model.insert(v, value);
            return Ok(Some(model));
        }

        // Splinters: l·x = R_lower_bound + i for small i.
        let m = uppers.iter().map(|(u, _)| u.clone()).max().expect("has upper bounds");
        for (l, lower) in &lowers {
            let top = (&m * l - &m - l).div_floor(&m);
            let mut i = BigInt::zero();
            while i <= top {
                // -l·x + R ≤ 0 becomes l·x - R - i = 0
                let mut eq = lower.scaled(&-BigInt::one());
                eq.terms.insert(v, l.clone());
                eq.constant -= &i;
                if let Some(model) = self.solve(vec![eq], les.clone())? {
                    return Ok(Some(model));
                }
                i += 1;
            }
        }
        Ok(None)
    }
}

/// A value for `v` meeting every bound in `constraints` under `model`.
fn pick_value(v: VarId, constraints: &[Affine], model: &Model) -> BigInt {
    let mut low: Option<BigInt> = None;
    let mut high: Option<BigInt> = None;
    for c in constraints {
        let a = c.coeff(v);
        let rest = c.without(v).eval(model);
        if a.is_negative() {
            // -l·x + r ≤ 0  ⇒  x ≥ ⌈r / l⌉
            let bound = rest.div_ceil(&-a);
            if low.as_ref().is_none_or(|b| bound > *b) {
                low = Some(bound);
            }
        } else if a.is_positive() {
            // u·x + r ≤ 0  ⇒  x ≤ ⌊-r / u⌋
            let bound = (-rest).div_floor(&a);
            if high.as_ref().is_none_or(|b| bound < *b) {
                high = Some(bound);
            }
        }
    }
    if let (Some(lo), Some(hi)) = (&low, &high) {
        debug_assert!(lo <= hi, "eliminated variable has empty range [{lo}, {hi}]");
    }
    low.or(high).unwrap_or_default()
}
