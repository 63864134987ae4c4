//! Canonical sparse multivariate polynomials over the exact rationals.
//!
//! Invariants:
//! - A `Monomial` stores its variable powers sorted by the fixed canonical
//!   variable order, with no zero exponents; the empty product is `1`.
//! - A `Polynomial` maps monomials to nonzero coefficients; every operation
//!   re-canonicalizes, so structural equality is mathematical equality.
//! - Term iteration and printing follow ascending graded-lexicographic
//!   order, which makes rendering and hashing deterministic.
//!
//! Exponents are machine-width; arithmetic that would overflow an exponent
//! aborts rather than wrap.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::traits::{One, Signed, Zero};

use crate::rat::{is_one, is_zero, pow, Rat};
use crate::var::VarId;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    /// Sorted by `VarId`, exponents all nonzero.
    powers: Vec<(VarId, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { powers: Vec::new() }
    }

    pub fn var(v: VarId) -> Self {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: VarId, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial {
                powers: vec![(v, e)],
            }
        }
    }

    /// Builds from arbitrary pairs: sorts, merges duplicates, drops zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut merged: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            let slot = merged.entry(v).or_insert(0);
            *slot = slot
                .checked_add(e)
                .unwrap_or_else(|| panic!("monomial exponent overflow on {v}"));
        }
        Monomial {
            powers: merged.into_iter().collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn total_degree(&self) -> u64 {
        self.powers.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.powers
            .iter()
            .find(|(u, _)| *u == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.powers.iter().copied()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_pairs(self.iter().chain(other.iter()))
    }

    /// Exact monomial quotient; `None` when some exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.powers.len());
        for (v, e) in self.iter() {
            match e.checked_sub(other.exponent(v)) {
                Some(0) => {}
                Some(r) => out.push((v, r)),
                None => return None,
            }
        }
        if other.iter().any(|(v, _)| self.exponent(v) < other.exponent(v)) {
            return None;
        }
        Some(Monomial { powers: out })
    }

    /// Removes variable `v` entirely, returning (exponent, rest).
    pub fn without(&self, v: VarId) -> (u32, Monomial) {
        let e = self.exponent(v);
        let rest = Monomial {
            powers: self.iter().filter(|(u, _)| *u != v).collect(),
        };
        (e, rest)
    }
}

/// Ascending graded-lexicographic order on the fixed variable order: total
/// degree first, ties broken by the earliest variable with differing
/// exponent (larger exponent means larger monomial).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.powers.iter().peekable();
        let mut b = other.powers.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => {
                    if va == vb {
                        match ea.cmp(eb) {
                            Ordering::Equal => {
                                a.next();
                                b.next();
                            }
                            ord => return ord,
                        }
                    } else if va < vb {
                        // `self` has a power on an earlier variable.
                        return Ordering::Greater;
                    } else {
                        return Ordering::Less;
                    }
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub unbound: VarId,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unbound variable {} in evaluation", self.unbound)
    }
}

impl std::error::Error for EvalError {}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rat>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: VarId) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(v), Rat::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rat, Monomial)>) -> Self {
        let mut p = Polynomial::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m`, keeping the no-zero-coefficient invariant.
    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get() + &c;
                if is_zero(&sum) {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant value when the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| v))
            .collect()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if is_zero(c) {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Polynomial {
        let mut out = Polynomial::zero();
        for (mm, cc) in self.terms() {
            out.add_term(mm.mul(m), cc * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Exact value at a full point assignment; unbound variables are an error.
    pub fn eval(&self, point: &BTreeMap<VarId, Rat>) -> Result<Rat, EvalError> {
        let mut acc = Rat::zero();
        for (m, c) in self.terms() {
            let mut t = c.clone();
            for (v, e) in m.iter() {
                let val = point.get(&v).ok_or(EvalError { unbound: v })?;
                t *= pow(val, e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Homomorphic substitution; unbound variables pass through unchanged.
    pub fn substitute(&self, bindings: &BTreeMap<VarId, Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            let mut t = Polynomial::constant(c.clone());
            for (v, e) in m.iter() {
                match bindings.get(&v) {
                    Some(b) => t = t.mul(&b.pow(e)),
                    None => t = t.mul_monomial(&Monomial::var_pow(v, e), &Rat::one()),
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Renames variables term by term (must stay injective on the support).
    pub fn rename(&self, map: impl Fn(VarId) -> VarId) -> Polynomial {
        Polynomial::from_terms(self.terms().map(|(m, c)| {
            (
                c.clone(),
                Monomial::from_pairs(m.iter().map(|(v, e)| (map(v), e))),
            )
        }))
    }

    /// Leading (greatest) term under the graded-lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact polynomial quotient `self / d`; `None` when the division leaves
    /// a remainder.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = Polynomial::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            quot.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&d.mul_monomial(&qm, &qc));
        }
        Some(quot)
    }

    /// Coefficient polynomials of each power of `v`: `self = sum_d out[d] * v^d`.
    pub fn coefficients_of(&self, v: VarId) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in self.terms() {
            let (e, rest) = m.without(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Renders with caller-supplied variable names; deterministic term order.
    pub fn render(&self, namer: &dyn Fn(VarId) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mut factors: Vec<String> = Vec::new();
            if !is_one(&mag) || m.is_one() {
                factors.push(mag.to_string());
            }
            for (v, e) in m.iter() {
                let name = namer(v);
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&|v| v.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_frac};

    fn x() -> Polynomial {
        Polynomial::var(VarId::X)
    }

    fn y(i: u32) -> Polynomial {
        Polynomial::var(VarId::Y(i))
    }

    #[test]
    fn additive_inverse_cancels() {
        let p = x().add(&y(1));
        assert_eq!(p.add(&y(1).neg()), x());
        assert_eq!(p.add(&Polynomial::zero()), p);
    }

    #[test]
    fn expand_and_cancel() {
        // (y2+y3)^2 + (x - (y2+y3)^2) = x
        let s = y(2).add(&y(3));
        let sq = s.pow(2);
        assert_eq!(sq.add(&x().sub(&sq)), x());
    }

    #[test]
    fn binomial_square() {
        let p = Polynomial::one().add(&x());
        let sq = p.mul(&p);
        assert_eq!(sq.to_string(), "1 + 2*x + x^2");
        assert_eq!(p.mul(&Polynomial::zero()), Polynomial::zero());
    }

    #[test]
    fn square_of_sum_of_unknowns() {
        let s = y(2).add(&y(3));
        let sq = s.mul(&s);
        let mut expect = Polynomial::zero();
        expect.add_term(Monomial::var_pow(VarId::Y(2), 2), rat(1));
        expect.add_term(
            Monomial::from_pairs([(VarId::Y(2), 1), (VarId::Y(3), 1)]),
            rat(2),
        );
        expect.add_term(Monomial::var_pow(VarId::Y(3), 2), rat(1));
        assert_eq!(sq, expect);
    }

    #[test]
    fn eval_examples() {
        // y1 - x - (y2+y3)^2 vanishes at the origin
        let p = y(1).sub(&x()).sub(&y(2).add(&y(3)).pow(2));
        let point: BTreeMap<_, _> = [
            (VarId::X, rat(0)),
            (VarId::Y(1), rat(0)),
            (VarId::Y(2), rat(0)),
            (VarId::Y(3), rat(0)),
        ]
        .into();
        assert_eq!(p.eval(&point).unwrap(), rat(0));

        // x^2 + y^2 - 1 at (0, 1)
        let q = x().pow(2).add(&y(1).pow(2)).sub(&Polynomial::one());
        let point: BTreeMap<_, _> = [(VarId::X, rat(0)), (VarId::Y(1), rat(1))].into();
        assert_eq!(q.eval(&point).unwrap(), rat(0));

        assert_eq!(Polynomial::one().eval(&BTreeMap::new()).unwrap(), rat(1));

        let err = y(1).eval(&BTreeMap::new()).unwrap_err();
        assert_eq!(err.unbound, VarId::Y(1));
    }

    #[test]
    fn substitute_examples() {
        // y'1*y2 + y01*y'2  with  y'1 -> f1*w, y'2 -> f2*w
        let p = Polynomial::from_terms([
            (
                rat(1),
                Monomial::from_pairs([(VarId::YPrime(1), 1), (VarId::Y(2), 1)]),
            ),
            (
                rat(1),
                Monomial::from_pairs([(VarId::Y0(1), 1), (VarId::YPrime(2), 1)]),
            ),
        ]);
        let f1 = y(1); // stand-ins
        let f2 = y(2);
        let w = Polynomial::var(VarId::W);
        let bindings: BTreeMap<_, _> = [
            (VarId::YPrime(1), f1.mul(&w)),
            (VarId::YPrime(2), f2.mul(&w)),
        ]
        .into();
        let got = p.substitute(&bindings);
        let expect = y(1)
            .mul(&w)
            .mul(&y(2))
            .add(&Polynomial::var(VarId::Y0(1)).mul(&y(2)).mul(&w));
        assert_eq!(got, expect);

        // y + y0 with y0 -> 1
        let p = y(1).add(&Polynomial::var(VarId::Y0(1)));
        let bindings: BTreeMap<_, _> = [(VarId::Y0(1), Polynomial::one())].into();
        assert_eq!(p.substitute(&bindings), y(1).add(&Polynomial::one()));

        // empty bindings are the identity
        assert_eq!(p.substitute(&BTreeMap::new()), p);
    }

    #[test]
    fn rendering() {
        let p = Polynomial::from_terms([
            (rat_frac(-1, 2), Monomial::var_pow(VarId::X, 3)),
            (rat(1), Monomial::one()),
            (rat(-1), Monomial::var(VarId::Y(1))),
        ]);
        assert_eq!(p.to_string(), "1 - y1 - 1/2*x^3");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(Polynomial::constant(rat(-3)).to_string(), "-3");
    }

    #[test]
    fn exact_division() {
        let a = y(1).add(&y(2)).pow(3);
        let b = y(1).add(&y(2));
        let q = a.exact_div(&b).unwrap();
        assert_eq!(q, b.pow(2));
        assert!(y(1).pow(2).add(&Polynomial::one()).exact_div(&b).is_none());
    }

    #[test]
    fn coefficients_by_variable() {
        // x^2*y + x*y + 3  grouped by x
        let p = Polynomial::from_terms([
            (
                rat(1),
                Monomial::from_pairs([(VarId::X, 2), (VarId::Y(1), 1)]),
            ),
            (
                rat(1),
                Monomial::from_pairs([(VarId::X, 1), (VarId::Y(1), 1)]),
            ),
            (rat(3), Monomial::one()),
        ]);
        let by_x = p.coefficients_of(VarId::X);
        assert_eq!(by_x[&0], Polynomial::constant(rat(3)));
        assert_eq!(by_x[&1], y(1));
        assert_eq!(by_x[&2], y(1));
    }

    #[test]
    #[should_panic(expected = "exponent overflow")]
    fn exponent_overflow_aborts() {
        let m = Monomial::var_pow(VarId::X, u32::MAX);
        let _ = m.mul(&Monomial::var(VarId::X));
    }

    #[test]
    fn values_are_shareable_across_tasks() {
        fn check<T: Send + Sync>() {}
        check::<Monomial>();
        check::<Polynomial>();
    }
}
