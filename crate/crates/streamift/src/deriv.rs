//! Syntactic stream derivative, its linear decomposition, and the classical
//! derivatives used for comparison.
//!
//! The stream derivative of a monomial splits on its least variable under
//! the chosen `VarOrder` (`x` always least): `(x*m)' = m` because the
//! initial-value stand-in for `x` is the scalar zero, and
//! `(y_i*m)' = y'_i*m + y0_i*m'`. Extension to polynomials is linear. The
//! result lives over `x, y0_1.., y_1.., y'_1..` and every primed variable
//! occurs linearly, which is what `decompose` exploits.

use std::fmt;

use crate::poly::{Monomial, Polynomial};
use crate::rat::Rat;
use crate::var::{VarId, VarOrder};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DerivError {
    /// Input contained an initial-value, primed, or inverse variable.
    MalformedInput(VarId),
    /// A primed variable occurred nonlinearly, so the polynomial is not a
    /// stream derivative.
    NonlinearPrime(Monomial),
}

impl fmt::Display for DerivError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivError::MalformedInput(v) => {
                write!(f, "variable {v} is not allowed in a differentiation input")
            }
            DerivError::NonlinearPrime(m) => {
                write!(f, "primed variables occur nonlinearly in `{m:?}`")
            }
        }
    }
}

impl std::error::Error for DerivError {}

fn check_input(p: &Polynomial) -> Result<(), DerivError> {
    for v in p.vars() {
        if !matches!(v, VarId::X | VarId::Y(_)) {
            return Err(DerivError::MalformedInput(v));
        }
    }
    Ok(())
}

/// Stream derivative of a monomial, written onto `out` with coefficient `c`.
///
/// Iterates over the variables in ascending `order`, carrying the prefix of
/// already-split variables with their exponents moved onto the initial-value
/// indeterminates. An `x` power contributes `x^(e-1) * rest` and stops the
/// walk, since the prefix factor becomes the scalar zero.
fn monomial_derivative(m: &Monomial, c: &Rat, order: &VarOrder, out: &mut Polynomial) {
    let mut factors: Vec<(VarId, u32)> = m.iter().collect();
    factors.sort_by_key(|(v, _)| order.key(*v));

    let mut prefix: Vec<(VarId, u32)> = Vec::new();
    for (pos, &(v, e)) in factors.iter().enumerate() {
        let suffix = factors[pos + 1..].iter().copied();
        match v {
            VarId::X => {
                let mono = Monomial::from_pairs(
                    std::iter::once((VarId::X, e - 1)).chain(suffix),
                );
                out.add_term(mono, c.clone());
                return;
            }
            VarId::Y(i) => {
                // y_i^e * rest  contributes  sum_s y0_i^s y_i^(e-1-s) y'_i * rest
                for s in 0..e {
                    let mono = Monomial::from_pairs(
                        prefix
                            .iter()
                            .copied()
                            .chain([(VarId::Y0(i), s), (VarId::Y(i), e - 1 - s), (VarId::YPrime(i), 1)])
                            .chain(suffix.clone()),
                    );
                    out.add_term(mono, c.clone());
                }
                prefix.push((VarId::Y0(i), e));
            }
            _ => unreachable!("validated input"),
        }
    }
}

/// Syntactic stream derivative of a polynomial over `{x, y_1..y_n}`.
pub fn stream_derivative(p: &Polynomial, order: &VarOrder) -> Result<Polynomial, DerivError> {
    check_input(p)?;
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        monomial_derivative(m, c, order, &mut out);
    }
    Ok(out)
}

/// The unique splitting `dp = q0 + sum_i q_i * y'_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivDecomposition {
    pub q0: Polynomial,
    pub q: Vec<Polynomial>,
}

impl DerivDecomposition {
    /// Rebuilds `q0 + sum_i q_i * y'_i`.
    pub fn recompose(&self) -> Polynomial {
        let mut acc = self.q0.clone();
        for (i, qi) in self.q.iter().enumerate() {
            acc = acc.add(&qi.mul(&Polynomial::var(VarId::YPrime(i as u32 + 1))));
        }
        acc
    }
}

/// Splits a stream derivative on its (necessarily linear) primed variables.
pub fn decompose(dp: &Polynomial, n: usize) -> Result<DerivDecomposition, DerivError> {
    let mut q0 = Polynomial::zero();
    let mut q = vec![Polynomial::zero(); n];
    for (m, c) in dp.terms() {
        let primes: Vec<(VarId, u32)> = m
            .iter()
            .filter(|(v, _)| matches!(v, VarId::YPrime(_)))
            .collect();
        match primes.as_slice() {
            [] => q0.add_term(m.clone(), c.clone()),
            [(VarId::YPrime(i), 1)] if (*i as usize) >= 1 && (*i as usize) <= n => {
                let (_, rest) = m.without(VarId::YPrime(*i));
                q[*i as usize - 1].add_term(rest, c.clone());
            }
            _ => return Err(DerivError::NonlinearPrime(m.clone())),
        }
    }
    Ok(DerivDecomposition { q0, q })
}

/// Row `i`, column `j` holds the partial stream derivative of equation `i`
/// with respect to `y_j`, over `x, y0_1.., y_1..` (initial-value
/// indeterminates not yet substituted).
pub fn stream_jacobian(
    equations: &[Polynomial],
    n: usize,
    order: &VarOrder,
) -> Result<Vec<Vec<Polynomial>>, DerivError> {
    equations
        .iter()
        .map(|p| Ok(decompose(&stream_derivative(p, order)?, n)?.q))
        .collect()
}

/// The `q0` components: partial stream derivatives with respect to `x`.
pub fn stream_x_partial(
    equations: &[Polynomial],
    n: usize,
    order: &VarOrder,
) -> Result<Vec<Polynomial>, DerivError> {
    equations
        .iter()
        .map(|p| Ok(decompose(&stream_derivative(p, order)?, n)?.q0))
        .collect()
}

/// Ordinary formal partial derivative with respect to `x` or an unknown.
pub fn classical_partial(p: &Polynomial, v: VarId) -> Polynomial {
    assert!(
        matches!(v, VarId::X | VarId::Y(_)),
        "classical partials are taken on x or unknowns"
    );
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        let e = m.exponent(v);
        if e == 0 {
            continue;
        }
        let (_, rest) = m.without(v);
        let mono = rest.mul(&Monomial::var_pow(v, e - 1));
        out.add_term(mono, c * Rat::from_integer(e.into()));
    }
    out
}

/// Total derivative `d/dx`: `∂p/∂x + sum_i (∂p/∂y_i) y'_i`.
pub fn classical_total_x_derivative(p: &Polynomial) -> Polynomial {
    let mut out = classical_partial(p, VarId::X);
    let unknowns: Vec<u32> = p
        .vars()
        .into_iter()
        .filter_map(|v| match v {
            VarId::Y(i) => Some(i),
            _ => None,
        })
        .collect();
    for i in unknowns {
        out = out.add(
            &classical_partial(p, VarId::Y(i)).mul(&Polynomial::var(VarId::YPrime(i))),
        );
    }
    out
}
