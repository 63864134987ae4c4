//! Exact rational coefficients.
//!
//! The coefficient field is the rationals with arbitrary-precision numerator
//! and positive denominator, always stored reduced (`gcd(|num|, den) = 1`,
//! zero as `0/1`). `num_rational::BigRational` maintains exactly these
//! invariants and renders as `p` or `p/q`, so it is used directly.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Rational from a machine integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d = 0`.
pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

/// `r^e` for a machine-width exponent.
pub fn pow(r: &Rat, e: u32) -> Rat {
    num::traits::Pow::pow(r, e as usize)
}

/// Parse `-?digits(/digits)?`. Rejects anything else, including spaces
/// around the slash.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let body = text.strip_prefix('-').unwrap_or(text);
    let mut halves = body.splitn(2, '/');
    let num_ok = halves
        .next()
        .map(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .unwrap_or(false);
    let den_ok = match halves.next() {
        None => true,
        Some(s) => {
            !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && s.bytes().any(|b| b != b'0')
        }
    };
    if !num_ok || !den_ok {
        return None;
    }
    text.parse::<BigRational>().ok()
}

/// Gcd of the absolute values of a set of rationals: gcd of numerators over
/// lcm of denominators. Zero inputs are skipped; returns 1 for an all-zero
/// or empty set.
pub fn content_gcd<'a>(vals: impl Iterator<Item = &'a Rat>) -> Rat {
    use num::Integer;
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    let mut seen = false;
    for v in vals {
        if v.is_zero() {
            continue;
        }
        seen = true;
        num_gcd = num_gcd.gcd(&v.numer().abs());
        den_lcm = den_lcm.lcm(v.denom());
    }
    if !seen {
        return rat(1);
    }
    BigRational::new(num_gcd, den_lcm)
}
