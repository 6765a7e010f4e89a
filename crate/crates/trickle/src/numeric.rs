//! Exact rational arithmetic helpers.
//!
//! All probabilities and kernel values in exact mode are carried by
//! [`Rat`], an arbitrary-precision rational kept in canonical form
//! (reduced, positive denominator).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::TrickleError;

/// Exact rational number.
pub type Rat = BigRational;

/// `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parse "p/q" or "p" (used by the CLI and file formats).
pub fn parse_rat(s: &str) -> Result<Rat, TrickleError> {
    let bad = || TrickleError::InvalidParameter(format!("cannot parse rational {s:?}"));
    let mut parts = s.splitn(2, '/');
    let p: BigInt = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(Rat::from_integer(p)),
        Some(q) => {
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Render as "p/q", or just "p" for integers.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest f64 (sampling/diagnostic use only; exact paths never round).
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Denormal-range blowups only occur for astronomically sized
        // entries; fall back through a quotient of floats.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Exact binomial coefficient, 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Multinomial coefficient `(Σ parts)! / Π parts!`.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let mut acc = BigInt::one();
    let mut total = 0u64;
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Rising factorial `x (x+1) ... (x+n-1)` with rational base; empty product is 1.
pub fn rising(x: &Rat, n: u64) -> Rat {
    let mut acc = Rat::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += Rat::one();
    }
    acc
}

/// `r^k` for integer `k` of either sign. Panics on `0^negative`.
pub fn rat_pow(r: &Rat, k: i64) -> Rat {
    if k >= 0 {
        num::pow::pow(r.clone(), k as usize)
    } else {
        assert!(!r.is_zero(), "0 raised to a negative power");
        num::pow::pow(r.clone(), (-k) as usize).recip()
    }
}

/// n-th Catalan number `binom(2n, n) / (n+1)`.
pub fn catalan_number(n: u64) -> BigInt {
    binomial(2 * n, n) / BigInt::from(n + 1)
}

/// Exact factorial.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// True when `r` is a probability (0 ≤ r ≤ 1).
pub fn is_probability(r: &Rat) -> bool {
    !r.is_negative() && *r <= Rat::one()
}
