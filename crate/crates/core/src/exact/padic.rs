use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{BigInt, Rational, RationalMatrix};
use crate::error::{Error, Result};

/// `v_p(n)` for a nonzero integer, `None` for zero.
pub fn int_valuation(n: &BigInt, p: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)`; `None` stands for `+infinity` (q = 0).
pub fn valuation(q: &Rational, p: u64) -> Option<i64> {
    let vn = int_valuation(q.numer(), p)? as i64;
    let vd = int_valuation(q.denom(), p).unwrap_or(0) as i64;
    Some(vn - vd)
}

/// Minimum entry valuation of a matrix; `None` for the zero matrix.
pub fn valuation_matrix(a: &RationalMatrix, p: u64) -> Option<i64> {
    a.entries().iter().filter_map(|x| valuation(x, p)).min()
}

/// `p^e` as an exact rational (any sign of `e`).
pub fn pow_p(p: u64, e: i64) -> Rational {
    let base = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rational::from_integer(base)
    } else {
        Rational::new(BigInt::one(), base)
    }
}

/// Normalized p-adic absolute value `|q|_p = p^{-v_p(q)}`, with `|0|_p = 0`.
pub fn padic_abs(q: &Rational, p: u64) -> Rational {
    match valuation(q, p) {
        None => Rational::zero(),
        Some(v) => pow_p(p, -v),
    }
}

/// p-adic sup-norm of the entries.
pub fn padic_norm(a: &RationalMatrix, p: u64) -> Rational {
    match valuation_matrix(a, p) {
        None => Rational::zero(),
        Some(v) => pow_p(p, -v),
    }
}

/// Inhomogeneous p-adic height `max(||A||_p, 1)`.
pub fn padic_height(a: &RationalMatrix, p: u64) -> Rational {
    padic_norm(a, p).max(Rational::one())
}

/// Archimedean sup-norm of the entries.
pub fn sup_norm(a: &RationalMatrix) -> Rational {
    a.max_abs()
}

/// Image of a p-integral rational in `Z/p^k`, as a representative in `[0, p^k)`.
pub fn reduce_mod_pk(q: &Rational, p: u64, k: u32) -> Result<BigInt> {
    let modulus = BigInt::from(p).pow(k);
    if q.denom().is_one() {
        return Ok(q.numer().mod_floor(&modulus));
    }
    if (q.denom() % BigInt::from(p)).is_zero() {
        return Err(Error::Precondition(format!(
            "{q} is not {p}-integral"
        )));
    }
    let den = q.denom().mod_floor(&modulus);
    let inv = mod_inverse(&den, &modulus)
        .ok_or_else(|| Error::Internal("denominator not invertible".into()))?;
    Ok((q.numer() * inv).mod_floor(&modulus))
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}
