//! Exact scalars and matrices over `Q`, together with the p-adic and
//! archimedean size functions used throughout the construction.
//!
//! Scalars are `num_rational::BigRational`, which is always kept in lowest
//! terms with a positive denominator. All p-adic absolute values are exact
//! rationals (integral powers of `p`), so comparisons never involve floats.

mod height;
mod matrix;
mod padic;
mod primes;

pub use height::{hom_height, inhom_height};
pub use matrix::RationalMatrix;
pub use padic::{
    int_valuation, padic_abs, padic_height, padic_norm, pow_p, reduce_mod_pk, sup_norm, valuation,
    valuation_matrix,
};
pub use primes::{is_prime, PrimeSet};
pub(crate) use padic::mod_inverse;

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;

use num_traits::{One, Zero};

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The rational `num/den`. Panics if `den` is zero.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Formats a rational as `"num"` or `"num/den"`.
pub fn rational_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"num"` or `"num/den"` (surrounding whitespace allowed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
    }
}
