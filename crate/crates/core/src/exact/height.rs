use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{BigInt, Rational};
use crate::error::{Error, Result};

/// Homogeneous height `H(v) = ||v|| * prod_p ||v||_p`.
///
/// By the product formula `H` is invariant under scaling, so it equals the
/// sup-norm of the primitive integer vector on the line through `v`. This
/// avoids factoring the entries.
pub fn hom_height(v: &[Rational]) -> Result<Rational> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    let den_lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&den_lcm / x.denom()))
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let max = ints.iter().map(|x| x.abs()).max().unwrap_or_default();
    Ok(Rational::from_integer(max / content))
}

/// Inhomogeneous height `h(v) = H((v, 1))`; the empty vector has height 1.
pub fn inhom_height(v: &[Rational]) -> Rational {
    let mut ext = v.to_vec();
    ext.push(Rational::one());
    hom_height(&ext).expect("extended vector is nonzero")
}
