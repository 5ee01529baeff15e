use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::constants::{ell_for, AvoidanceConstants};
use crate::error::{Error, Result};
use crate::exact::{mod_inverse, reduce_mod_pk, BigInt, PrimeSet, Rational, RationalMatrix};
use crate::padiclin::PadicMatrixApprox;

/// Integer `z` in `[0, prod p^{l_p})` with `|z/d - x_p|_p < eps` for every
/// `p`, where `l_p` is least with `p^{l_p - 1} >= d/eps`.
pub fn crt_approximate(
    targets: &BTreeMap<u64, Rational>,
    d: &BigInt,
    eps: &Rational,
    primes: &PrimeSet,
) -> Result<BigInt> {
    if primes.is_empty() {
        return Err(Error::EmptyPrimeSet);
    }
    if !d.is_positive() {
        return Err(Error::Precondition("d must be positive".into()));
    }
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::Precondition("eps must lie in (0, 1]".into()));
    }
    if !targets.keys().copied().eq(primes.iter()) {
        return Err(Error::Precondition("one target per prime is required".into()));
    }
    let bound = Rational::from_integer(d.clone()) / eps;
    let dq = Rational::from_integer(d.clone());
    let mut z = BigInt::zero();
    let mut modulus = BigInt::one();
    for (&p, x) in targets {
        let l = ell_for(p, &bound);
        let pl = BigInt::from(p).pow(l);
        let r = reduce_mod_pk(&(&dq * x), p, l).map_err(|_| {
            Error::Precondition(format!("d * x_{p} is not {p}-integral"))
        })?;
        // z + modulus * t ≡ r (mod p^l)
        let inv = mod_inverse(&modulus, &pl).expect("coprime moduli");
        let t = ((r - &z) * inv).mod_floor(&pl);
        z += &modulus * t;
        modulus *= pl;
    }
    Ok(z)
}

/// Skew matrix `U` in `(1/d) Skew_n(Z)` with `sup |U| < C/d` approximating
/// every `U_p` to within `eps`. Only strictly upper entries are approximated;
/// the lower triangle is their negation and the diagonal is zero.
pub fn skew_approximate(
    targets: &BTreeMap<u64, PadicMatrixApprox>,
    constants: &AvoidanceConstants,
    primes: &PrimeSet,
) -> Result<RationalMatrix> {
    if !targets.keys().copied().eq(primes.iter()) {
        return Err(Error::Precondition("one target per prime is required".into()));
    }
    let n = targets.values().next().map_or(0, PadicMatrixApprox::rows);
    let mut lifts = BTreeMap::new();
    for (&p, u) in targets {
        if u.rows() != n || u.cols() != n {
            return Err(Error::Dimension("targets differ in shape".into()));
        }
        if u.error_bound() >= constants.eps {
            return Err(Error::InsufficientPrecision {
                prime: p,
                reason: "U_p is not known to within eps".into(),
            });
        }
        lifts.insert(p, u.lift());
    }
    let d = Rational::from_integer(constants.d.clone());
    let mut out = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let entry: BTreeMap<u64, Rational> =
                lifts.iter().map(|(&p, m)| (p, m.get(i, j).clone())).collect();
            let z = crt_approximate(&entry, &constants.d, &constants.eps, primes)?;
            let value = Rational::from_integer(z) / &d;
            out.set(j, i, -value.clone());
            out.set(i, j, value);
        }
    }
    Ok(out)
}
