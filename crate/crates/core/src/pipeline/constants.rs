use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{padic_abs, padic_height, padic_norm, valuation, BigInt, PrimeSet, Rational, RationalMatrix};
use crate::padiclin::SignMatrix;
use crate::quadform::QuadraticForm;

/// Per-prime constants of the avoidance argument.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeConstants {
    /// `max_E h_p(Sigma E Sigma^{-1} sigma)`.
    #[serde(serialize_with = "crate::pipeline::ser_rational")]
    pub kappa: Rational,
    /// A power of `p` bounding `||U_p||_p`.
    #[serde(serialize_with = "crate::pipeline::ser_bigint")]
    pub alpha: BigInt,
    /// Lower bound for `|det(U_p + F)|_p`.
    #[serde(serialize_with = "crate::pipeline::ser_rational")]
    pub beta: Rational,
    pub ell: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AvoidanceConstants {
    pub per_prime: BTreeMap<u64, PrimeConstants>,
    #[serde(serialize_with = "crate::pipeline::ser_rational")]
    pub eps: Rational,
    #[serde(serialize_with = "crate::pipeline::ser_bigint")]
    pub d: BigInt,
    #[serde(rename = "C", serialize_with = "crate::pipeline::ser_bigint")]
    pub c: BigInt,
}

/// `-v_p(x)` for a power of `p`.
pub(crate) fn log_p(x: &Rational, p: u64) -> i64 {
    -valuation(x, p).expect("nonzero")
}

/// Least `l` with `p^{l-1} >= bound`.
pub fn ell_for(p: u64, bound: &Rational) -> u32 {
    let mut l = 1u32;
    let mut power = Rational::one();
    let pr = Rational::from_integer(BigInt::from(p));
    while power < *bound {
        power *= &pr;
        l += 1;
    }
    l
}

fn two_pow(n: usize) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(2), n))
}

/// The constants `kappa_p, alpha_p, beta_p, eps, d, C` for `F`, a rational
/// equivalence `sigma` and a diagonalizer `Sigma` of `F`.
pub fn compute_constants(
    f: &QuadraticForm,
    sigma: &RationalMatrix,
    big_sigma: &RationalMatrix,
    primes: &PrimeSet,
) -> Result<AvoidanceConstants> {
    let n = f.dim();
    if primes.is_empty() {
        return Err(Error::EmptyPrimeSet);
    }
    for m in [sigma, big_sigma] {
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension("transformation does not match the form".into()));
        }
    }
    let det_sigma = sigma.det();
    if det_sigma.is_zero() {
        return Err(Error::Singular);
    }
    if !f.gram().congruence(big_sigma).is_diagonal() {
        return Err(Error::Precondition("Sigma does not diagonalize F".into()));
    }
    let sigma_inv = big_sigma.try_inverse()?;
    let twisted: Vec<RationalMatrix> = SignMatrix::all(n)
        .map(|e| &(&(big_sigma * &e.to_matrix()) * &sigma_inv) * sigma)
        .collect();
    let two_n = two_pow(n);
    let det_f = f.det();

    let mut per_prime = BTreeMap::new();
    let mut eps: Option<Rational> = None;
    let mut d = BigInt::one();
    for p in primes.iter() {
        let kappa = twisted
            .iter()
            .map(|m| padic_height(m, p))
            .max()
            .expect("at least one sign matrix");
        let kappa_n = num_traits::pow(kappa.clone(), n);
        let worst = padic_abs(&two_n, p)
            .recip()
            .max(padic_abs(&det_sigma, p).recip());
        let alpha = (padic_norm(f.gram(), p) * &kappa_n * worst).max(Rational::one());
        let beta = padic_abs(&(&two_n * &det_f * &det_sigma), p) / &kappa_n;
        let ratio = &beta / (&kappa * num_traits::pow(alpha.clone(), n));
        eps = Some(match eps {
            Some(e) if e <= ratio => e,
            _ => ratio,
        });
        if !alpha.is_integer() {
            return Err(Error::Internal("alpha is not an integer".into()));
        }
        let alpha = alpha.to_integer();
        d *= &alpha;
        per_prime.insert(
            p,
            PrimeConstants {
                kappa,
                alpha,
                beta,
                ell: 0,
            },
        );
    }
    let eps = eps.expect("nonempty prime set");
    let bound = Rational::from_integer(d.clone()) / &eps;
    let mut c = BigInt::one();
    for (p, k) in per_prime.iter_mut() {
        k.ell = ell_for(*p, &bound);
        c *= num_traits::pow(BigInt::from(*p), k.ell as usize);
    }
    Ok(AvoidanceConstants { per_prime, eps, d, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn worked_constants() {
        let f = QuadraticForm::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        let id = RationalMatrix::identity(2);
        let k = compute_constants(&f, &id, &id, &PrimeSet::new(vec![3]).unwrap()).unwrap();
        let c3 = &k.per_prime[&3];
        assert_eq!((c3.kappa.clone(), c3.alpha.clone(), c3.beta.clone()), (int(1), BigInt::from(1), int(1)));
        assert_eq!((k.eps.clone(), k.d.clone(), k.c.clone()), (int(1), BigInt::from(1), BigInt::from(3)));

        let k = compute_constants(&f, &id, &id, &PrimeSet::new(vec![2]).unwrap()).unwrap();
        let c2 = &k.per_prime[&2];
        assert_eq!(c2.alpha, BigInt::from(4));
        assert_eq!(c2.beta, rat(1, 4));
        assert_eq!(c2.ell, 9);
        assert_eq!((k.eps.clone(), k.d.clone(), k.c.clone()), (rat(1, 64), BigInt::from(4), BigInt::from(512)));
    }

    #[test]
    fn ell_is_exact() {
        assert_eq!(ell_for(2, &int(1)), 1);
        assert_eq!(ell_for(2, &int(256)), 9);
        assert_eq!(ell_for(2, &int(257)), 10);
        assert_eq!(ell_for(3, &int(6)), 3);
    }
}
