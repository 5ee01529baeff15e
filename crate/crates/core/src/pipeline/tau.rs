use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    int, padic_abs, padic_height, padic_norm, pow_p, valuation, valuation_matrix, PrimeSet, Rational,
    RationalMatrix,
};
use crate::padiclin::{
    choose_sign_matrix, det_stable_within, local_equiv, padic_diagonalize_exact, PadicMatrixApprox,
    SignMatrix,
};
use crate::quadform::QuadraticForm;

/// `tau = Sigma E_0 Sigma^{-1} sigma` together with a local equivalence
/// `tau_p` for each prime, chosen so that `tau - tau_p` is invertible with
/// controlled determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauData {
    pub tau: RationalMatrix,
    /// `E_0`; the identity unless `2` is in the prime set.
    pub tau_signs: SignMatrix,
    pub tau_p: BTreeMap<u64, PadicMatrixApprox>,
    /// `E_p` for each odd prime.
    pub sign_choices: BTreeMap<u64, SignMatrix>,
}

fn insufficient(p: u64, reason: &str) -> Error {
    Error::InsufficientPrecision {
        prime: p,
        reason: reason.into(),
    }
}

/// Picks `E` for an approximate `A` and checks that `|det(A - E)|_p` is the
/// same for every matrix within `radius` of `A`.
fn guarded_sign(a: &RationalMatrix, radius: &Rational, p: u64) -> Result<SignMatrix> {
    let e = choose_sign_matrix(a, p)?;
    if !det_stable_within(&(a - &e.to_matrix()), radius, p)? {
        return Err(insufficient(p, "sign choice not determined at this precision"));
    }
    Ok(e)
}

pub fn build_tau(
    f: &QuadraticForm,
    g: &QuadraticForm,
    sigma: &RationalMatrix,
    big_sigma: &RationalMatrix,
    primes: &PrimeSet,
    precisions: &BTreeMap<u64, u32>,
) -> Result<TauData> {
    let n = f.dim();
    let precision = |p: u64| precisions.get(&p).copied().unwrap_or(16);
    let sigma_inv = sigma.try_inverse()?;
    let big_inv = big_sigma.try_inverse()?;
    let mut tau_p = BTreeMap::new();

    let tau_signs = if primes.contains(2) {
        let s0 = local_equiv(f, g, 2, precision(2))?;
        let a = &(&(&big_inv * &s0.lift()) * &sigma_inv) * big_sigma;
        let radius = padic_norm(&big_inv, 2) * s0.error_bound() * padic_norm(&(&sigma_inv * big_sigma), 2);
        let e0 = guarded_sign(&a, &radius, 2)?;
        tau_p.insert(2, s0);
        e0
    } else {
        SignMatrix::identity(n)
    };
    let tau = &(&(big_sigma * &tau_signs.to_matrix()) * &big_inv) * sigma;

    let mut sign_choices = BTreeMap::new();
    for p in primes.iter().filter(|&p| p != 2) {
        let np = precision(p);
        let sp = padic_diagonalize_exact(f, p)?;
        let sp_inv = sp.try_inverse()?;
        let local = local_equiv(f, g, p, np)?.lift();
        let local_inv = local.try_inverse()?;
        let a = &(&(&sp_inv * &tau) * &local_inv) * &sp;
        let radius = padic_height(&tau, p) * pow_p(p, -(np as i64));
        let e = guarded_sign(&a, &radius, p)?;
        let exact = &(&(&sp * &e.to_matrix()) * &sp_inv) * &local;
        tau_p.insert(p, PadicMatrixApprox::from_rational_with_shift(&exact, p, 0, np)?);
        sign_choices.insert(p, e);
    }
    Ok(TauData {
        tau,
        tau_signs,
        tau_p,
        sign_choices,
    })
}

/// `U_p = 2 F tau (tau - tau_p)^{-1} - F`, the Cayley preimage of
/// `tau_p tau^{-1}`, with a certified error bound derived from the
/// precision of `tau_p`.
pub fn compute_up(
    f: &QuadraticForm,
    tau: &RationalMatrix,
    tau_p: &PadicMatrixApprox,
) -> Result<PadicMatrixApprox> {
    let p = tau_p.p();
    let gap = tau - &tau_p.lift();
    let gap_inv = gap
        .inverse()
        .ok_or_else(|| insufficient(p, "tau - tau_p is singular at this precision"))?;
    let inv_norm = padic_norm(&gap_inv, p);
    let delta = tau_p.error_bound();
    if &inv_norm * &delta >= Rational::one() {
        return Err(insufficient(p, "(tau - tau_p)^{-1} not determined"));
    }
    let u = &(&(f.gram() * tau) * &gap_inv).scale(&int(2)) - f.gram();
    let error = padic_abs(&int(2), p)
        * padic_norm(f.gram(), p)
        * padic_norm(tau, p)
        * &inv_norm
        * &inv_norm
        * delta;
    let digits = -valuation(&error, p).expect("nonzero error bound");
    let shift = valuation_matrix(&u, p).map_or(0, |v| (-v).max(0));
    if digits + shift < 1 {
        return Err(insufficient(p, "U_p carries no digits"));
    }
    PadicMatrixApprox::from_rational_with_shift(&u, p, shift, (digits + shift) as u32)
}

/// Whether `tau_p` is unimodular at `p` and `tau_p' F tau_p` agrees with `G`
/// to the precision of `tau_p`.
pub fn tau_p_is_consistent(f: &QuadraticForm, g: &QuadraticForm, tau_p: &PadicMatrixApprox) -> bool {
    let p = tau_p.p();
    if !tau_p.is_unit_matrix() {
        return false;
    }
    let r = g.gram() - &f.gram().congruence(&tau_p.lift());
    let floor = valuation_matrix(f.gram(), p).unwrap_or(0).min(0);
    match valuation_matrix(&r, p) {
        None => true,
        Some(v) => v >= tau_p.precision() as i64 + floor,
    }
}

/// `|det(tau - tau_p)|_p`, nonzero by construction.
pub fn gap_det_abs(tau: &RationalMatrix, tau_p: &PadicMatrixApprox) -> Rational {
    let d = (tau - &tau_p.lift()).det();
    if d.is_zero() {
        Rational::zero()
    } else {
        padic_abs(&d, tau_p.p())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_trace() {
        let f = QuadraticForm::from_i64(&[&[1, 0], &[0, 1]]).unwrap();
        let id = RationalMatrix::identity(2);
        let data = build_tau(&f, &f, &id, &id, &PrimeSet::new(vec![2]).unwrap(), &BTreeMap::new()).unwrap();
        assert_eq!(data.tau_signs.signs(), &[-1, -1]);
        assert_eq!(data.tau, id.scale(&int(-1)));
        assert_eq!(data.tau_p[&2].lift(), id);
        let u2 = compute_up(&f, &data.tau, &data.tau_p[&2]).unwrap();
        assert!(u2.lift().is_zero());
    }

    #[test]
    fn odd_prime_keeps_sigma() {
        let f = QuadraticForm::from_i64(&[&[2, 1], &[1, 3]]).unwrap();
        let id = RationalMatrix::identity(2);
        let big = f.diagonalizer().clone();
        let data = build_tau(&f, &f, &id, &big, &PrimeSet::new(vec![5]).unwrap(), &BTreeMap::new()).unwrap();
        assert_eq!(data.tau, id);
        let tp = &data.tau_p[&5];
        assert!(tau_p_is_consistent(&f, &f, tp));
        assert!(!gap_det_abs(&data.tau, tp).is_zero());
    }
}
