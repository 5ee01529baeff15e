use serde::Serialize;

use num_traits::{One, Zero};

use super::constants::compute_constants;
use crate::cayley::cayley;
use crate::error::{Error, Result};
use crate::exact::{padic_abs, padic_norm, sup_norm, PrimeSet, Rational, RationalMatrix};
use crate::padiclin::SignMatrix;
use crate::quadform::QuadraticForm;

/// One exact verification outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    pub passed: bool,
}

impl Check {
    pub(crate) fn new(name: &str, prime: Option<u64>, passed: bool) -> Self {
        Self {
            name: name.into(),
            prime,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Exact checks of the conclusion: `tau_hat' F tau_hat = G`, and for each
/// `p` in the set, `tau_hat` is p-integral with `|det tau_hat|_p = 1`
/// (so that its inverse is p-integral too).
pub fn verify(
    f: &QuadraticForm,
    g: &QuadraticForm,
    primes: &PrimeSet,
    tau_hat: &RationalMatrix,
) -> Result<VerificationReport> {
    let n = f.dim();
    if g.dim() != n || tau_hat.rows() != n || tau_hat.cols() != n {
        return Err(Error::Dimension("tau_hat does not match the forms".into()));
    }
    let mut checks = vec![Check::new(
        "orthogonality",
        None,
        f.gram().congruence(tau_hat) == *g.gram(),
    )];
    let det = tau_hat.det();
    for p in primes.iter() {
        checks.push(Check::new("p_integral", Some(p), padic_norm(tau_hat, p) <= Rational::one()));
    }
    for p in primes.iter() {
        let unit = !det.is_zero() && padic_abs(&det, p).is_one();
        checks.push(Check::new("unit_determinant", Some(p), unit));
    }
    Ok(VerificationReport { checks })
}

/// Checks that `tau_hat` lies in the finite search set: `dU` is an integral
/// skew matrix, `sup |U| <= C/d`, `det(U+F) != 0`, and
/// `tau_hat = (U+F)^{-1}(U-F) Sigma E_0 Sigma^{-1} sigma`, with `d` and `C`
/// recomputed from `sigma` and `Sigma`.
pub fn verify_search_set(
    f: &QuadraticForm,
    primes: &PrimeSet,
    sigma: &RationalMatrix,
    big_sigma: &RationalMatrix,
    tau_signs: &SignMatrix,
    u: &RationalMatrix,
    tau_hat: &RationalMatrix,
) -> Result<Vec<Check>> {
    let n = f.dim();
    if u.rows() != n || u.cols() != n || tau_signs.dim() != n {
        return Err(Error::Dimension("certificate does not match the form".into()));
    }
    let constants = compute_constants(f, sigma, big_sigma, primes)?;
    let d = Rational::from_integer(constants.d.clone());
    let du = u.scale(&d);
    let mut checks = vec![
        Check::new("search_set_integral_skew", None, du.is_integral() && du.is_skew()),
        Check::new(
            "search_set_height",
            None,
            sup_norm(u) <= Rational::from_integer(constants.c.clone()) / &d,
        ),
    ];
    let domain = !(u + f.gram()).det().is_zero();
    checks.push(Check::new("cayley_domain", None, domain));
    let form_ok = domain && u.is_skew() && {
        let tau = &(&(big_sigma * &tau_signs.to_matrix()) * &big_sigma.try_inverse()?) * sigma;
        &cayley(u, f)? * &tau == *tau_hat
    };
    checks.push(Check::new("search_set_form", None, form_ok));
    Ok(checks)
}
