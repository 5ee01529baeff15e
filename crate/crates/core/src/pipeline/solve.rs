use std::collections::BTreeMap;

use serde::Serialize;

use super::constants::{compute_constants, log_p, AvoidanceConstants};
use super::crt::skew_approximate;
use super::tau::{build_tau, compute_up, TauData};
use super::verify::{verify, verify_search_set, Check};
use crate::cayley::cayley;
use crate::error::{Error, Result};
use crate::exact::{padic_abs, padic_norm, PrimeSet, Rational, RationalMatrix};
use crate::padiclin::{local_equiv, PadicMatrixApprox, SignMatrix};
use crate::quadform::{rational_equiv_search, QuadraticForm, SearchPolicy};

/// How often the working precision at one prime may be doubled.
pub const MAX_DOUBLINGS: u32 = 8;

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// A rational equivalence `sigma' F sigma = G`; searched for if absent.
    pub sigma: Option<RationalMatrix>,
    /// A diagonalizer of `F`; the canonical one is used if absent.
    pub big_sigma: Option<RationalMatrix>,
    pub search: SearchPolicy,
    /// Starting p-adic precision for every prime, overriding the default.
    pub precision: Option<u32>,
    pub trace: bool,
}

/// Intermediate values of the final (successful) attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub precisions: BTreeMap<u64, u32>,
    pub attempts: u32,
    #[serde(serialize_with = "super::ser_matrix_map")]
    pub tau_p: BTreeMap<u64, RationalMatrix>,
    #[serde(serialize_with = "super::ser_matrix_map")]
    pub u_p: BTreeMap<u64, RationalMatrix>,
    #[serde(serialize_with = "super::ser_rational_map")]
    pub u_p_error: BTreeMap<u64, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceCertificate {
    #[serde(rename = "F", serialize_with = "super::ser_matrix")]
    pub f: RationalMatrix,
    #[serde(rename = "G", serialize_with = "super::ser_matrix")]
    pub g: RationalMatrix,
    pub primes: Vec<u64>,
    #[serde(serialize_with = "super::ser_matrix")]
    pub sigma: RationalMatrix,
    #[serde(rename = "Sigma", serialize_with = "super::ser_matrix")]
    pub big_sigma: RationalMatrix,
    #[serde(serialize_with = "super::ser_matrix")]
    pub tau: RationalMatrix,
    pub tau_signs: SignMatrix,
    pub sign_choices: BTreeMap<u64, SignMatrix>,
    #[serde(rename = "U", serialize_with = "super::ser_matrix")]
    pub u: RationalMatrix,
    #[serde(serialize_with = "super::ser_matrix")]
    pub tau_hat: RationalMatrix,
    pub constants: AvoidanceConstants,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
}

/// `l_p + 2n log_p(kappa_p) + 4`, plus two more digits at `p = 2`.
pub fn initial_precisions(constants: &AvoidanceConstants, n: usize) -> BTreeMap<u64, u32> {
    constants
        .per_prime
        .iter()
        .map(|(&p, k)| {
            let extra = if p == 2 { 2 } else { 0 };
            let kappa_digits = 2 * n as i64 * log_p(&k.kappa, p);
            (p, (k.ell as i64 + kappa_digits + 4 + extra) as u32)
        })
        .collect()
}

fn validate_sigma(f: &QuadraticForm, g: &QuadraticForm, sigma: &RationalMatrix) -> Result<()> {
    if sigma.rows() != f.dim() || sigma.cols() != f.dim() {
        return Err(Error::Dimension("sigma does not match the forms".into()));
    }
    if f.gram().congruence(sigma) != *g.gram() {
        return Err(Error::Precondition("supplied sigma does not carry F to G".into()));
    }
    Ok(())
}

fn validate_big_sigma(f: &QuadraticForm, big_sigma: &RationalMatrix) -> Result<()> {
    if big_sigma.rows() != f.dim() || big_sigma.cols() != f.dim() {
        return Err(Error::Dimension("Sigma does not match the form".into()));
    }
    big_sigma.try_inverse()?;
    if !f.gram().congruence(big_sigma).is_diagonal() {
        return Err(Error::Precondition("supplied Sigma does not diagonalize F".into()));
    }
    Ok(())
}

struct Attempt {
    data: TauData,
    u_p: BTreeMap<u64, PadicMatrixApprox>,
    u: RationalMatrix,
}

fn attempt(
    f: &QuadraticForm,
    g: &QuadraticForm,
    sigma: &RationalMatrix,
    big_sigma: &RationalMatrix,
    primes: &PrimeSet,
    constants: &AvoidanceConstants,
    precisions: &BTreeMap<u64, u32>,
) -> Result<Attempt> {
    let data = build_tau(f, g, sigma, big_sigma, primes, precisions)?;
    let u_p = data
        .tau_p
        .iter()
        .map(|(&p, tp)| compute_up(f, &data.tau, tp).map(|u| (p, u)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let u = skew_approximate(&u_p, constants, primes)?;
    Ok(Attempt { data, u_p, u })
}

/// Builds `tau_hat` in `GL_n(Z^P)` with `tau_hat' F tau_hat = G` and checks
/// the result exactly.
pub fn solve(
    f: &QuadraticForm,
    g: &QuadraticForm,
    primes: &PrimeSet,
    options: &SolveOptions,
) -> Result<EquivalenceCertificate> {
    if primes.is_empty() {
        return Err(Error::EmptyPrimeSet);
    }
    if f.dim() != g.dim() {
        return Err(Error::Dimension("forms of different rank".into()));
    }
    for p in primes.iter() {
        local_equiv(f, g, p, 1)?;
    }
    let sigma = match &options.sigma {
        Some(s) => {
            validate_sigma(f, g, s)?;
            s.clone()
        }
        None => rational_equiv_search(f, g, &options.search)?,
    };
    let big_sigma = match &options.big_sigma {
        Some(s) => {
            validate_big_sigma(f, s)?;
            s.clone()
        }
        None => f.diagonalizer().clone(),
    };
    let constants = compute_constants(f, &sigma, &big_sigma, primes)?;
    let mut precisions = match options.precision {
        Some(n) => primes.iter().map(|p| (p, n.max(1))).collect(),
        None => initial_precisions(&constants, f.dim()),
    };
    let mut doublings: BTreeMap<u64, u32> = BTreeMap::new();
    let mut attempts = 0;
    let run = loop {
        attempts += 1;
        match attempt(f, g, &sigma, &big_sigma, primes, &constants, &precisions) {
            Ok(run) => break run,
            Err(Error::InsufficientPrecision { prime, .. }) => {
                let count = doublings.entry(prime).or_default();
                if *count >= MAX_DOUBLINGS {
                    return Err(Error::PrecisionExhausted);
                }
                *count += 1;
                *precisions.get_mut(&prime).expect("prime in set") *= 2;
            }
            Err(e) => return Err(e),
        }
    };

    let tau_hat = &cayley(&run.u, f)? * &run.data.tau;
    let mut checks = verify(f, g, primes, &tau_hat)?.checks;
    checks.extend(verify_search_set(
        f,
        primes,
        &sigma,
        &big_sigma,
        &run.data.tau_signs,
        &run.u,
        &tau_hat,
    )?);
    let u_f = &run.u + f.gram();
    let det_u = u_f.det();
    for (&p, up) in &run.u_p {
        let det_up = (&up.lift() + f.gram()).det();
        checks.push(Check::new(
            "det_valuation",
            Some(p),
            padic_abs(&det_u, p) == padic_abs(&det_up, p),
        ));
    }
    for (&p, tp) in &run.data.tau_p {
        let close = padic_norm(&(&tau_hat - &tp.lift()), p) <= Rational::from_integer(1.into());
        checks.push(Check::new("local_closeness", Some(p), close));
    }
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(Error::Internal(format!(
            "check {} failed{}",
            bad.name,
            bad.prime.map_or(String::new(), |p| format!(" at p = {p}"))
        )));
    }

    let trace = options.trace.then(|| Trace {
        precisions: precisions.clone(),
        attempts,
        tau_p: run.data.tau_p.iter().map(|(&p, t)| (p, t.lift())).collect(),
        u_p: run.u_p.iter().map(|(&p, u)| (p, u.lift())).collect(),
        u_p_error: run.u_p.iter().map(|(&p, u)| (p, u.error_bound())).collect(),
    });
    Ok(EquivalenceCertificate {
        f: f.gram().clone(),
        g: g.gram().clone(),
        primes: primes.primes().to_vec(),
        sigma,
        big_sigma,
        tau: run.data.tau,
        tau_signs: run.data.tau_signs,
        sign_choices: run.data.sign_choices,
        u: run.u,
        tau_hat,
        constants,
        checks,
        trace,
    })
}
