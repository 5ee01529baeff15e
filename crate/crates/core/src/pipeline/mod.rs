//! The construction itself: sign-twisted rational equivalence `tau`, local
//! equivalences `tau_p`, their Cayley preimages `U_p`, a simultaneous CRT
//! approximation `U`, and the final `tau_hat = (U+F)^{-1}(U-F) tau` with
//! exact verification.

mod constants;
mod crt;
mod solve;
mod tau;
mod verify;

pub use constants::{compute_constants, ell_for, AvoidanceConstants, PrimeConstants};
pub use crt::{crt_approximate, skew_approximate};
pub use solve::{initial_precisions, solve, EquivalenceCertificate, SolveOptions, Trace, MAX_DOUBLINGS};
pub use tau::{build_tau, compute_up, gap_det_abs, tau_p_is_consistent, TauData};
pub use verify::{verify, verify_search_set, Check, VerificationReport};

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};

use crate::exact::{rational_to_string, BigInt, Rational, RationalMatrix};

pub(crate) fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(q))
}

pub(crate) fn ser_bigint<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn matrix_strings(m: &RationalMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(rational_to_string).collect())
        .collect()
}

pub(crate) fn ser_matrix<S: Serializer>(m: &RationalMatrix, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(matrix_strings(m))
}

pub(crate) fn ser_matrix_map<S: Serializer>(
    m: &BTreeMap<u64, RationalMatrix>,
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(m.len()))?;
    for (p, v) in m {
        map.serialize_entry(p, &matrix_strings(v))?;
    }
    map.end()
}

pub(crate) fn ser_rational_map<S: Serializer>(
    m: &BTreeMap<u64, Rational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(m.len()))?;
    for (p, v) in m {
        map.serialize_entry(p, &rational_to_string(v))?;
    }
    map.end()
}
