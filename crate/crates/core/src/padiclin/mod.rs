//! p-adic linear algebra on top of exact rationals: finite-precision matrix
//! approximations, the determinant-stability guard, sign-matrix selection,
//! diagonalization over `Z_p` and local equivalence of forms.

mod approx;
mod diagonal;
mod dyadic;
mod local;

pub use approx::PadicMatrixApprox;
pub use diagonal::{padic_diagonalize, padic_diagonalize_exact};
pub use local::{hensel_step, local_equiv, newton_threshold, seed_search};

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, padic_abs, padic_height, padic_norm, Rational, RationalMatrix};

/// A diagonal matrix with entries `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SignMatrix {
    signs: Vec<i8>,
}

impl SignMatrix {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Precondition("signs must be +1 or -1".into()));
        }
        Ok(Self { signs })
    }

    pub fn identity(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    /// All `2^n` sign matrices, lexicographic with `+1 < -1`.
    pub fn all(n: usize) -> impl Iterator<Item = SignMatrix> {
        (0u64..1 << n).map(move |mask| SignMatrix {
            signs: (0..n)
                .map(|i| if mask >> (n - 1 - i) & 1 == 1 { -1 } else { 1 })
                .collect(),
        })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        let d: Vec<Rational> = self.signs.iter().map(|&s| int(s as i64)).collect();
        RationalMatrix::diagonal(&d)
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.signs.iter().map(|s| s.to_string()).collect();
        write!(f, "diag({})", parts.join(","))
    }
}

/// `|det X|_p / h_p(X)^n`: the perturbation radius below which the p-adic
/// size of the determinant cannot change.
pub fn det_stability_radius(x: &RationalMatrix, p: u64) -> Result<Rational> {
    if !x.is_square() {
        return Err(Error::Dimension("determinant guard needs a square matrix".into()));
    }
    let det = x.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    Ok(padic_abs(&det, p) / num_traits::pow(padic_height(x, p), x.rows()))
}

/// True iff `||Y - X||_p < |det X|_p / h_p(X)^n`, in which case
/// `|det Y|_p = |det X|_p`.
pub fn det_stable(x: &RationalMatrix, y: &RationalMatrix, p: u64) -> Result<bool> {
    x.check_same_shape(y)?;
    let radius = det_stability_radius(x, p)?;
    Ok(padic_norm(&(y - x), p) < radius)
}

/// Same test when only a bound on `||Y - X||_p` is known.
pub fn det_stable_within(x: &RationalMatrix, perturbation: &Rational, p: u64) -> Result<bool> {
    Ok(*perturbation < det_stability_radius(x, p)?)
}

/// First sign matrix `E` (lexicographic, `+1 < -1`) with
/// `|det(A - E)|_p >= |2^n det A|_p`. One always exists for invertible `A`.
pub fn choose_sign_matrix(a: &RationalMatrix, p: u64) -> Result<SignMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("sign choice needs a square matrix".into()));
    }
    let n = a.rows();
    let det = a.det();
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let two_n = Rational::from_integer(num_traits::pow(crate::exact::BigInt::from(2), n));
    let bound = padic_abs(&(two_n * det), p);
    SignMatrix::all(n)
        .find(|e| padic_abs(&(a - &e.to_matrix()).det(), p) >= bound)
        .ok_or_else(|| Error::Internal("no sign matrix meets the determinant bound".into()))
}

/// `|det(A - E)|_p >= |2^n det A|_p`.
pub fn sign_bound_holds(a: &RationalMatrix, e: &SignMatrix, p: u64) -> bool {
    let n = a.rows();
    let two_n = Rational::from_integer(num_traits::pow(crate::exact::BigInt::from(2), n));
    padic_abs(&(a - &e.to_matrix()).det(), p) >= padic_abs(&(two_n * a.det()), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn sign_matrix_order() {
        let all: Vec<Vec<i8>> = SignMatrix::all(2).map(|e| e.signs().to_vec()).collect();
        assert_eq!(all, vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]);
        assert!(SignMatrix::new(vec![1, 0]).is_err());
    }

    #[test]
    fn choose_sign_examples() {
        let id = RationalMatrix::identity(2);
        assert_eq!(choose_sign_matrix(&id, 3).unwrap().signs(), &[-1, -1]);
        assert_eq!(choose_sign_matrix(&id, 5).unwrap().signs(), &[-1, -1]);
        let three = RationalMatrix::from_i64(&[&[3]]);
        assert_eq!(choose_sign_matrix(&three, 3).unwrap().signs(), &[1]);
        assert_eq!(
            choose_sign_matrix(&RationalMatrix::zeros(2, 2), 3),
            Err(Error::Singular)
        );
    }

    #[test]
    fn det_stable_examples() {
        let id = RationalMatrix::identity(2);
        let y = RationalMatrix::from_i64(&[&[5, 0], &[0, 1]]);
        assert!(det_stable(&id, &y, 2).unwrap());
        assert!(det_stable(&id, &id, 7).unwrap());
        let x = RationalMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        let y = RationalMatrix::from_i64(&[&[3, 0], &[0, 1]]);
        assert!(!det_stable(&x, &y, 2).unwrap());
        assert_eq!(
            det_stable(&RationalMatrix::zeros(2, 2), &id, 2),
            Err(Error::Singular)
        );
        assert!(det_stable_within(&id, &rat(1, 4), 2).unwrap());
        assert!(!det_stable_within(&id, &int(1), 2).unwrap());
    }
}
