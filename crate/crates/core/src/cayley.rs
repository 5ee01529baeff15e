//! The Cayley transformation `U -> (U+Q)^{-1}(U-Q)` between skew-symmetric
//! matrices and `Q`-orthogonal matrices without eigenvalue 1, and its inverse
//! `mu -> 2Q(I-mu)^{-1} - Q`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{int, RationalMatrix};
use crate::quadform::QuadraticForm;

pub fn cayley(u: &RationalMatrix, q: &QuadraticForm) -> Result<RationalMatrix> {
    if u.rows() != q.dim() || !u.is_square() {
        return Err(Error::Dimension("skew matrix and form differ in size".into()));
    }
    if !u.is_skew() {
        return Err(Error::NotSkew);
    }
    let plus = (u + q.gram()).inverse().ok_or(Error::Singular)?;
    Ok(&plus * &(u - q.gram()))
}

pub fn cayley_inverse(mu: &RationalMatrix, q: &QuadraticForm) -> Result<RationalMatrix> {
    let n = q.dim();
    if mu.rows() != n || !mu.is_square() {
        return Err(Error::Dimension("matrix and form differ in size".into()));
    }
    if q.gram().congruence(mu) != *q.gram() {
        return Err(Error::Precondition("matrix is not orthogonal for the form".into()));
    }
    let id = RationalMatrix::identity(n);
    let gap = (&id - mu).inverse().ok_or(Error::Singular)?;
    Ok(&(q.gram() * &gap).scale(&int(2)) - q.gram())
}

/// `det(U + Q) != 0`, the condition for `U` to lie in the domain of [`cayley`].
pub fn in_domain(u: &RationalMatrix, q: &QuadraticForm) -> bool {
    !(u + q.gram()).det().is_zero()
}
