use crate::error::{Error, Result};
use crate::exact::RationalMatrix;
use crate::quadform::{diagonalize_with, padic_pivot, primitive_scaling, QuadraticForm};

use super::PadicMatrixApprox;

/// Exact `Sigma_p` in `GL_n(Z_(p))` with `Sigma_p' F Sigma_p` diagonal, for odd `p`.
///
/// Gram-Schmidt pivoting on an entry of minimal valuation keeps every
/// elimination coefficient p-integral, and columns are rescaled only by
/// p-units, so `|det Sigma_p|_p = 1` and the diagonalization is exact.
pub fn padic_diagonalize_exact(f: &QuadraticForm, p: u64) -> Result<RationalMatrix> {
    if p == 2 {
        return Err(Error::Precondition(
            "forms over Z_2 need not be diagonalizable".into(),
        ));
    }
    Ok(diagonalize_with(
        f.gram(),
        |m| padic_pivot(m, p),
        |v| primitive_scaling(v, Some(p)),
    ))
}

/// [`padic_diagonalize_exact`] rounded to `precision` digits. The
/// diagonalization is exact, so no guard digits are lost.
pub fn padic_diagonalize(f: &QuadraticForm, p: u64, precision: u32) -> Result<PadicMatrixApprox> {
    let sigma = padic_diagonalize_exact(f, p)?;
    PadicMatrixApprox::from_rational_with_shift(&sigma, p, 0, precision)
}
