use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    int_valuation, pow_p, reduce_mod_pk, valuation, valuation_matrix, BigInt, Rational,
    RationalMatrix,
};

/// A p-adic matrix known to finite precision.
///
/// Represents the coset `p^{-shift} (M + p^precision * M(Z_p))` where `M` is
/// the integer `residue` matrix with entries in `[0, p^precision)`. The value
/// is therefore known modulo `p^{precision - shift}` in absolute terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicMatrixApprox {
    p: u64,
    rows: usize,
    cols: usize,
    shift: i64,
    residue: Vec<BigInt>,
    precision: u32,
}

impl PadicMatrixApprox {
    pub fn new(
        p: u64,
        rows: usize,
        cols: usize,
        shift: i64,
        residue: Vec<BigInt>,
        precision: u32,
    ) -> Result<Self> {
        if precision == 0 {
            return Err(Error::Precondition("precision must be at least 1".into()));
        }
        if residue.len() != rows * cols {
            return Err(Error::Dimension("residue length".into()));
        }
        let modulus = BigInt::from(p).pow(precision);
        let residue = residue.into_iter().map(|x| x.mod_floor(&modulus)).collect();
        Ok(Self {
            p,
            rows,
            cols,
            shift,
            residue,
            precision,
        })
    }

    /// Rounds an exact matrix, choosing the smallest shift that clears `p`
    /// from the denominators.
    pub fn from_rational(a: &RationalMatrix, p: u64, precision: u32) -> Result<Self> {
        let shift = valuation_matrix(a, p).map_or(0, |v| (-v).max(0));
        Self::from_rational_with_shift(a, p, shift, precision)
    }

    pub fn from_rational_with_shift(
        a: &RationalMatrix,
        p: u64,
        shift: i64,
        precision: u32,
    ) -> Result<Self> {
        let scale = pow_p(p, shift);
        let residue = a
            .entries()
            .iter()
            .map(|x| reduce_mod_pk(&(x * &scale), p, precision))
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, a.rows(), a.cols(), shift, residue, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &[BigInt] {
        &self.residue
    }

    /// Number of p-adic digits known in absolute terms.
    pub fn absolute_precision(&self) -> i64 {
        self.precision as i64 - self.shift
    }

    /// Bound on `||true - lift||_p`.
    pub fn error_bound(&self) -> Rational {
        pow_p(self.p, -self.absolute_precision())
    }

    /// The rational representative `p^{-shift} M`.
    pub fn lift(&self) -> RationalMatrix {
        let scale = pow_p(self.p, -self.shift);
        let entries = self
            .residue
            .iter()
            .map(|x| Rational::from_integer(x.clone()) * &scale)
            .collect();
        RationalMatrix::from_entries(self.rows, self.cols, entries).expect("shape is consistent")
    }

    /// Whether `exact` lies in the represented coset.
    pub fn contains(&self, exact: &RationalMatrix) -> bool {
        let diff = &self.lift() - exact;
        match valuation_matrix(&diff, self.p) {
            None => true,
            Some(v) => v >= self.absolute_precision(),
        }
    }

    /// Drops digits down to `precision` (no-op if already coarser).
    pub fn truncate(&self, precision: u32) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        Self::new(
            self.p,
            self.rows,
            self.cols,
            self.shift,
            self.residue.clone(),
            precision,
        )
        .expect("valid truncation")
    }

    fn residue_valuation(&self) -> u32 {
        self.residue
            .iter()
            .filter_map(|x| int_valuation(x, self.p))
            .min()
            .map_or(self.precision, |v| v as u32)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Precondition("approximations at different primes".into()));
        }
        Ok(())
    }

    /// Sum with conservative precision.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_compatible(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("approximation shapes".into()));
        }
        let shift = self.shift.max(other.shift);
        let up_a = (shift - self.shift) as u32;
        let up_b = (shift - other.shift) as u32;
        let precision = (self.precision + up_a).min(other.precision + up_b);
        let pa = BigInt::from(self.p).pow(up_a);
        let pb = BigInt::from(self.p).pow(up_b);
        let residue = self
            .residue
            .iter()
            .zip(&other.residue)
            .map(|(a, b)| {
                if negate {
                    a * &pa - b * &pb
                } else {
                    a * &pa + b * &pb
                }
            })
            .collect();
        Self::new(self.p, self.rows, self.cols, shift, residue, precision)
    }

    /// Product with precision `min(N1 + v(M2), N2 + v(M1))` relative to the
    /// combined shift.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension("approximation shapes".into()));
        }
        let precision = (self.precision + other.residue_valuation())
            .min(other.precision + self.residue_valuation());
        let mut residue = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += &self.residue[i * self.cols + k] * &other.residue[k * other.cols + j];
                }
                residue.push(acc);
            }
        }
        Self::new(
            self.p,
            self.rows,
            other.cols,
            self.shift + other.shift,
            residue,
            precision,
        )
    }

    /// Inverse of a square approximation. Loses `delta` relative digits where
    /// `p^{-delta}` is the norm of the residue's inverse; fails when the
    /// residue does not determine the inverse.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of non-square approximation".into()));
        }
        let m = RationalMatrix::from_entries(
            self.rows,
            self.cols,
            self.residue.iter().cloned().map(Rational::from_integer).collect(),
        )?;
        let insufficient = |reason: &str| Error::InsufficientPrecision {
            prime: self.p,
            reason: reason.into(),
        };
        let inv = m.inverse().ok_or_else(|| insufficient("residue is singular"))?;
        let delta = valuation_matrix(&inv, self.p).map_or(0, |v| (-v).max(0));
        if delta >= self.precision as i64 {
            return Err(insufficient("determinant valuation exceeds precision"));
        }
        let new_precision = self.precision - delta as u32;
        let scaled = inv.scale(&pow_p(self.p, delta));
        let residue = scaled
            .entries()
            .iter()
            .map(|x| reduce_mod_pk(x, self.p, new_precision))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            self.p,
            self.rows,
            self.cols,
            delta - self.shift,
            residue,
            new_precision,
        )
    }

    /// Entry-wise valuation of the lift, `None` for an entry known to be zero
    /// to the available precision.
    pub fn entry_valuation(&self, i: usize, j: usize) -> Option<i64> {
        let x = &self.residue[i * self.cols + j];
        if x.is_zero() {
            return None;
        }
        valuation(&Rational::from_integer(x.clone()), self.p).map(|v| v - self.shift)
    }

    pub fn is_unit_matrix(&self) -> bool {
        if self.shift != 0 || self.rows != self.cols {
            return false;
        }
        let m = self.lift();
        let d = m.det();
        !d.is_zero() && valuation(&d, self.p) == Some(0) && d.denom().is_one()
    }
}
