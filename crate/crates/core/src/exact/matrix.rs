use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{int, rational_to_string, Rational};
use crate::error::{Error, Result};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must be non-empty".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries given for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(columns: &[Vec<Rational>]) -> Result<Self> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(Error::Dimension("ragged columns".into()));
        }
        let mut entries = Vec::with_capacity(r * c);
        for i in 0..r {
            for col in columns {
                entries.push(col[i].clone());
            }
        }
        Self::from_entries(r, c, entries)
    }

    /// Convenience constructor from small integers. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .expect("well-formed integer matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<Rational> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .collect()
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|x| x * c)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.denom().is_one())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero() && (0..i).all(|j| *self.get(i, j) == -self.get(j, i))
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Congruence transform `S' * self * S`.
    pub fn congruence(&self, s: &RationalMatrix) -> RationalMatrix {
        &(&s.transpose() * self) * s
    }

    /// Exact determinant by fraction-carrying Gaussian elimination.
    pub fn det(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut det = Rational::one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&i| !a[i * n + k].is_zero()) else {
                return Rational::zero();
            };
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[k * n + k].clone();
            det *= &p;
            for i in k + 1..n {
                if a[i * n + k].is_zero() {
                    continue;
                }
                let f = &a[i * n + k] / &p;
                for j in k..n {
                    let t = &f * &a[k * n + j];
                    a[i * n + j] -= t;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let w = 2 * n;
        let mut a = vec![Rational::zero(); n * w];
        for i in 0..n {
            for j in 0..n {
                a[i * w + j] = self.get(i, j).clone();
            }
            a[i * w + n + i] = Rational::one();
        }
        for k in 0..n {
            let piv = (k..n).find(|&i| !a[i * w + k].is_zero())?;
            if piv != k {
                for j in 0..w {
                    a.swap(k * w + j, piv * w + j);
                }
            }
            let p = a[k * w + k].clone();
            for j in k..w {
                a[k * w + j] /= &p;
            }
            for i in 0..n {
                if i == k || a[i * w + k].is_zero() {
                    continue;
                }
                let f = a[i * w + k].clone();
                for j in k..w {
                    let t = &f * &a[k * w + j];
                    a[i * w + j] -= t;
                }
            }
        }
        let entries = (0..n)
            .flat_map(|i| a[i * w + n..(i + 1) * w].to_vec())
            .collect();
        Some(RationalMatrix {
            rows: n,
            cols: n,
            entries,
        })
    }

    pub fn try_inverse(&self) -> Result<RationalMatrix> {
        self.inverse().ok_or(Error::Singular)
    }

    /// Largest absolute value among the entries.
    pub fn max_abs(&self) -> Rational {
        self.entries
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn check_same_shape(&self, other: &RationalMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", rational_to_string(x))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a RationalMatrix> for &'a RationalMatrix {
    type Output = RationalMatrix;

    fn add(self, rhs: &'a RationalMatrix) -> RationalMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch in add");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a RationalMatrix> for &'a RationalMatrix {
    type Output = RationalMatrix;

    fn sub(self, rhs: &'a RationalMatrix) -> RationalMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch in sub");
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a RationalMatrix> for &'a RationalMatrix {
    type Output = RationalMatrix;

    fn mul(self, rhs: &'a RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc += a * rhs.get(k, j);
                }
                entries.push(acc);
            }
        }
        RationalMatrix {
            rows: self.rows,
            cols: rhs.cols,
            entries,
        }
    }
}

impl Neg for &RationalMatrix {
    type Output = RationalMatrix;

    fn neg(self) -> RationalMatrix {
        self.map(|x| -x)
    }
}
