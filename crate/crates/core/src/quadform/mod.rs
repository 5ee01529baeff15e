//! Quadratic forms over `Q`: regularity, orthogonal diagonalization,
//! signature, height-bounded representation search and genus checks.

mod genus;
mod search;

pub use genus::{relevant_primes, same_genus, GenusReport, Place, PlaceStatus};
pub use search::{masser_bound, rational_equiv_search, represent, SearchPolicy};

use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{valuation, BigInt, Rational, RationalMatrix};

/// A regular symmetric Gram matrix.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    gram: RationalMatrix,
    diagonalizer: OnceLock<RationalMatrix>,
}

impl PartialEq for QuadraticForm {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for QuadraticForm {}

impl QuadraticForm {
    pub fn new(gram: RationalMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension("Gram matrix must be square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self {
            gram,
            diagonalizer: OnceLock::new(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(RationalMatrix::from_i64(rows))
    }

    pub fn diagonal(entries: &[Rational]) -> Result<Self> {
        Self::new(RationalMatrix::diagonal(entries))
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn det(&self) -> Rational {
        self.gram.det()
    }

    /// `x' F y`.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let fy = self.gram.apply(y);
        x.iter()
            .zip(&fy)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// `F(x) = x' F x`.
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.bilinear(x, x)
    }

    /// The form `S' F S`; fails when `S` is singular.
    pub fn transform(&self, s: &RationalMatrix) -> Result<QuadraticForm> {
        QuadraticForm::new(self.gram.congruence(s))
    }

    /// Cached result of [`orthogonal_diagonalize`].
    pub fn diagonalizer(&self) -> &RationalMatrix {
        self.diagonalizer
            .get_or_init(|| orthogonal_diagonalize(self))
    }
}

/// Which working vector(s) the next orthogonal basis vector is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pivot {
    Single(usize),
    /// Use `w_i + w_j` and drop `w_j` from the working set.
    Pair(usize, usize),
}

/// Gram-Schmidt over the bilinear form with a caller-chosen pivot rule and
/// column normalization. Columns of the result are F-orthogonal.
pub(crate) fn diagonalize_with(
    gram: &RationalMatrix,
    pick: impl Fn(&RationalMatrix) -> Pivot,
    normalize: impl Fn(Vec<Rational>) -> Vec<Rational>,
) -> RationalMatrix {
    let n = gram.rows();
    let form = |x: &[Rational], y: &[Rational]| -> Rational {
        let fy = gram.apply(y);
        x.iter().zip(&fy).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    };
    let mut work: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            e
        })
        .collect();
    let mut columns = Vec::with_capacity(n);
    while !work.is_empty() {
        let k = work.len();
        let mut local = RationalMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let b = form(&work[i], &work[j]);
                local.set(j, i, b.clone());
                local.set(i, j, b);
            }
        }
        let x = match pick(&local) {
            Pivot::Single(i) => work.remove(i),
            Pivot::Pair(i, j) => {
                let wj = work.remove(j);
                work[i].iter().zip(&wj).map(|(a, b)| a + b).collect()
            }
        };
        let x = normalize(x);
        let fx = form(&x, &x);
        assert!(!fx.is_zero(), "pivot rule returned an isotropic vector");
        work = work
            .into_iter()
            .map(|w| {
                let c = form(&w, &x) / &fx;
                let projected = w.iter().zip(&x).map(|(a, b)| a - &c * b).collect();
                normalize(projected)
            })
            .collect();
        columns.push(x);
    }
    RationalMatrix::from_columns(&columns).expect("n columns of length n")
}

/// Rescales a nonzero vector by a positive rational to a primitive integer
/// vector. When `keep_prime` is set, only factors prime to it are removed.
pub(crate) fn primitive_scaling(v: Vec<Rational>, keep_prime: Option<u64>) -> Vec<Rational> {
    let strip = |mut n: BigInt| -> BigInt {
        if let Some(p) = keep_prime {
            let p = BigInt::from(p);
            while !n.is_zero() && (&n % &p).is_zero() {
                n /= &p;
            }
        }
        n
    };
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let lcm = strip(lcm);
    let scaled: Vec<Rational> = v.iter().map(|x| x * Rational::from_integer(lcm.clone())).collect();
    let content = strip(scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x.numer())));
    if content.is_zero() {
        return scaled;
    }
    let content = Rational::from_integer(content.abs());
    scaled.into_iter().map(|x| x / &content).collect()
}

/// Rational diagonalizer `Sigma` with `Sigma' F Sigma` diagonal.
///
/// Pivot on the first working vector with nonzero norm, else on `w_i + w_j`
/// for the first nonzero off-diagonal pair. Columns are primitive integral.
pub fn orthogonal_diagonalize(f: &QuadraticForm) -> RationalMatrix {
    diagonalize_with(
        f.gram(),
        |m| {
            let k = m.rows();
            if let Some(i) = (0..k).find(|&i| !m.get(i, i).is_zero()) {
                return Pivot::Single(i);
            }
            let (i, j) = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .find(|&(i, j)| !m.get(i, j).is_zero())
                .expect("regular form has a nonzero entry");
            Pivot::Pair(i, j)
        },
        |v| primitive_scaling(v, None),
    )
}

/// Pivot rule for odd `p`: an entry of minimal valuation, preferring the
/// diagonal. An off-diagonal minimum yields `w_i + w_j`, whose norm has the
/// same valuation because `p` is odd.
pub(crate) fn padic_pivot(m: &RationalMatrix, p: u64) -> Pivot {
    let k = m.rows();
    let min = m
        .entries()
        .iter()
        .filter_map(|x| valuation(x, p))
        .min()
        .expect("regular form has a nonzero entry");
    if let Some(i) = (0..k).find(|&i| valuation(m.get(i, i), p) == Some(min)) {
        return Pivot::Single(i);
    }
    let (i, j) = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| valuation(m.get(i, j), p) == Some(min))
        .expect("minimum is attained");
    Pivot::Pair(i, j)
}

/// `(n_plus, n_minus)` from the diagonalized form.
pub fn signature(f: &QuadraticForm) -> (usize, usize) {
    let d = f.gram().congruence(f.diagonalizer()).diag();
    let pos = d.iter().filter(|x| x.is_positive()).count();
    (pos, d.len() - pos)
}
