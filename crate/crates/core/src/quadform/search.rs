//! Height-ordered search for rational representations `F(t) = b`.
//!
//! Rational vectors are enumerated as primitive integer vectors `(m, x)` with
//! `m > 0` and `t = x / m`, so that `h(t) = max(m, |x_i|)`. Within a height
//! shell the order is lexicographic in `(m, x_1, .., x_k)`, where each
//! coordinate runs `0, 1, -1, 2, -2, ..`. The last coordinate is solved from
//! the quadratic equation instead of being enumerated.

use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{orthogonal_diagonalize, primitive_scaling, QuadraticForm};
use crate::error::{Error, Result};
use crate::exact::{hom_height, BigInt, Rational, RationalMatrix};

/// Height cutoff policy for the rational-equivalence search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchPolicy {
    /// Use the full bound of Masser's theorem at every step. Exhaustion is a
    /// certificate of non-equivalence, but the bound is usually far out of reach.
    Masser,
    /// Cap every step at this height (never above the Masser bound).
    /// Exhaustion below the Masser bound is reported as inconclusive.
    MaxHeight(u64),
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy::MaxHeight(64)
    }
}

/// `floor(3^{(k+1)/2} k^{k+1} H(F_b)^{(k+1)/2})` for the `k`-ary form `F` and
/// `F_b = F ⊥ <-b>`.
pub fn masser_bound(f: &QuadraticForm, b: &Rational) -> BigInt {
    let k = f.dim();
    let mut ext = RationalMatrix::zeros(k + 1, k + 1);
    for i in 0..k {
        for j in 0..k {
            ext.set(i, j, f.gram().get(i, j).clone());
        }
    }
    ext.set(k, k, -b);
    let h = hom_height(ext.entries()).expect("form is nonzero");
    let h = h.to_integer();
    let e = (k + 1) as u32;
    let radicand = BigInt::from(3).pow(e) * BigInt::from(k).pow(2 * e) * h.pow(e);
    radicand.sqrt()
}

/// Finds `t` with `F(t) = b` and `h(t) <= cutoff`, smallest height first.
pub fn represent(f: &QuadraticForm, b: &Rational, cutoff: &BigInt) -> Result<Vec<Rational>> {
    if b.is_zero() {
        return Err(Error::Precondition("value to represent must be nonzero".into()));
    }
    let k = f.dim();
    // Clear denominators: x' A x = c m^2 with A, c integral.
    let lcm = f
        .gram()
        .entries()
        .iter()
        .chain(std::iter::once(b))
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let to_i128 = |x: &Rational| -> Result<i128> {
        (x * Rational::from_integer(lcm.clone()))
            .to_integer()
            .to_i128()
            .ok_or(Error::SearchOverflow(0))
    };
    let mut a = vec![0i128; k * k];
    for i in 0..k {
        for j in 0..k {
            a[i * k + j] = to_i128(f.gram().get(i, j))?;
        }
    }
    let c = to_i128(b)?;
    let searcher = ShellSearch { k, a, c };

    let mut h: u64 = 1;
    while BigInt::from(h) <= *cutoff {
        if let Some((m, x)) = searcher.shell(h)? {
            let m = Rational::from_integer(BigInt::from(m));
            return Ok(x
                .into_iter()
                .map(|xi| Rational::from_integer(BigInt::from(xi)) / &m)
                .collect());
        }
        h += 1;
    }
    Err(Error::NotFound {
        value: crate::exact::rational_to_string(b),
        cutoff: cutoff.to_string(),
    })
}

struct ShellSearch {
    k: usize,
    a: Vec<i128>,
    c: i128,
}

/// `0, 1, -1, 2, -2, ..` up to `h`.
fn signed_order(h: i128) -> impl Iterator<Item = i128> {
    std::iter::once(0).chain((1..=h).flat_map(|v| [v, -v]))
}

fn order_key(x: i128) -> (i128, bool) {
    (x.abs(), x < 0)
}

impl ShellSearch {
    /// First hit in the shell of height exactly `h`.
    fn shell(&self, h: u64) -> Result<Option<(i128, Vec<i128>)>> {
        let hh = h as i128;
        let free = self.k - 1;
        let mut x = vec![0i128; self.k];
        for m in 1..=hh {
            if let Some(hit) = self.scan(h, m, &mut x, 0, free)? {
                return Ok(Some((m, hit)));
            }
        }
        Ok(None)
    }

    fn scan(
        &self,
        h: u64,
        m: i128,
        x: &mut Vec<i128>,
        depth: usize,
        free: usize,
    ) -> Result<Option<Vec<i128>>> {
        let hh = h as i128;
        if depth < free {
            for v in signed_order(hh) {
                x[depth] = v;
                if let Some(hit) = self.scan(h, m, x, depth + 1, free)? {
                    return Ok(Some(hit));
                }
            }
            return Ok(None);
        }
        let on_shell = m == hh || x[..free].iter().any(|v| v.abs() == hh);
        let last = free;
        let overflow = || Error::SearchOverflow(h);
        // a_kk t^2 + beta t + gamma = 0 for the last coordinate t.
        let akk = self.a[last * self.k + last];
        let mut beta: i128 = 0;
        let mut gamma: i128 = 0;
        for i in 0..free {
            let ai = self.a[i * self.k + last];
            beta = ai
                .checked_mul(x[i])
                .and_then(|t| t.checked_mul(2))
                .and_then(|t| beta.checked_add(t))
                .ok_or_else(overflow)?;
            for j in 0..free {
                gamma = self.a[i * self.k + j]
                    .checked_mul(x[i])
                    .and_then(|t| t.checked_mul(x[j]))
                    .and_then(|t| gamma.checked_add(t))
                    .ok_or_else(overflow)?;
            }
        }
        gamma = self
            .c
            .checked_mul(m * m)
            .and_then(|t| gamma.checked_sub(t))
            .ok_or_else(overflow)?;

        let mut roots: Vec<i128> = Vec::with_capacity(2);
        if akk == 0 {
            if beta == 0 {
                if gamma == 0 {
                    roots.push(if on_shell { 0 } else { hh });
                }
            } else if gamma % beta == 0 {
                roots.push(-gamma / beta);
            }
        } else {
            let disc = beta
                .checked_mul(beta)
                .and_then(|b2| akk.checked_mul(gamma).and_then(|t| t.checked_mul(4)).and_then(|t| b2.checked_sub(t)))
                .ok_or_else(overflow)?;
            if disc >= 0 {
                let s = (disc as u128).sqrt() as i128;
                if s * s == disc {
                    let den = 2 * akk;
                    for num in [-beta + s, -beta - s] {
                        if num % den == 0 {
                            roots.push(num / den);
                        }
                    }
                    roots.dedup();
                }
            }
        }
        roots.sort_by_key(|&t| order_key(t));
        for t in roots {
            if t.abs() > hh || (!on_shell && t.abs() != hh) {
                continue;
            }
            x[last] = t;
            return Ok(Some(x.clone()));
        }
        Ok(None)
    }
}

/// Integral basis of `{y : r . y = 0}` for a nonzero row `r`.
fn kernel_basis(r: &[Rational]) -> Vec<Vec<Rational>> {
    let k = r.len();
    let j = r.iter().position(|x| !x.is_zero()).expect("nonzero row");
    (0..k)
        .filter(|&i| i != j)
        .map(|i| {
            let mut v = vec![Rational::zero(); k];
            v[i] = r[j].clone();
            v[j] = -&r[i];
            primitive_scaling(v, None)
        })
        .collect()
}

/// Finds `sigma` with `sigma' F sigma = G` by representing the diagonal
/// entries of a diagonalization of `G` one at a time on successive
/// orthogonal complements.
pub fn rational_equiv_search(
    f: &QuadraticForm,
    g: &QuadraticForm,
    policy: &SearchPolicy,
) -> Result<RationalMatrix> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::Dimension("forms of different rank".into()));
    }
    let sigma_g = orthogonal_diagonalize(g);
    let targets = g.gram().congruence(&sigma_g).diag();

    let mut basis = RationalMatrix::identity(n);
    let mut current = f.clone();
    let mut columns = Vec::with_capacity(n);
    for (step, b) in targets.iter().enumerate() {
        let masser = masser_bound(&current, b);
        let (cutoff, certified) = match policy {
            SearchPolicy::Masser => (masser.clone(), true),
            SearchPolicy::MaxHeight(cap) => {
                let cap = BigInt::from(*cap);
                if cap >= masser {
                    (masser.clone(), true)
                } else {
                    (cap, false)
                }
            }
        };
        let y = match represent(&current, b, &cutoff) {
            Ok(y) => y,
            Err(Error::NotFound { .. }) if certified => {
                return Err(Error::NotRationallyEquivalent {
                    cutoff: cutoff.to_string(),
                })
            }
            Err(Error::NotFound { .. }) => {
                return Err(Error::Inconclusive {
                    cutoff: cutoff.to_string(),
                })
            }
            Err(e) => return Err(e),
        };
        columns.push(basis.apply(&y));
        if step + 1 == n {
            break;
        }
        let row = current.gram().apply(&y);
        let kernel = RationalMatrix::from_columns(&kernel_basis(&row))?;
        current = current.transform(&kernel)?;
        basis = &basis * &kernel;
    }
    let sigma0 = RationalMatrix::from_columns(&columns)?;
    let sigma = &sigma0 * &sigma_g.try_inverse()?;
    if f.gram().congruence(&sigma) != *g.gram() {
        return Err(Error::Internal("search produced a non-equivalence".into()));
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{inhom_height, int};

    fn sum_of_squares() -> QuadraticForm {
        QuadraticForm::diagonal(&[int(1), int(1)]).unwrap()
    }

    #[test]
    fn represent_examples() {
        let f = sum_of_squares();
        let big = BigInt::from(100);
        assert_eq!(represent(&f, &int(5), &big).unwrap(), vec![int(1), int(2)]);
        let one = QuadraticForm::diagonal(&[int(1)]).unwrap();
        assert_eq!(represent(&one, &int(4), &big).unwrap(), vec![int(2)]);
    }

    #[test]
    fn masser_bound_small_case() {
        // H(diag(1,1,-3)) = 3, k = 2: sqrt(3^3 * 2^6 * 3^3) = 216.
        assert_eq!(masser_bound(&sum_of_squares(), &int(3)), BigInt::from(216));
    }

    #[test]
    fn three_is_not_a_sum_of_two_rational_squares() {
        let f = sum_of_squares();
        let cutoff = masser_bound(&f, &int(3));
        assert!(matches!(
            represent(&f, &int(3), &cutoff),
            Err(Error::NotFound { .. })
        ));
    }

    #[test]
    fn rational_representations_with_denominators() {
        // 3x^2 = 1/3 forces x = 1/3.
        let f = QuadraticForm::diagonal(&[int(3)]).unwrap();
        let t = represent(&f, &crate::exact::rat(1, 3), &BigInt::from(10)).unwrap();
        assert_eq!(t, vec![crate::exact::rat(1, 3)]);
        assert_eq!(inhom_height(&t), int(3));
    }

    #[test]
    fn isotropic_last_coordinate() {
        let f = QuadraticForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        let t = represent(&f, &int(6), &BigInt::from(10)).unwrap();
        assert_eq!(f.eval(&t), int(6));
    }

    #[test]
    fn equivalence_search_examples() {
        let f = sum_of_squares();
        let g = QuadraticForm::diagonal(&[int(2), int(2)]).unwrap();
        let s = rational_equiv_search(&f, &g, &SearchPolicy::default()).unwrap();
        assert_eq!(s, RationalMatrix::from_i64(&[&[1, -1], &[1, 1]]));

        let s = rational_equiv_search(&f, &f, &SearchPolicy::default()).unwrap();
        assert_eq!(f.gram().congruence(&s), *f.gram());

        let g = QuadraticForm::diagonal(&[int(1), int(3)]).unwrap();
        assert!(matches!(
            rational_equiv_search(&f, &g, &SearchPolicy::default()),
            Err(Error::NotRationallyEquivalent { .. })
        ));
    }

    #[test]
    fn capped_search_is_inconclusive() {
        let f = sum_of_squares();
        let g = QuadraticForm::diagonal(&[int(1), int(3)]).unwrap();
        // The first step (b = 1) succeeds at height 1; the complement step
        // has Masser bound 9, so a cap of 2 cannot certify.
        assert!(matches!(
            rational_equiv_search(&f, &g, &SearchPolicy::MaxHeight(2)),
            Err(Error::Inconclusive { .. })
        ));
    }
}
