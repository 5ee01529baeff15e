//! Seed search over `Z_2` guided by a Jordan splitting of `F`.
//!
//! After `S'FS = J = ⊕ 2^s U` (blocks of size 1 with odd `U`, or size 2
//! with even diagonal and odd off-diagonal), a row of `Y` in a block of
//! scale `s` only affects `Y'JY` from level `s` on. Digits are therefore
//! introduced row block by row block as they become relevant, which keeps
//! every lifting step linear over `F_2` except when an even block enters.

use num_traits::{ToPrimitive, Zero};

use super::local::{rank_mod_p, solve_mod_p, FpVectors};
use crate::error::{Error, Result};
use crate::exact::{reduce_mod_pk, valuation, BigInt, Rational, RationalMatrix};

#[derive(Debug, Clone)]
struct Block {
    rows: Vec<usize>,
    scale: u32,
    odd: bool,
}

fn swap(a: &mut RationalMatrix, s: &mut RationalMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.rows();
    let mut t = RationalMatrix::identity(n);
    t.set(i, i, Rational::zero());
    t.set(j, j, Rational::zero());
    t.set(i, j, Rational::from_integer(1.into()));
    t.set(j, i, Rational::from_integer(1.into()));
    *a = a.congruence(&t);
    *s = &*s * &t;
}

/// `S` in `GL_n(Z_(2))` with `S'FS` block diagonal, and its blocks.
fn jordan_blocks(f: &RationalMatrix) -> Result<(RationalMatrix, Vec<Block>)> {
    let n = f.rows();
    let mut a = f.clone();
    let mut s = RationalMatrix::identity(n);
    let mut blocks = Vec::new();
    let mut k = 0;
    while k < n {
        let val = |a: &RationalMatrix, i: usize, j: usize| valuation(a.get(i, j), 2);
        let diag = (k..n).filter_map(|i| val(&a, i, i).map(|v| (v, i))).min();
        let off = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| val(&a, i, j).map(|v| (v, i, j)))
            .min();
        let scale = |v: i64| u32::try_from(v).map_err(|_| Error::Precondition("form is not 2-integral".into()));
        match (diag, off) {
            (None, None) => return Err(Error::Singular),
            (Some((dv, i)), o) if o.is_none_or(|(ov, _, _)| dv <= ov) => {
                swap(&mut a, &mut s, k, i);
                let mut t = RationalMatrix::identity(n);
                for j in k + 1..n {
                    t.set(k, j, -(a.get(k, j) / a.get(k, k)));
                }
                a = a.congruence(&t);
                s = &s * &t;
                blocks.push(Block { rows: vec![k], scale: scale(dv)?, odd: true });
                k += 1;
            }
            (_, Some((ov, i, j))) => {
                swap(&mut a, &mut s, k, i);
                let j = if j == k { i } else { j };
                swap(&mut a, &mut s, k + 1, j);
                let det = a.get(k, k) * a.get(k + 1, k + 1) - a.get(k, k + 1) * a.get(k, k + 1);
                let mut t = RationalMatrix::identity(n);
                for j in k + 2..n {
                    let (x, y) = (a.get(k, j), a.get(k + 1, j));
                    let c0 = (a.get(k + 1, k + 1) * x - a.get(k, k + 1) * y) / &det;
                    let c1 = (a.get(k, k) * y - a.get(k, k + 1) * x) / &det;
                    t.set(k, j, -c0);
                    t.set(k + 1, j, -c1);
                }
                a = a.congruence(&t);
                s = &s * &t;
                blocks.push(Block { rows: vec![k, k + 1], scale: scale(ov)?, odd: false });
                k += 2;
            }
            (Some(_), None) => unreachable!(),
        }
    }
    Ok((s, blocks))
}

struct JordanSearch {
    n: usize,
    e: u32,
    modulus: i128,
    j: Vec<i128>,
    g: Vec<i128>,
    blocks: Vec<Block>,
}

impl JordanSearch {
    /// Number of low digits of a block's rows that `Y'JY` depends on at
    /// `level` (off-diagonal mod `2^level`, diagonal mod `2^{level+1}`).
    fn digits(b: &Block, level: i64) -> u32 {
        let s = i64::from(b.scale);
        if level < s {
            0
        } else if level == s {
            u32::from(b.odd)
        } else {
            (level - s) as u32
        }
    }

    fn pairing(&self, y: &[i128], i: usize, k: usize) -> i128 {
        let n = self.n;
        let mut acc = 0;
        for r in 0..n {
            let mut jy = 0;
            for c in 0..n {
                jy = (jy + self.j[r * n + c] * y[c * n + k]) % self.modulus;
            }
            acc = (acc + y[r * n + i] * jy) % self.modulus;
        }
        acc
    }

    /// The bits that must vanish for the congruence to hold one level up:
    /// bit `level` of each off-diagonal defect and bit `level + 1` of each
    /// diagonal defect.
    fn defects(&self, y: &[i128], level: i64) -> Vec<i128> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for k in i..n {
                let bit = if i == k { level + 1 } else { level };
                if bit < 0 {
                    continue;
                }
                let d = (self.g[i * n + k] - self.pairing(y, i, k)).rem_euclid(self.modulus);
                debug_assert_eq!(d % (1i128 << bit), 0);
                out.push(d >> bit & 1);
            }
        }
        out
    }

    fn units_independent(&self, y: &[i128], level: i64) -> bool {
        let n = self.n;
        let rows: Vec<Vec<i128>> = self
            .blocks
            .iter()
            .filter(|b| Self::digits(b, level) > 0)
            .flat_map(|b| b.rows.iter())
            .map(|&r| (0..n).map(|c| y[r * n + c] & 1).collect())
            .collect();
        rank_mod_p(&rows, 2) == rows.len()
    }

    fn run(&self) -> Option<Vec<i128>> {
        self.step(vec![0; self.n * self.n], -1)
    }

    fn step(&self, y: Vec<i128>, level: i64) -> Option<Vec<i128>> {
        if level == i64::from(self.e) {
            return self.units_independent(&y, level).then_some(y);
        }
        let n = self.n;
        let mut linear = Vec::new();
        let mut quadratic = Vec::new();
        for b in &self.blocks {
            let (from, to) = (Self::digits(b, level), Self::digits(b, level + 1));
            if to == from {
                continue;
            }
            let target = if from == 0 && !b.odd { &mut quadratic } else { &mut linear };
            for &r in &b.rows {
                for c in 0..n {
                    target.push((r * n + c, 1i128 << from));
                }
            }
        }
        let base = self.defects(&y, level);
        let coefficients: Vec<Vec<i128>> = linear
            .iter()
            .map(|&(at, w)| {
                let mut z = y.clone();
                z[at] += w;
                self.defects(&z, level)
                    .iter()
                    .zip(&base)
                    .map(|(a, b)| (a - b).rem_euclid(2))
                    .collect()
            })
            .collect();
        let entered = self
            .blocks
            .iter()
            .any(|b| Self::digits(b, level) == 0 && Self::digits(b, level + 1) > 0);
        for q in FpVectors::new(quadratic.len(), 2) {
            let mut z = y.clone();
            for (&(at, w), &bit) in quadratic.iter().zip(&q) {
                z[at] += w * bit;
            }
            let rhs = self.defects(&z, level);
            let rows = rhs
                .iter()
                .enumerate()
                .map(|(eq, &r)| {
                    let mut row: Vec<i128> = coefficients.iter().map(|c| c[eq]).collect();
                    row.push(r);
                    row
                })
                .collect();
            let Some((particular, kernel)) = solve_mod_p(rows, linear.len(), 2) else {
                continue;
            };
            for combo in FpVectors::new(kernel.len(), 2) {
                let mut next = z.clone();
                for (v, &(at, w)) in linear.iter().enumerate() {
                    let bit = kernel
                        .iter()
                        .zip(&combo)
                        .fold(particular[v], |acc, (kv, t)| acc ^ (kv[v] * t));
                    next[at] += w * bit;
                }
                if entered && !self.units_independent(&next, level + 1) {
                    continue;
                }
                if let Some(found) = self.step(next, level + 1) {
                    return Some(found);
                }
            }
        }
        None
    }
}

/// A 2-integral unit `X` with `X'FX ≡ G` off the diagonal mod `2^e` and on
/// the diagonal mod `2^{e+1}`, or `None` if there is none. `F` and `G` must
/// be 2-integral.
pub(super) fn jordan_seed(f: &RationalMatrix, g: &RationalMatrix, e: u32) -> Result<Option<RationalMatrix>> {
    let n = f.rows();
    let (s, blocks) = jordan_blocks(f)?;
    let e = blocks.iter().map(|b| b.scale + 1).fold(e, u32::max);
    let m = e + 2;
    let modulus = 1i128
        .checked_shl(m)
        .filter(|&q| m < 62 && q.checked_mul(q).is_some())
        .ok_or(Error::SearchOverflow(u64::from(m)))?;
    let to_mod = |x: &Rational| -> Result<i128> {
        reduce_mod_pk(x, 2, m)?
            .to_i128()
            .ok_or(Error::SearchOverflow(u64::from(m)))
    };
    let search = JordanSearch {
        n,
        e,
        modulus,
        j: f.congruence(&s).entries().iter().map(to_mod).collect::<Result<_>>()?,
        g: g.entries().iter().map(to_mod).collect::<Result<_>>()?,
        blocks,
    };
    Ok(search.run().map(|y| {
        let entries = y.into_iter().map(|v| Rational::from_integer(BigInt::from(v))).collect();
        &s * &RationalMatrix::from_entries(n, n, entries).expect("square")
    }))
}
