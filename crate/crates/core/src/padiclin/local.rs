//! Local equivalence over `Z_p`.
//!
//! Odd `p`: both forms are diagonalized exactly over `Z_(p)`, Jordan
//! invariants (dimension and determinant square class of each scaled
//! component) are compared, and an isometry between matching unimodular
//! components is found mod `p` by Witt's greedy construction, then
//! Newton-lifted.
//!
//! `p = 2`: after invariant pre-checks, a digit search guided by a Jordan
//! splitting of `F` finds a seed solution modulo `2^e` past the Newton
//! threshold, which is then lifted. [`seed_search`] is the plain exhaustive
//! digit search, kept for small cases and cross-checks.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive};

use super::diagonal::padic_diagonalize_exact;
use super::dyadic::jordan_seed;
use super::PadicMatrixApprox;
use crate::error::{Error, Result};
use crate::exact::{
    pow_p, reduce_mod_pk, valuation, valuation_matrix, BigInt, Rational, RationalMatrix,
};
use crate::quadform::QuadraticForm;

fn v2(p: u64) -> u32 {
    u32::from(p == 2)
}

/// `v_p(2) + w`, where `p^{-w}` is the norm of `F^{-1}` (floored at `w = 0`).
///
/// For a unit `X` this equals `v_p(2) - min v_p((X'F)^{-1})`. A Newton step
/// from a residual of valuation `k > c` gives a residual of valuation at
/// least `2k - c - v_p(2)`.
pub fn newton_threshold(f: &RationalMatrix, p: u64) -> Result<u32> {
    let inv = f.try_inverse()?;
    let w = valuation_matrix(&inv, p).map_or(0, |v| (-v).max(0)) as u32;
    Ok(v2(p) + w)
}

fn reduce_matrix(x: &RationalMatrix, p: u64, k: u32) -> Result<RationalMatrix> {
    let entries = x
        .entries()
        .iter()
        .map(|e| reduce_mod_pk(e, p, k).map(Rational::from_integer))
        .collect::<Result<Vec<_>>>()?;
    RationalMatrix::from_entries(x.rows(), x.cols(), entries)
}

fn residual(f: &RationalMatrix, g: &RationalMatrix, x: &RationalMatrix) -> RationalMatrix {
    g - &f.congruence(x)
}

/// One Newton step `X + (X'F)^{-1} R / 2` with `R = G - X'FX`.
///
/// `F` and `G` must be p-integral and `X` a unit matrix (shift 0). The
/// result is reduced modulo `p^{k'}` with `k' = 2k - c - v_p(2)`, the
/// guaranteed valuation of the new residual, and carries precision `k'`.
pub fn hensel_step(
    f: &QuadraticForm,
    g: &QuadraticForm,
    x: &PadicMatrixApprox,
) -> Result<PadicMatrixApprox> {
    let p = x.p();
    check_integral(f.gram(), p)?;
    check_integral(g.gram(), p)?;
    if !x.is_unit_matrix() {
        return Err(Error::Precondition("Newton step needs a unit matrix".into()));
    }
    let xm = x.lift();
    let r = residual(f.gram(), g.gram(), &xm);
    let Some(k) = valuation_matrix(&r, p) else {
        return Ok(x.clone());
    };
    let xf_inv = (&xm.transpose() * f.gram()).try_inverse()?;
    let w = valuation_matrix(&xf_inv, p).map_or(0, |v| (-v).max(0));
    let c = v2(p) as i64 + w;
    if k <= c {
        return Err(Error::Precondition(format!(
            "residual valuation {k} does not exceed the Newton threshold {c}"
        )));
    }
    let delta = (&xf_inv * &r).scale(&Rational::new(BigInt::one(), BigInt::from(2)));
    let k_next = (2 * k - c - v2(p) as i64) as u32;
    PadicMatrixApprox::from_rational_with_shift(&(&xm + &delta), p, 0, k_next.max(1))
}

fn check_integral(m: &RationalMatrix, p: u64) -> Result<()> {
    if valuation_matrix(m, p).is_some_and(|v| v < 0) {
        return Err(Error::Precondition(format!("matrix is not {p}-integral")));
    }
    Ok(())
}

/// Newton iteration from an integral seed whose residual has valuation at
/// least `k0 > c + v_p(2)`. Iterate `t` is reduced modulo `p^{k_t}` with the
/// fixed schedule `k_{t+1} = 2 k_t - c - v_p(2)`, so the iterates do not
/// depend on `target`; the limit agrees with iterate `t` modulo `p^{k_t - c}`.
fn newton_lift(
    f: &RationalMatrix,
    g: &RationalMatrix,
    seed: RationalMatrix,
    p: u64,
    k0: u32,
    c: u32,
    target: u32,
) -> Result<RationalMatrix> {
    if k0 <= c + v2(p) {
        return Err(Error::Internal("seed below the Newton threshold".into()));
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut x = seed;
    let mut k = k0;
    while k < target + c {
        let r = residual(f, g, &x);
        match valuation_matrix(&r, p) {
            None => break,
            Some(v) if v < k as i64 => {
                return Err(Error::Internal(format!(
                    "Newton residual valuation {v} below schedule {k}"
                )))
            }
            Some(_) => {}
        }
        let xf_inv = (&x.transpose() * f).try_inverse()?;
        let delta = (&xf_inv * &r).scale(&half);
        let k_next = 2 * k - c - v2(p);
        x = reduce_matrix(&(&x + &delta), p, k_next)?;
        k = k_next;
    }
    reduce_matrix(&x, p, target)
}

/// Divides both forms by the common power of `p` that makes them p-integral
/// with an entry of valuation 0. Different scales mean different lattices.
fn normalize_scale(
    f: &RationalMatrix,
    g: &RationalMatrix,
    p: u64,
) -> Result<(RationalMatrix, RationalMatrix)> {
    let sf = valuation_matrix(f, p).expect("regular form");
    let sg = valuation_matrix(g, p).expect("regular form");
    if sf != sg {
        return Err(Error::NotLocallyEquivalent(p));
    }
    let scale = pow_p(p, -sf);
    Ok((f.scale(&scale), g.scale(&scale)))
}

/// A matrix in `GL_n(Z_p)` with `sigma_p' F sigma_p = G`, known to
/// `precision` digits; that is, some exact solution is congruent to the
/// returned residue modulo `p^precision`.
pub fn local_equiv(
    f: &QuadraticForm,
    g: &QuadraticForm,
    p: u64,
    precision: u32,
) -> Result<PadicMatrixApprox> {
    if f.dim() != g.dim() {
        return Err(Error::Dimension("forms of different rank".into()));
    }
    if !crate::exact::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let precision = precision.max(1);
    let (fs, gs) = normalize_scale(f.gram(), g.gram(), p)?;
    let x = if p == 2 {
        local_equiv_by_search(&fs, &gs, p, precision)?
    } else {
        local_equiv_odd(&fs, &gs, p, precision)?
    };
    PadicMatrixApprox::from_rational_with_shift(&x, p, 0, precision)
}

fn local_equiv_by_search(
    f: &RationalMatrix,
    g: &RationalMatrix,
    p: u64,
    precision: u32,
) -> Result<RationalMatrix> {
    if f == g {
        return Ok(RationalMatrix::identity(f.rows()));
    }
    if !same_dyadic_class(f, g)? {
        return Err(Error::NotLocallyEquivalent(p));
    }
    let c = newton_threshold(f, p)?;
    let e = c + v2(p) + 1;
    let seed = jordan_seed(f, g, e)?.ok_or(Error::NotLocallyEquivalent(p))?;
    newton_lift(f, g, seed, p, e, c, precision)
}

/// `(2^a u mod 8)` for a nonzero rational.
fn dyadic_parts(q: &Rational) -> (i64, i64) {
    let a = valuation(q, 2).expect("nonzero");
    let u = q * pow_p(2, -a);
    let r = reduce_mod_pk(&u, 2, 3).expect("unit").to_i64().expect("small");
    (a, r)
}

/// The Hilbert symbol `(x, y)_2` as `0` (for `+1`) or `1` (for `-1`).
fn hilbert_2(x: &Rational, y: &Rational) -> i64 {
    let (a, u) = dyadic_parts(x);
    let (b, v) = dyadic_parts(y);
    let eps = |w: i64| (w - 1) / 2 % 2;
    let omega = |w: i64| (w * w - 1) / 8 % 2;
    (eps(u) * eps(v) + a * omega(v) + b * omega(u)).rem_euclid(2)
}

/// Necessary conditions for equivalence over `Z_2`: equal determinant
/// square classes and equal Hasse invariants over `Q_2`.
fn same_dyadic_class(f: &RationalMatrix, g: &RationalMatrix) -> Result<bool> {
    let ratio = g.det() / f.det();
    let (a, u) = dyadic_parts(&ratio);
    if a % 2 != 0 || u != 1 {
        return Ok(false);
    }
    let hasse = |m: &RationalMatrix| -> Result<i64> {
        let form = QuadraticForm::new(m.clone())?;
        let d = m.congruence(form.diagonalizer()).diag();
        let mut h = 0;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                h += hilbert_2(&d[i], &d[j]);
            }
        }
        Ok(h % 2)
    };
    Ok(hasse(f)? == hasse(g)?)
}

/// Exact diagonal splitting `S' F S = diag(p^{a_i} u_i)` with `u_i` p-units.
fn jordan_split(f: &RationalMatrix, p: u64) -> Result<(RationalMatrix, Vec<(i64, Rational)>)> {
    let form = QuadraticForm::new(f.clone())?;
    let s = padic_diagonalize_exact(&form, p)?;
    let parts = f
        .congruence(&s)
        .diag()
        .into_iter()
        .map(|d| {
            let a = valuation(&d, p).expect("regular form");
            let u = d * pow_p(p, -a);
            (a, u)
        })
        .collect();
    Ok((s, parts))
}

fn legendre(u: &Rational, p: u64) -> i8 {
    let a = reduce_mod_pk(u, p, 1).expect("unit");
    let r = a.modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
    if r.is_one() {
        1
    } else {
        -1
    }
}

fn local_equiv_odd(
    f: &RationalMatrix,
    g: &RationalMatrix,
    p: u64,
    precision: u32,
) -> Result<RationalMatrix> {
    let n = f.rows();
    let (sf, jf) = jordan_split(f, p)?;
    let (sg, jg) = jordan_split(g, p)?;
    let group = |parts: &[(i64, Rational)]| {
        let mut map: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, (a, _)) in parts.iter().enumerate() {
            map.entry(*a).or_default().push(i);
        }
        map
    };
    let (gf, gg) = (group(&jf), group(&jg));
    let shape = |m: &BTreeMap<i64, Vec<usize>>| m.iter().map(|(a, v)| (*a, v.len())).collect::<Vec<_>>();
    if shape(&gf) != shape(&gg) {
        return Err(Error::NotLocallyEquivalent(p));
    }
    let det_class = |parts: &[(i64, Rational)], idx: &[usize]| {
        let prod = idx.iter().fold(Rational::one(), |acc, &i| acc * &parts[i].1);
        legendre(&prod, p)
    };
    let mut y = RationalMatrix::zeros(n, n);
    for (a, fi) in &gf {
        let gi = &gg[a];
        if det_class(&jf, fi) != det_class(&jg, gi) {
            return Err(Error::NotLocallyEquivalent(p));
        }
        let uf: Vec<Rational> = fi.iter().map(|&i| jf[i].1.clone()).collect();
        let ug: Vec<Rational> = gi.iter().map(|&i| jg[i].1.clone()).collect();
        let seed = witt_isometry_mod_p(&uf, &ug, p)?;
        let block = newton_lift(
            &RationalMatrix::diagonal(&uf),
            &RationalMatrix::diagonal(&ug),
            seed,
            p,
            1,
            0,
            precision,
        )?;
        for (r, &row) in fi.iter().enumerate() {
            for (c, &col) in gi.iter().enumerate() {
                y.set(row, col, block.get(r, c).clone());
            }
        }
    }
    Ok(&(&sf * &y) * &sg.try_inverse()?)
}

/// `Y` mod `p` with `Y' diag(u) Y = diag(u')` over `F_p`, built column by
/// column: each new column has the required norm and is orthogonal to the
/// previous ones. Witt cancellation guarantees the greedy choice never
/// dead-ends when the two diagonal forms are isometric.
fn witt_isometry_mod_p(u: &[Rational], target: &[Rational], p: u64) -> Result<RationalMatrix> {
    let r = u.len();
    let pi = p as i128;
    let red = |q: &Rational| reduce_mod_pk(q, p, 1).unwrap().to_i128().unwrap();
    let uu: Vec<i128> = u.iter().map(red).collect();
    let tt: Vec<i128> = target.iter().map(red).collect();
    let bil = |x: &[i128], y: &[i128]| -> i128 {
        x.iter()
            .zip(y)
            .zip(&uu)
            .fold(0, |acc, ((a, b), w)| (acc + a * b % pi * w) % pi)
    };
    let mut cols: Vec<Vec<i128>> = Vec::with_capacity(r);
    for i in 0..r {
        let unit = (0..r).map(|l| i128::from(l == i)).collect::<Vec<_>>();
        let found = std::iter::once(unit)
            .chain(FpVectors::new(r, pi))
            .find(|x| bil(x, x) == tt[i] && cols.iter().all(|c| bil(c, x) == 0))
            .ok_or_else(|| Error::Internal("Witt construction failed".into()))?;
        cols.push(found);
    }
    let cols: Vec<Vec<Rational>> = cols
        .into_iter()
        .map(|c| c.into_iter().map(|v| Rational::from_integer(BigInt::from(v))).collect())
        .collect();
    RationalMatrix::from_columns(&cols)
}

/// All vectors of `(Z/p)^r` in counting order (first coordinate most significant).
pub(super) struct FpVectors {
    current: Option<Vec<i128>>,
    p: i128,
}

impl FpVectors {
    pub(super) fn new(r: usize, p: i128) -> Self {
        Self {
            current: Some(vec![0; r]),
            p,
        }
    }
}

impl Iterator for FpVectors {
    type Item = Vec<i128>;

    fn next(&mut self) -> Option<Vec<i128>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.p {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

/// Exhaustive search for `X` mod `p^e`, invertible mod `p`, with
/// `X'FX ≡ G` off the diagonal mod `p^e` and on the diagonal mod
/// `p^{e + v_p(2)}`. `F`, `G` must be p-integral. Returns `None` iff no such
/// `X` exists, which (for `e` past the Newton threshold) certifies that the
/// forms are not equivalent over `Z_p`.
pub fn seed_search(
    f: &RationalMatrix,
    g: &RationalMatrix,
    p: u64,
    e: u32,
) -> Result<Option<RationalMatrix>> {
    check_integral(f, p)?;
    check_integral(g, p)?;
    if e == 0 {
        return Err(Error::Precondition("seed modulus exponent must be positive".into()));
    }
    let m = e + v2(p) + 1;
    let to_mod = |x: &Rational| -> Result<i128> {
        reduce_mod_pk(x, p, m)?
            .to_i128()
            .ok_or(Error::SearchOverflow(u64::from(m)))
    };
    let modulus = (p as i128)
        .checked_pow(m)
        .filter(|&q| q.checked_mul(q).is_some())
        .ok_or(Error::SearchOverflow(u64::from(m)))?;
    let search = DigitSearch {
        p: p as i128,
        n: f.rows(),
        e,
        v2: v2(p),
        modulus,
        f: f.entries().iter().map(to_mod).collect::<Result<_>>()?,
        g: g.entries().iter().map(to_mod).collect::<Result<_>>()?,
    };
    Ok(search.run().map(|x| {
        let entries = x
            .into_iter()
            .map(|v| Rational::from_integer(BigInt::from(v)))
            .collect();
        RationalMatrix::from_entries(f.rows(), f.rows(), entries).expect("square")
    }))
}

struct DigitSearch {
    p: i128,
    n: usize,
    e: u32,
    v2: u32,
    modulus: i128,
    f: Vec<i128>,
    g: Vec<i128>,
}

impl DigitSearch {
    fn pk(&self, k: u32) -> i128 {
        self.p.pow(k)
    }

    fn f_apply(&self, x: &[i128]) -> Vec<i128> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(0, |acc, j| (acc + self.f[i * self.n + j] * x[j]) % self.modulus)
            })
            .collect()
    }

    fn form(&self, x: &[i128], y: &[i128]) -> i128 {
        let fy = self.f_apply(y);
        x.iter()
            .zip(&fy)
            .fold(0, |acc, (a, b)| (acc + a * b) % self.modulus)
    }

    fn column(x: &[i128], n: usize, i: usize) -> Vec<i128> {
        (0..n).map(|r| x[r * n + i]).collect()
    }

    /// `(G_ik - B(x_i, x_k)) / p^shift mod p`, or `None` if not divisible.
    fn scaled_defect(&self, i: usize, k: usize, xi: &[i128], xk: &[i128], shift: u32) -> Option<i128> {
        let d = (self.g[i * self.n + k] - self.form(xi, xk)).rem_euclid(self.modulus);
        let q = self.pk(shift);
        if d % q != 0 {
            return None;
        }
        Some((d / q).rem_euclid(self.p))
    }

    fn run(&self) -> Option<Vec<i128>> {
        let mut cols = Vec::with_capacity(self.n);
        self.first_digit(&mut cols)
    }

    /// Level 1: columns mod `p`, with the diagonal checked mod `p^{1+v_p(2)}`.
    fn first_digit(&self, cols: &mut Vec<Vec<i128>>) -> Option<Vec<i128>> {
        let n = self.n;
        let i = cols.len();
        if i == n {
            let mut x = vec![0; n * n];
            for (c, col) in cols.iter().enumerate() {
                for r in 0..n {
                    x[r * n + c] = col[r];
                }
            }
            return self.lift(x, 1);
        }
        let unit: Vec<i128> = (0..n).map(|l| i128::from(l == i)).collect();
        let candidates = std::iter::once(unit.clone())
            .chain(FpVectors::new(n, self.p).filter(move |v| *v != unit));
        for x in candidates {
            if self.scaled_defect(i, i, &x, &x, 1 + self.v2).is_none() {
                continue;
            }
            if cols
                .iter()
                .enumerate()
                .any(|(j, c)| self.scaled_defect(j, i, c, &x, 1).is_none())
            {
                continue;
            }
            cols.push(x);
            if rank_mod_p(cols, self.p) == cols.len() {
                if let Some(found) = self.first_digit(cols) {
                    return Some(found);
                }
            }
            cols.pop();
        }
        None
    }

    /// From level `j` (known mod `p^j`) to level `j + 1`.
    fn lift(&self, x: Vec<i128>, j: u32) -> Option<Vec<i128>> {
        if j >= self.e {
            return Some(x);
        }
        let n = self.n;
        let p = self.p;
        let cols: Vec<Vec<i128>> = (0..n).map(|i| Self::column(&x, n, i)).collect();
        let fcols: Vec<Vec<i128>> = cols.iter().map(|c| self.f_apply(c)).collect();
        let vars = n * n;
        let mut rows: Vec<Vec<i128>> = Vec::new();
        for i in 0..n {
            for k in i..n {
                let mut coef = vec![0i128; vars + 1];
                if i == k {
                    let rhs = self.scaled_defect(i, i, &cols[i], &cols[i], j + self.v2)?;
                    for l in 0..n {
                        let mut a = fcols[i][l];
                        if self.v2 == 0 {
                            a *= 2;
                        } else if j == 1 {
                            a += self.f[l * n + l];
                        }
                        coef[l * n + i] = a.rem_euclid(p);
                    }
                    coef[vars] = rhs;
                } else {
                    let rhs = self.scaled_defect(i, k, &cols[i], &cols[k], j)?;
                    for l in 0..n {
                        coef[l * n + i] = (coef[l * n + i] + fcols[k][l]).rem_euclid(p);
                        coef[l * n + k] = (coef[l * n + k] + fcols[i][l]).rem_euclid(p);
                    }
                    coef[vars] = rhs;
                }
                rows.push(coef);
            }
        }
        let (particular, kernel) = solve_mod_p(rows, vars, p)?;
        let pj = self.pk(j);
        for combo in FpVectors::new(kernel.len(), p) {
            let mut b = particular.clone();
            for (t, basis) in combo.iter().zip(&kernel) {
                for (bv, kv) in b.iter_mut().zip(basis) {
                    *bv = (*bv + t * kv).rem_euclid(p);
                }
            }
            let next: Vec<i128> = x.iter().zip(&b).map(|(a, d)| a + pj * d).collect();
            if let Some(found) = self.lift(next, j + 1) {
                return Some(found);
            }
        }
        None
    }
}

fn mod_inv(a: i128, p: i128) -> i128 {
    let (mut t, mut new_t, mut r, mut new_r) = (0i128, 1i128, p, a.rem_euclid(p));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(p)
}

pub(super) fn rank_mod_p(cols: &[Vec<i128>], p: i128) -> usize {
    let mut m: Vec<Vec<i128>> = cols.to_vec();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..width {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c].rem_euclid(p) != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inv(m[rank][c], p);
        for r in 0..m.len() {
            if r != rank {
                let f = (m[r][c] * inv).rem_euclid(p);
                for k in 0..width {
                    m[r][k] = (m[r][k] - f * m[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves an augmented system over `F_p`; returns a particular solution
/// (free variables zero) and a kernel basis, or `None` if inconsistent.
pub(super) fn solve_mod_p(mut rows: Vec<Vec<i128>>, vars: usize, p: i128) -> Option<(Vec<i128>, Vec<Vec<i128>>)> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..vars {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = mod_inv(rows[rank][c], p);
        for v in rows[rank].iter_mut() {
            *v = (*v * inv).rem_euclid(p);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in 0..=vars {
                    rows[r][k] = (rows[r][k] - f * rows[rank][k]).rem_euclid(p);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r[vars] != 0) {
        return None;
    }
    let mut particular = vec![0i128; vars];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = rows[r][vars];
    }
    let free: Vec<usize> = (0..vars).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0i128; vars];
            v[fc] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = (-rows[r][fc]).rem_euclid(p);
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn qf(rows: &[&[i64]]) -> QuadraticForm {
        QuadraticForm::from_i64(rows).unwrap()
    }

    fn assert_solution(f: &QuadraticForm, g: &QuadraticForm, x: &PadicMatrixApprox) {
        let p = x.p();
        assert!(x.is_unit_matrix());
        let r = residual(f.gram(), g.gram(), &x.lift());
        let v = valuation_matrix(&r, p).unwrap_or(i64::MAX);
        let floor = valuation_matrix(f.gram(), p).unwrap();
        assert!(v - floor >= x.precision() as i64, "residual valuation {v}");
    }

    #[test]
    fn identity_for_equal_forms() {
        let f = qf(&[&[2, 1, 0], &[1, 4, 3], &[0, 3, -6]]);
        for p in [2, 3, 5, 7] {
            let x = local_equiv(&f, &f, p, 10).unwrap();
            assert_eq!(x.lift(), RationalMatrix::identity(3), "p = {p}");
        }
    }

    #[test]
    fn integrally_equivalent_pair() {
        let f = qf(&[&[1, 0], &[0, 1]]);
        let g = qf(&[&[2, 1], &[1, 1]]);
        for p in [2, 3, 5] {
            let x = local_equiv(&f, &g, p, 12).unwrap();
            assert_solution(&f, &g, &x);
        }
    }

    #[test]
    fn local_obstruction_at_three() {
        let f = qf(&[&[1, 0], &[0, 1]]);
        let g = qf(&[&[1, 0], &[0, 3]]);
        assert_eq!(local_equiv(&f, &g, 3, 5), Err(Error::NotLocallyEquivalent(3)));
        // Brute force over all 2x2 matrices mod 27.
        let found = (0..27i64.pow(4)).any(|code| {
            let d = [code % 27, code / 27 % 27, code / 729 % 27, code / 19683];
            let det = (d[0] * d[3] - d[1] * d[2]).rem_euclid(27);
            let a = (d[0] * d[0] + d[2] * d[2]) % 27;
            let b = (d[0] * d[1] + d[2] * d[3]) % 27;
            let c = (d[1] * d[1] + d[3] * d[3]) % 27;
            det % 3 != 0 && a == 1 && b == 0 && c == 3
        });
        assert!(!found);
    }

    #[test]
    fn dyadic_obstruction() {
        // x^2 + y^2 and x^2 + 5y^2 differ over Z_2 (1 + 1 vs 1 + 5 mod 8 norms).
        let f = qf(&[&[1, 0], &[0, 1]]);
        let g = qf(&[&[1, 0], &[0, 5]]);
        assert_eq!(local_equiv(&f, &g, 2, 4), Err(Error::NotLocallyEquivalent(2)));
        // Scales differ.
        let h = qf(&[&[2, 0], &[0, 2]]);
        assert_eq!(local_equiv(&f, &h, 2, 4), Err(Error::NotLocallyEquivalent(2)));
    }

    #[test]
    fn precision_is_stable_under_doubling() {
        let f = qf(&[&[3, 1, 0], &[1, -2, 4], &[0, 4, 6]]);
        let gamma = RationalMatrix::from_i64(&[&[1, 2, 0], &[0, 1, 1], &[3, 0, 1]]);
        let g = QuadraticForm::new(f.gram().congruence(&gamma)).unwrap();
        for p in [2, 3, 5] {
            let lo = local_equiv(&f, &g, p, 6).unwrap();
            let hi = local_equiv(&f, &g, p, 12).unwrap();
            assert_eq!(hi.truncate(6), lo, "p = {p}");
            assert_solution(&f, &g, &hi);
        }
    }

    #[test]
    fn hensel_step_examples() {
        let id = qf(&[&[1, 0], &[0, 1]]);
        let x = PadicMatrixApprox::from_rational(&RationalMatrix::from_i64(&[&[4, 0], &[0, 1]]), 3, 4)
            .unwrap();
        let y = hensel_step(&id, &id, &x).unwrap();
        let r = residual(id.gram(), id.gram(), &y.lift());
        assert!(valuation_matrix(&r, 3).unwrap_or(i64::MAX) >= 2);

        let x = PadicMatrixApprox::from_rational(&RationalMatrix::from_i64(&[&[5, 0], &[0, 1]]), 2, 6)
            .unwrap();
        let y = hensel_step(&id, &id, &x).unwrap();
        // k = 3, c = 1: one digit lost to the halving, 2k - c - 1 = 4.
        assert_eq!(y.precision(), 4);
        let r = residual(id.gram(), id.gram(), &y.lift());
        assert!(valuation_matrix(&r, 2).unwrap_or(i64::MAX) >= 4);

        let exact = PadicMatrixApprox::from_rational(&RationalMatrix::identity(2), 5, 3).unwrap();
        assert_eq!(hensel_step(&id, &id, &exact).unwrap(), exact);

        let far = PadicMatrixApprox::from_rational(&RationalMatrix::identity(2), 2, 3).unwrap();
        let g = qf(&[&[1, 0], &[0, 3]]);
        assert!(matches!(hensel_step(&id, &g, &far), Err(Error::Precondition(_))));
    }

    #[test]
    fn seed_search_agrees_with_jordan_route() {
        let f = qf(&[&[1, 0], &[0, 1]]);
        for (g, expected) in [
            (qf(&[&[2, 1], &[1, 1]]), true),
            (qf(&[&[1, 0], &[0, 3]]), false),
            (qf(&[&[3, 0], &[0, 3]]), false),
            (qf(&[&[2, 0], &[0, 2]]), true),
        ] {
            let odd = local_equiv(&f, &g, 3, 3).is_ok();
            let seed = seed_search(f.gram(), g.gram(), 3, 1).unwrap().is_some();
            assert_eq!(odd, expected);
            assert_eq!(seed, expected);
        }
    }

    #[test]
    fn dyadic_hilbert_symbols() {
        use crate::exact::int;
        let cases = [((-1, -1), 1), ((2, 3), 1), ((2, 5), 1), ((3, 5), 0), ((2, 7), 0), ((3, 3), 1), ((5, 5), 0)];
        for ((a, b), h) in cases {
            assert_eq!(hilbert_2(&int(a), &int(b)), h, "({a}, {b})_2");
        }
    }

    #[test]
    fn non_integral_forms_are_rescaled() {
        let f = QuadraticForm::diagonal(&[crate::exact::rat(1, 2), crate::exact::rat(1, 2)]).unwrap();
        let g = QuadraticForm::new(f.gram().congruence(&RationalMatrix::from_i64(&[&[1, 1], &[0, 1]])))
            .unwrap();
        let x = local_equiv(&f, &g, 2, 8).unwrap();
        let r = residual(f.gram(), g.gram(), &x.lift());
        assert!(valuation_matrix(&r, 2).unwrap_or(i64::MAX) >= 7);
        assert_eq!(newton_threshold(&RationalMatrix::diagonal(&[int(1), int(4)]), 2).unwrap(), 3);
    }
}
