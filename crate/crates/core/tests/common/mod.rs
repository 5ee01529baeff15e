#![allow(dead_code)]

use genus_equiv::exact::{int, PrimeSet, RationalMatrix};
use genus_equiv::quadform::QuadraticForm;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_symmetric(rng: &mut impl Rng, n: usize, bound: i64) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = int(rng.gen_range(-bound..=bound));
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    m
}

pub fn random_form(rng: &mut impl Rng, n: usize, bound: i64) -> QuadraticForm {
    loop {
        if let Ok(f) = QuadraticForm::new(random_symmetric(rng, n, bound)) {
            return f;
        }
    }
}

/// A product of random elementary integer matrices (determinant +-1).
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> RationalMatrix {
    let mut m = RationalMatrix::identity(n);
    if n == 1 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = int(rng.gen_range(-2..=2));
        let mut e = RationalMatrix::identity(n);
        e.set(i, j, c);
        m = &m * &e;
        if rng.gen_bool(0.2) {
            let mut s = RationalMatrix::identity(n);
            s.set(i, i, int(-1));
            m = &m * &s;
        }
    }
    m
}

/// A test instance: `G = gamma' F gamma` where `gamma` is invertible at
/// every prime of `primes`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub f: QuadraticForm,
    pub g: QuadraticForm,
    pub gamma: RationalMatrix,
    pub primes: PrimeSet,
}

pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let n = rng.gen_range(2..=3);
    let f = random_form(rng, n, 9);
    let mut pool = [2u64, 3, 5, 7];
    pool.shuffle(rng);
    let size = rng.gen_range(1..=3);
    let primes = PrimeSet::new(pool[..size].to_vec()).unwrap();
    let q = [11i64, 13][rng.gen_range(0..2)];
    let k = rng.gen_range(0..=1u32);
    let mut middle = RationalMatrix::identity(n);
    middle.set(0, 0, int(q.pow(k)));
    let gamma = &(&random_unimodular(rng, n, 3) * &middle) * &random_unimodular(rng, n, 3);
    let g = QuadraticForm::new(f.gram().congruence(&gamma)).unwrap();
    Instance { f, g, gamma, primes }
}
