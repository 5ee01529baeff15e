use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A finite set of primes, stored strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    /// Sorts and deduplicates; every element must be prime.
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        if let Some(&bad) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(bad));
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(Self { primes })
    }

    pub fn non_empty(primes: Vec<u64>) -> Result<Self> {
        let set = Self::new(primes)?;
        if set.is_empty() {
            return Err(Error::EmptyPrimeSet);
        }
        Ok(set)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut all = self.primes.clone();
        all.extend_from_slice(&other.primes);
        all.sort_unstable();
        all.dedup();
        PrimeSet { primes: all }
    }
}
