use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::{signature, QuadraticForm};
use crate::error::{Error, Result};
use crate::exact::{BigInt, PrimeSet};
use crate::padiclin::local_equiv;

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "R"),
            Place::Prime(p) => write!(f, "Z_{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceStatus {
    pub place: Place,
    pub equivalent: bool,
}

/// Outcome of a genus comparison, one entry per place checked (the real
/// place first, then primes in increasing order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusReport {
    pub places: Vec<PlaceStatus>,
}

impl GenusReport {
    pub fn same_genus(&self) -> bool {
        self.places.iter().all(|s| s.equivalent)
    }

    pub fn first_failure(&self) -> Option<Place> {
        self.places.iter().find(|s| !s.equivalent).map(|s| s.place)
    }
}

fn small_prime_factors(n: &BigInt, into: &mut BTreeSet<u64>) -> Result<()> {
    let mut n = n.abs();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let bd = BigInt::from(d);
        if n.is_multiple_of(&bd) {
            into.insert(d);
            while n.is_multiple_of(&bd) {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::from(1) {
        let p = n
            .to_u64()
            .ok_or_else(|| Error::Precondition("prime factor does not fit in 64 bits".into()))?;
        into.insert(p);
    }
    Ok(())
}

/// The primes at which two forms can differ locally: 2 and the primes in
/// the numerators and denominators of both determinants and of all entries.
pub fn relevant_primes(f: &QuadraticForm, g: &QuadraticForm) -> Result<BTreeSet<u64>> {
    let mut primes = BTreeSet::from([2]);
    for form in [f, g] {
        let det = form.det();
        small_prime_factors(det.numer(), &mut primes)?;
        small_prime_factors(det.denom(), &mut primes)?;
        for x in form.gram().entries() {
            small_prime_factors(x.denom(), &mut primes)?;
        }
    }
    Ok(primes)
}

/// Compares signatures and local equivalence at every relevant prime and at
/// every prime of `extra`.
pub fn same_genus(f: &QuadraticForm, g: &QuadraticForm, extra: &PrimeSet) -> Result<GenusReport> {
    if f.dim() != g.dim() {
        return Err(Error::Dimension("forms of different rank".into()));
    }
    let mut places = vec![PlaceStatus {
        place: Place::Real,
        equivalent: signature(f) == signature(g),
    }];
    let mut primes = relevant_primes(f, g)?;
    primes.extend(extra.iter());
    for p in primes {
        let equivalent = match local_equiv(f, g, p, 1) {
            Ok(_) => true,
            Err(Error::NotLocallyEquivalent(_)) => false,
            Err(e) => return Err(e),
        };
        places.push(PlaceStatus {
            place: Place::Prime(p),
            equivalent,
        });
    }
    Ok(GenusReport { places })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qf(rows: &[&[i64]]) -> QuadraticForm {
        QuadraticForm::from_i64(rows).unwrap()
    }

    #[test]
    fn genus_examples() {
        let none = PrimeSet::new(vec![]).unwrap();
        let id = qf(&[&[1, 0], &[0, 1]]);
        assert!(same_genus(&id, &qf(&[&[2, 1], &[1, 1]]), &none).unwrap().same_genus());

        let report = same_genus(&id, &qf(&[&[1, 0], &[0, 3]]), &none).unwrap();
        assert!(!report.same_genus());
        assert!(report.places[0].equivalent);
        let at_three = report.places.iter().find(|s| s.place == Place::Prime(3)).unwrap();
        assert!(!at_three.equivalent);

        let report = same_genus(&id, &qf(&[&[-1, 0], &[0, -1]]), &none).unwrap();
        assert_eq!(report.first_failure(), Some(Place::Real));
    }

    #[test]
    fn relevant_primes_cover_denominators() {
        let f = QuadraticForm::diagonal(&[crate::exact::rat(1, 5), crate::exact::int(7)]).unwrap();
        let primes = relevant_primes(&f, &f).unwrap();
        assert_eq!(primes.into_iter().collect::<Vec<_>>(), vec![2, 5, 7]);
    }
}
