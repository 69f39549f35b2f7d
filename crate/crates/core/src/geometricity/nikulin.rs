//! Nikulin's criterion for a primitive embedding into the K3 lattice.

use serde::{Deserialize, Serialize};

use crate::fqf::{legendre, DetClass, FiniteQuadraticForm, FormError, Parity};

/// How to read the `p = 2` clause when `ℓ(F_2) = r − 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NikulinReading {
    /// `ℓ ≤ r − 2`, or `ℓ = r` with the parity/determinant conditions.
    #[default]
    AsStated,
    /// As above, but `ℓ = r − 1` also passes at `p = 2`.
    Corrected,
}

/// Which branch decided the condition at one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    ShortLength,
    FullLengthUnit,
    FullLengthOdd,
    FullLengthEvenUnit,
    /// `p = 2`, `ℓ = r − 1`: only accepted under [`NikulinReading::Corrected`].
    GapLength,
    TooLong,
    FullLengthWrongUnit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub p: u64,
    pub length: usize,
    pub passed: bool,
    pub clause: Clause,
    /// Set when the `ℓ = r − 1` case at `p = 2` was hit.
    pub warning: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NikulinReport {
    /// `r = 22 − rank`.
    pub corank: i64,
    pub passed: bool,
    pub primes: Vec<PrimeCheck>,
}

impl NikulinReport {
    pub fn warnings(&self) -> impl Iterator<Item = &PrimeCheck> {
        self.primes.iter().filter(|c| c.warning)
    }
}

/// Condition at one prime for the `p`-part `fp`, where `other` is the order of
/// the prime-to-`p` part of the whole form (only its square class matters).
pub fn nikulin_at_prime(
    p: u64,
    fp: &FiniteQuadraticForm,
    other: u64,
    corank: i64,
    reading: NikulinReading,
) -> Result<PrimeCheck, FormError> {
    let length = fp.length_at(p);
    let l = length as i64;
    let done = |passed, clause, warning| Ok(PrimeCheck { p, length, passed, clause, warning });
    if p != 2 {
        if l <= corank - 1 {
            return done(true, Clause::ShortLength, false);
        }
        if l > corank {
            return done(false, Clause::TooLong, false);
        }
        let DetClass::Legendre(u) = fp.det_mod_squares(p)? else { unreachable!() };
        let o = legendre((other % p) as i64, p);
        return if u * o == 1 {
            done(true, Clause::FullLengthUnit, false)
        } else {
            done(false, Clause::FullLengthWrongUnit, false)
        };
    }
    if l <= corank - 2 {
        return done(true, Clause::ShortLength, false);
    }
    if l == corank - 1 {
        return done(reading == NikulinReading::Corrected, Clause::GapLength, true);
    }
    if l > corank {
        return done(false, Clause::TooLong, false);
    }
    if fp.parity2()? == Parity::Odd {
        return done(true, Clause::FullLengthOdd, false);
    }
    let DetClass::Mod8(u) = fp.det_mod_squares(2)? else { unreachable!() };
    let v = (u as u64 * (other % 8)) % 8;
    if v == 1 || v == 7 {
        done(true, Clause::FullLengthEvenUnit, false)
    } else {
        done(false, Clause::FullLengthWrongUnit, false)
    }
}

/// Whether a hyperbolic lattice of the given rank with discriminant form
/// `form` embeds primitively into `2E8 ⊕ 3U`.
pub fn nikulin_embeds(rank: usize, form: &FiniteQuadraticForm, reading: NikulinReading) -> Result<NikulinReport, FormError> {
    let corank = 22 - rank as i64;
    let mut primes = Vec::new();
    let order = form.order();
    for p in form.primes() {
        let (fp, _) = form.p_part(p);
        let other = order / fp.order();
        primes.push(nikulin_at_prime(p, &fp, other, corank, reading)?);
    }
    let passed = corank >= 2 && primes.iter().all(|c| c.passed);
    Ok(NikulinReport { corank, passed, primes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v2() -> FiniteQuadraticForm {
        FiniteQuadraticForm::v_block(1)
    }

    #[test]
    fn a1_embeds() {
        let a1 = FiniteQuadraticForm::cyclic(2, -1, 2).unwrap();
        let rep = nikulin_embeds(1, &a1, NikulinReading::AsStated).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.corank, 21);
    }

    #[test]
    fn twelve_a1_quotients() {
        let mut bad = v2();
        for _ in 0..2 {
            bad = bad.direct_sum(&v2());
        }
        let good = bad.direct_sum(&FiniteQuadraticForm::v_block(2));
        let bad = bad.direct_sum(&FiniteQuadraticForm::u_block(2));
        for d2 in [1u64, 9, 25, 49] {
            let r = nikulin_at_prime(2, &bad, d2, 8, NikulinReading::AsStated).unwrap();
            assert!(!r.passed);
            assert_eq!(r.clause, Clause::FullLengthWrongUnit);
            let r = nikulin_at_prime(2, &good, d2, 8, NikulinReading::AsStated).unwrap();
            assert!(r.passed);
        }
    }

    #[test]
    fn gap_length_is_flagged() {
        let f = v2().direct_sum(&v2()).direct_sum(&FiniteQuadraticForm::cyclic(2, 1, 2).unwrap());
        let r = nikulin_at_prime(2, &f, 1, 6, NikulinReading::AsStated).unwrap();
        assert!(!r.passed && r.warning);
        let r = nikulin_at_prime(2, &f, 1, 6, NikulinReading::Corrected).unwrap();
        assert!(r.passed && r.warning);
    }

    #[test]
    fn odd_prime_full_length() {
        // <2/3> ⊕ <2/3>: unit (2/3)^2 = 1
        let a = FiniteQuadraticForm::cyclic(3, 2, 3).unwrap();
        let f = a.direct_sum(&a);
        assert!(nikulin_at_prime(3, &f, 1, 2, NikulinReading::AsStated).unwrap().passed);
        assert!(!nikulin_at_prime(3, &f, 2, 2, NikulinReading::AsStated).unwrap().passed);
        assert!(!nikulin_at_prime(3, &f, 1, 1, NikulinReading::AsStated).unwrap().passed);
        assert!(nikulin_at_prime(3, &f, 2, 3, NikulinReading::AsStated).unwrap().passed);
    }
}
