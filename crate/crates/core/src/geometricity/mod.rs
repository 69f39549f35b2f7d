//! Admissibility, subgeometricity and geometricity of configuration graphs.
//!
//! In the large-`n` regime every forbidden vector lies in `k^⊥`, so all
//! decisions reduce to the discriminant form of `F^d_{2n}(Γ)`: a kernel
//! `K ⊂ discr F` is geometric if it avoids the exceptional classes and the
//! classes of fractional multiples of `k`, and `K^⊥/K` passes Nikulin's test;
//! `Γ` is geometric if moreover `K` avoids every non-zero class of a
//! degree-`d` root.

mod balance;
mod exceptional;
mod nikulin;
mod search;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fqf::{FormError, IsotropicSubgroup};
use crate::graph::{fano_lattice, ConfigGraph, FanoError, PolarizedFano};

pub use balance::{padic_val, q_balanced, BalanceReport, ZeroValuation};
pub use exceptional::{DualRoot, LowDegreeRoot, RootClasses};
pub use nikulin::{nikulin_at_prime, nikulin_embeds, Clause, NikulinReading, NikulinReport, PrimeCheck};
pub use search::{Candidate, Engine, KernelSearch, PrimeOutcome};

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Fano(#[from] FanoError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("n = {n} is not above the large-n threshold {threshold}")]
    BelowThreshold { n: i64, threshold: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Status {
    NotAdmissible,
    AdmissibleNotSubgeometric,
    Subgeometric,
    Geometric,
}

impl Status {
    pub fn is_subgeometric(self) -> bool {
        self >= Status::Subgeometric
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::NotAdmissible => "not admissible",
            Status::AdmissibleNotSubgeometric => "admissible, not subgeometric",
            Status::Subgeometric => "subgeometric",
            Status::Geometric => "geometric",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecideOptions {
    pub reading: NikulinReading,
    /// Reject `n` at or below [`threshold`].
    pub enforce_threshold: bool,
    /// Node budget of each subgroup search.
    pub node_cap: u64,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { reading: NikulinReading::AsStated, enforce_threshold: true, node_cap: 4_000_000 }
    }
}

/// `max(50d², (df)² + df)`.
pub fn threshold(d: i64, f: i64) -> i64 {
    (50 * d * d).max((d * f) * (d * f) + d * f)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub graph: String,
    pub n: i64,
    pub d: i64,
    pub status: Status,
    pub per_prime: Vec<PrimeOutcome>,
    /// Generators of the witness kernel, in discriminant coordinates.
    pub witness_kernel: Option<Vec<Vec<i64>>>,
    /// The same generators as dual vectors in the basis `h, k, ∂Γ`.
    #[serde(with = "rational_matrix_serde")]
    pub witness_vectors: Vec<Vec<BigRational>>,
    /// Roots of degree below `d` in the witness extension (empty when geometric).
    pub low_degree_roots: Vec<LowDegreeRoot>,
    /// Degree-`d` roots of the witness extension outside Γ.
    pub extra_degree_d_roots: usize,
    /// Set when the `ℓ = r − 1` case of the 2-adic clause influenced the search.
    pub nikulin_gap_warning: bool,
}

/// Full verdict for `Γ` in degree `2n` with respect to `d`.
pub fn decide(graph: &ConfigGraph, n: i64, d: i64, opts: DecideOptions) -> Result<Verdict, DecideError> {
    let fano = fano_lattice(graph, n, d)?;
    if opts.enforce_threshold {
        let t = threshold(d, fano.f);
        if n <= t {
            return Err(DecideError::BelowThreshold { n, threshold: t });
        }
    }
    Engine::new(fano, opts)?.decide()
}

/// Exceptional classes of `discr F`, as element codes of [`RootClasses::form`].
pub fn exceptional_classes(fano: &PolarizedFano) -> Result<(RootClasses, HashSet<u64>), FormError> {
    let rc = RootClasses::new(fano)?;
    let e = rc.exceptional_codes();
    Ok((rc, e))
}

/// Roots of `k^⊥` in the extension of `F` by `kernel`, with degree at most
/// `max_degree`.
pub fn low_degree_roots(
    fano: &PolarizedFano,
    classes: &RootClasses,
    kernel: &IsotropicSubgroup,
    max_degree: i64,
) -> Vec<LowDegreeRoot> {
    let codes: HashSet<u64> = kernel.element_codes().iter().copied().collect();
    classes.roots_in(fano, &codes, max_degree)
}

fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => Some(BigRational::new(a.trim().parse::<BigInt>().ok()?, b.trim().parse::<BigInt>().ok()?)),
        None => Some(BigRational::from_integer(s.trim().parse::<BigInt>().ok()?)),
    }
}

pub(crate) mod rational_serde {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::rational_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).ok_or_else(|| D::Error::custom("bad rational"))
    }
}

pub(crate) mod rational_vec_serde {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(super::rational_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| super::parse_rational(s).ok_or_else(|| D::Error::custom("bad rational"))).collect()
    }
}

pub(crate) mod rational_matrix_serde {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(|r| r.iter().map(super::rational_string).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| r.iter().map(|s| super::parse_rational(s).ok_or_else(|| D::Error::custom("bad rational"))).collect())
            .collect()
    }
}
