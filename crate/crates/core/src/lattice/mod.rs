//! Even integral lattices given by labelled Gram matrices.
//!
//! Everything here is exact: Gram entries are `BigInt`, eliminations run over
//! `BigRational`, and the Smith form is computed with unimodular transforms.

pub mod enumerate;
pub mod matrix;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{enumerate_vectors, short_vectors, LinearConstraint, DEFAULT_POINT_CAP};
pub use matrix::{smith, Matrix, Smith};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid root system {kind}{rank}")]
    InvalidRootSystem { kind: char, rank: usize },
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("diagonal entry {0} is odd; only even lattices are supported")]
    OddDiagonal(usize),
    #[error("label count {labels} does not match dimension {dim}")]
    LabelMismatch { labels: usize, dim: usize },
    #[error("lattice is not definite; bounded enumeration refused")]
    NotDefinite,
    #[error("requested norm {0} must be negative for a negative definite lattice")]
    BadNorm(i64),
    #[error("enumeration cap of {0} lattice points exceeded")]
    CapExceeded(u64),
    #[error("lattice is degenerate")]
    Degenerate,
}

/// An even lattice: a labelled basis together with its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    labels: Vec<String>,
    #[serde(with = "bigint_matrix")]
    gram: Matrix<BigInt>,
}

/// Inertia indices `(σ+, σ−, σ0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(positive: usize, negative: usize, zero: usize) -> Self {
        Signature { positive, negative, zero }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.positive, self.negative, self.zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootKind {
    A,
    D,
    E,
}

impl GramLattice {
    pub fn new(labels: Vec<String>, gram: Matrix<BigInt>) -> Result<Self, LatticeError> {
        let dim = gram.len();
        if labels.len() != dim {
            return Err(LatticeError::LabelMismatch { labels: labels.len(), dim });
        }
        for i in 0..dim {
            if gram[i].len() != dim {
                return Err(LatticeError::LabelMismatch { labels: labels.len(), dim });
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric(i, j));
                }
            }
            if !(&gram[i][i] % 2i32).is_zero() {
                return Err(LatticeError::OddDiagonal(i));
            }
        }
        Ok(GramLattice { labels, gram })
    }

    /// Builds a lattice from small integer entries with labels `e1, e2, ...`.
    pub fn from_i64(gram: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let labels = (1..=gram.len()).map(|i| format!("e{i}")).collect();
        let g = gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::new(labels, g)
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &Matrix<BigInt> {
        &self.gram
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.gram[i][j]
    }

    /// Entries as `i64`; panics if an entry does not fit.
    pub fn gram_i64(&self) -> Vec<Vec<i64>> {
        self.gram
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("gram entry exceeds i64")).collect())
            .collect()
    }

    /// Signed determinant of the Gram matrix.
    pub fn det(&self) -> BigInt {
        matrix::det(&self.gram)
    }

    /// Bilinear pairing of two rational coordinate vectors.
    pub fn pair(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || self.gram[i][j].is_zero() {
                    continue;
                }
                acc += xi * yj * BigRational::from_integer(self.gram[i][j].clone());
            }
        }
        acc
    }

    pub fn pair_int(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * yj * &self.gram[i][j];
            }
        }
        acc
    }

    /// Orthogonal direct sum; labels of `b` get a `'` suffix on collision.
    pub fn direct_sum(&self, b: &GramLattice) -> GramLattice {
        let (n, m) = (self.rank(), b.rank());
        let mut gram = vec![vec![BigInt::zero(); n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = self.gram[i][j].clone();
            }
        }
        for i in 0..m {
            for j in 0..m {
                gram[n + i][n + j] = b.gram[i][j].clone();
            }
        }
        let mut labels = self.labels.clone();
        for l in &b.labels {
            let mut l = l.clone();
            while labels.contains(&l) {
                l.push('\'');
            }
            labels.push(l);
        }
        GramLattice { labels, gram }
    }

    /// The scaled lattice `L(m)`.
    pub fn scale(&self, m: i64) -> GramLattice {
        let f = BigInt::from(m);
        let gram = self.gram.iter().map(|r| r.iter().map(|x| x * &f).collect()).collect();
        GramLattice { labels: self.labels.clone(), gram }
    }

    /// Inertia indices computed by symmetric rational elimination.
    pub fn signature(&self) -> Signature {
        let n = self.rank();
        let mut a: Matrix<BigRational> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        let (mut pos, mut neg) = (0, 0);
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            let piv = active.iter().copied().find(|&i| !a[i][i].is_zero());
            let piv = match piv {
                Some(p) => p,
                None => {
                    // zero diagonal: a hyperbolic pair contributes one sign of each kind
                    let pair = active.iter().copied().find_map(|i| {
                        active.iter().copied().find(|&j| j != i && !a[i][j].is_zero()).map(|j| (i, j))
                    });
                    let Some((i, j)) = pair else { break };
                    // e_i <- e_i + e_j, congruence keeps inertia
                    for k in 0..n {
                        let v = &a[i][k] + &a[j][k];
                        a[i][k] = v;
                    }
                    for k in 0..n {
                        let v = &a[k][i] + &a[k][j];
                        a[k][i] = v;
                    }
                    i
                }
            };
            let p = a[piv][piv].clone();
            if p.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            active.retain(|&i| i != piv);
            for &i in &active {
                if a[i][piv].is_zero() {
                    continue;
                }
                let f = &a[i][piv] / &p;
                for &j in &active {
                    let v = &a[i][j] - &f * &a[piv][j];
                    a[i][j] = v;
                }
            }
            for &i in &active {
                a[i][piv] = BigRational::zero();
                a[piv][i] = BigRational::zero();
            }
        }
        Signature::new(pos, neg, n - pos - neg)
    }

    /// Integral basis of the radical `{x : x·y = 0 ∀y}`, rows in Hermite form.
    pub fn radical(&self) -> Matrix<BigInt> {
        let k = matrix::integer_kernel(&self.gram, self.rank());
        matrix::hermite_rows(&k, self.rank())
    }

    /// The induced non-degenerate lattice on a saturated complement of the
    /// radical, together with the basis vectors (as rows) that span it.
    pub fn quotient_by_radical(&self) -> (GramLattice, Matrix<BigInt>) {
        let n = self.rank();
        let s = matrix::smith(&self.gram, n);
        let rank = s.invariants().iter().filter(|d| !d.is_zero()).count();
        let basis: Matrix<BigInt> = (0..rank)
            .map(|j| s.right.iter().map(|row| row[j].clone()).collect())
            .collect();
        let gram = basis
            .iter()
            .map(|x| basis.iter().map(|y| self.pair_int(x, y)).collect())
            .collect();
        let labels = (1..=rank).map(|i| format!("f{i}")).collect();
        (GramLattice { labels, gram }, basis)
    }

    pub fn is_negative_definite(&self) -> bool {
        let s = self.signature();
        s.negative == self.rank()
    }
}

impl fmt::Display for GramLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, row) in self.labels.iter().zip(&self.gram) {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "{l:>6} [{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Negative definite root lattice `A_n`, `D_n` or `E_n`.
pub fn root_lattice(kind: RootKind, rank: usize) -> Result<GramLattice, LatticeError> {
    let symbol = match kind {
        RootKind::A => 'A',
        RootKind::D => 'D',
        RootKind::E => 'E',
    };
    let edges: Vec<(usize, usize)> = match kind {
        RootKind::A if rank >= 1 => (1..rank).map(|i| (i - 1, i)).collect(),
        RootKind::D if rank >= 4 => {
            let mut e: Vec<_> = (1..rank - 1).map(|i| (i - 1, i)).collect();
            e.push((rank - 3, rank - 1));
            e
        }
        RootKind::E if (6..=8).contains(&rank) => {
            // chain 0-1-...-(rank-2) with the extra node attached to node 2
            let mut e: Vec<_> = (1..rank - 1).map(|i| (i - 1, i)).collect();
            e.push((2, rank - 1));
            e
        }
        _ => return Err(LatticeError::InvalidRootSystem { kind: symbol, rank }),
    };
    let mut gram = vec![vec![BigInt::zero(); rank]; rank];
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] = BigInt::from(-2);
    }
    for (i, j) in edges {
        gram[i][j] = BigInt::one();
        gram[j][i] = BigInt::one();
    }
    let labels = (1..=rank).map(|i| format!("{}{}_{i}", symbol.to_ascii_lowercase(), rank)).collect();
    GramLattice::new(labels, gram)
}

/// The hyperbolic plane `U`.
pub fn hyperbolic_u() -> GramLattice {
    GramLattice::new(
        vec!["u1".into(), "u2".into()],
        vec![vec![BigInt::zero(), BigInt::one()], vec![BigInt::one(), BigInt::zero()]],
    )
    .expect("U is even")
}

/// `2E8 ⊕ 3U`, the K3 lattice.
pub fn k3_lattice() -> GramLattice {
    let e8 = root_lattice(RootKind::E, 8).expect("E8");
    let u = hyperbolic_u();
    e8.direct_sum(&e8).direct_sum(&u).direct_sum(&u).direct_sum(&u)
}

pub(crate) mod bigint_matrix {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let strs: Vec<Vec<String>> = Vec::deserialize(d)?;
        strs.into_iter()
            .map(|r| r.into_iter().map(|x| x.parse().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_root_lattices() {
        let a1 = root_lattice(RootKind::A, 1).unwrap();
        assert_eq!(a1.gram_i64(), vec![vec![-2]]);
        let a2 = root_lattice(RootKind::A, 2).unwrap();
        assert_eq!(a2.gram_i64(), vec![vec![-2, 1], vec![1, -2]]);
        assert!(root_lattice(RootKind::E, 9).is_err());
        assert!(root_lattice(RootKind::D, 3).is_err());
        assert!(root_lattice(RootKind::A, 0).is_err());
    }

    #[test]
    fn root_lattice_determinants() {
        // |det A_n| = n+1, |det D_n| = 4, det E8 = 1
        assert_eq!(root_lattice(RootKind::E, 8).unwrap().det(), BigInt::one());
        assert_eq!(root_lattice(RootKind::E, 7).unwrap().det(), BigInt::from(-2));
        assert_eq!(root_lattice(RootKind::E, 6).unwrap().det(), BigInt::from(3));
        assert_eq!(root_lattice(RootKind::D, 5).unwrap().det(), BigInt::from(-4));
        assert_eq!(root_lattice(RootKind::A, 4).unwrap().det(), BigInt::from(5));
    }

    #[test]
    fn u_and_k3() {
        assert_eq!(hyperbolic_u().signature(), Signature::new(1, 1, 0));
        let l = k3_lattice();
        assert_eq!(l.rank(), 22);
        assert_eq!(l.signature(), Signature::new(3, 19, 0));
        assert_eq!(l.det(), BigInt::from(-1));
    }

    #[test]
    fn scaling_and_sums() {
        let a1 = root_lattice(RootKind::A, 1).unwrap();
        assert_eq!(a1.scale(2).gram_i64(), vec![vec![-4]]);
        assert_eq!(hyperbolic_u().scale(3).det(), BigInt::from(-9));
        let s = a1.direct_sum(&hyperbolic_u());
        assert_eq!(s.rank(), 3);
        assert_eq!(s.det(), BigInt::from(2));
        assert_eq!(s.signature(), Signature::new(1, 2, 0));
    }

    #[test]
    fn signature_of_negative_definite() {
        assert_eq!(root_lattice(RootKind::A, 5).unwrap().signature(), Signature::new(0, 5, 0));
    }

    #[test]
    fn radical_of_affine_a1() {
        let l = GramLattice::from_i64(&[vec![-2, 2], vec![2, -2]]).unwrap();
        let r = l.radical();
        assert_eq!(r, vec![vec![BigInt::one(), BigInt::one()]]);
        assert!(hyperbolic_u().radical().is_empty());
        let (q, _) = l.quotient_by_radical();
        assert_eq!(q.rank(), 1);
        assert_eq!(q.det().abs(), BigInt::from(2));
    }

    #[test]
    fn rejects_odd_and_asymmetric() {
        assert_eq!(GramLattice::from_i64(&[vec![1]]), Err(LatticeError::OddDiagonal(0)));
        assert!(matches!(
            GramLattice::from_i64(&[vec![0, 1], vec![2, 0]]),
            Err(LatticeError::NotSymmetric(1, 0))
        ));
    }
}
