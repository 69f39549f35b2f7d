//! Fincke–Pohst enumeration of fixed-norm vectors in a definite lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{GramLattice, LatticeError, Matrix};

/// Default bound on visited search-tree nodes.
pub const DEFAULT_POINT_CAP: u64 = 10_000_000;

/// Restricts enumeration to vectors with `Σ coeffs[i]·x[i] == value`.
#[derive(Clone, Debug)]
pub struct LinearConstraint {
    pub coeffs: Vec<BigRational>,
    pub value: BigRational,
}

/// All integral vectors `v` of `lattice` with `v² = norm` satisfying every
/// constraint. The lattice must be negative definite and `norm < 0`.
pub fn enumerate_vectors(
    lattice: &GramLattice,
    norm: i64,
    constraints: &[LinearConstraint],
) -> Result<Vec<Vec<i64>>, LatticeError> {
    if norm >= 0 {
        return Err(LatticeError::BadNorm(norm));
    }
    if !lattice.is_negative_definite() {
        return Err(LatticeError::NotDefinite);
    }
    let all = short_vectors(lattice.gram(), &BigInt::from(norm), DEFAULT_POINT_CAP)?;
    Ok(all
        .into_iter()
        .filter(|v| {
            constraints.iter().all(|c| {
                let s: BigRational = c
                    .coeffs
                    .iter()
                    .zip(v)
                    .map(|(a, &x)| a * BigRational::from_integer(BigInt::from(x)))
                    .sum();
                s == c.value
            })
        })
        .collect())
}

/// Vectors of exact norm `norm` in a negative definite integer Gram matrix
/// (evenness not required). Returns them in lexicographic order of the search.
pub fn short_vectors(gram: &Matrix<BigInt>, norm: &BigInt, cap: u64) -> Result<Vec<Vec<i64>>, LatticeError> {
    let n = gram.len();
    if n == 0 {
        return Ok(if norm.is_zero() { vec![vec![]] } else { vec![] });
    }
    // positive definite P = -G, target T = -norm
    let p: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(-x.clone())).collect())
        .collect();
    let target = -norm.clone();
    if target.is_negative() {
        return Ok(vec![]);
    }
    // q[i][i] > 0 and q[i][j] (j > i) with P(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)^2
    let mut q = p.clone();
    for i in 0..n {
        if !q[i][i].is_positive() {
            return Err(LatticeError::NotDefinite);
        }
        for j in (i + 1)..n {
            let v = &q[i][j] / &q[i][i];
            q[j][i] = q[i][j].clone();
            q[i][j] = v;
        }
        for k in (i + 1)..n {
            for l in k..n {
                let v = &q[k][l] - &q[k][i] * &q[i][l];
                q[k][l] = v;
            }
        }
    }
    let qf: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if j >= i { q[i][j].to_f64().unwrap_or(f64::NAN) } else { 0.0 }).collect())
        .collect();
    let gi: Vec<Vec<i128>> = gram
        .iter()
        .map(|r| r.iter().map(|x| x.to_i128().expect("gram entry exceeds i128")).collect())
        .collect();
    let norm_i = norm.to_i128().expect("norm exceeds i128");
    let t = target.to_f64().unwrap_or(f64::INFINITY);

    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    let mut visited = 0u64;
    let mut search = Search { n, qf: &qf, gram: &gi, norm: norm_i, cap, visited: &mut visited, out: &mut out };
    search.recurse(n - 1, t, &mut x)?;
    Ok(out)
}

struct Search<'a> {
    n: usize,
    qf: &'a [Vec<f64>],
    gram: &'a [Vec<i128>],
    norm: i128,
    cap: u64,
    visited: &'a mut u64,
    out: &'a mut Vec<Vec<i64>>,
}

impl Search<'_> {
    fn recurse(&mut self, i: usize, remaining: f64, x: &mut [i64]) -> Result<(), LatticeError> {
        *self.visited += 1;
        if *self.visited > self.cap {
            return Err(LatticeError::CapExceeded(self.cap));
        }
        let mut center = 0.0;
        for j in (i + 1)..self.n {
            center -= self.qf[i][j] * x[j] as f64;
        }
        let slack = 1e-7 * (1.0 + remaining.abs());
        let radius = ((remaining + slack).max(0.0) / self.qf[i][i]).sqrt();
        let lo = (center - radius - 1e-9).ceil() as i64;
        let hi = (center + radius + 1e-9).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let dev = v as f64 - center;
            let rest = remaining - self.qf[i][i] * dev * dev;
            if rest < -slack {
                continue;
            }
            if i == 0 {
                if self.exact_norm(x) == self.norm {
                    self.out.push(x.to_vec());
                }
            } else {
                self.recurse(i - 1, rest, x)?;
            }
        }
        x[i] = 0;
        Ok(())
    }

    fn exact_norm(&self, x: &[i64]) -> i128 {
        let mut acc = 0i128;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                acc += x[i] as i128 * self.gram[i][j] * x[j] as i128;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{root_lattice, RootKind};

    /// naive scan over a coefficient box
    fn box_scan(l: &GramLattice, norm: i64, bound: i64) -> usize {
        let g = l.gram_i64();
        let n = g.len();
        let mut count = 0;
        let mut x = vec![-bound; n];
        loop {
            let mut s = 0;
            for i in 0..n {
                for j in 0..n {
                    s += x[i] * g[i][j] * x[j];
                }
            }
            if s == norm {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == n {
                    return count;
                }
                x[k] += 1;
                if x[k] > bound {
                    x[k] = -bound;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn a1_roots() {
        let a1 = root_lattice(RootKind::A, 1).unwrap();
        let v = enumerate_vectors(&a1, -2, &[]).unwrap();
        assert_eq!(v, vec![vec![-1], vec![1]]);
    }

    #[test]
    fn a2_and_e8_root_counts() {
        let a2 = root_lattice(RootKind::A, 2).unwrap();
        assert_eq!(enumerate_vectors(&a2, -2, &[]).unwrap().len(), 6);
        assert_eq!(box_scan(&a2, -2, 3), 6);
        let e8 = root_lattice(RootKind::E, 8).unwrap();
        assert_eq!(enumerate_vectors(&e8, -2, &[]).unwrap().len(), 240);
    }

    #[test]
    fn agrees_with_box_scan_small_rank() {
        for (kind, rank) in [(RootKind::A, 3), (RootKind::D, 4), (RootKind::A, 4)] {
            let l = root_lattice(kind, rank).unwrap();
            for norm in [-2, -4, -6] {
                let fp = enumerate_vectors(&l, norm, &[]).unwrap().len();
                assert_eq!(fp, box_scan(&l, norm, 4), "{kind:?}{rank} norm {norm}");
            }
        }
    }

    #[test]
    fn constraints_filter() {
        let a2 = root_lattice(RootKind::A, 2).unwrap();
        let c = LinearConstraint {
            coeffs: vec![BigRational::from_integer(1.into()), BigRational::from_integer(1.into())],
            value: BigRational::from_integer(1.into()),
        };
        // positive simple roots a1, a2 only
        assert_eq!(enumerate_vectors(&a2, -2, &[c]).unwrap().len(), 2);
    }

    #[test]
    fn refuses_indefinite() {
        let u = crate::lattice::hyperbolic_u();
        assert_eq!(enumerate_vectors(&u, -2, &[]), Err(LatticeError::NotDefinite));
        let a1 = root_lattice(RootKind::A, 1).unwrap();
        assert_eq!(enumerate_vectors(&a1, 2, &[]), Err(LatticeError::BadNorm(2)));
    }
}
