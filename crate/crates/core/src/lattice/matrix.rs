//! Dense integer and rational matrix routines.
//!
//! Matrices are plain `Vec<Vec<T>>` in row-major order. The Smith normal form
//! is generic over the integer type so the same code runs on `BigInt` for
//! Gram matrices and on `i128` inside the finite-group search loops.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Matrix<T> = Vec<Vec<T>>;

pub fn identity<T: Zero + One + Clone>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &Matrix<T>, cols: usize) -> Matrix<T> {
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul<T>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T>
where
    T: Zero + Clone + std::ops::Mul<Output = T>,
{
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = T::zero();
                    for k in 0..inner {
                        acc = acc + row[k].clone() * b[k][j].clone();
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Result of a Smith normal form computation: `left * input * right == diag`.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub diag: Matrix<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
    /// Inverse of `left`.
    pub left_inv: Matrix<T>,
    /// Inverse of `right`.
    pub right_inv: Matrix<T>,
}

impl<T: Clone + Zero> Smith<T> {
    /// Diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn invariants(&self) -> Vec<T> {
        let n = self.diag.len().min(self.diag.first().map_or(0, |r| r.len()));
        (0..n).map(|i| self.diag[i][i].clone()).collect()
    }
}

fn swap_rows<T>(m: &mut Matrix<T>, i: usize, j: usize) {
    m.swap(i, j);
}

fn swap_cols<T>(m: &mut Matrix<T>, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// row_i <- row_i - c * row_j
fn row_axpy<T: Integer + Clone>(m: &mut Matrix<T>, i: usize, j: usize, c: &T) {
    if c.is_zero() {
        return;
    }
    let src = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(src.iter()) {
        *x = x.clone() - c.clone() * y.clone();
    }
}

/// col_i <- col_i - c * col_j
fn col_axpy<T: Integer + Clone>(m: &mut Matrix<T>, i: usize, j: usize, c: &T) {
    if c.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let y = row[j].clone();
        row[i] = row[i].clone() - c.clone() * y;
    }
}

/// Smith normal form with unimodular transforms.
///
/// Returns `left`, `right` unimodular and `diag` diagonal with non-negative
/// entries, each dividing the next, such that `left * m * right == diag`.
pub fn smith<T>(m: &Matrix<T>, cols: usize) -> Smith<T>
where
    T: Integer + Signed + Clone,
{
    let rows = m.len();
    let mut a = m.clone();
    let mut left: Matrix<T> = identity(rows);
    let mut right: Matrix<T> = identity(cols);
    let mut left_inv: Matrix<T> = identity(rows);
    let mut right_inv: Matrix<T> = identity(cols);
    let n = rows.min(cols);

    let mut t = 0;
    while t < n {
        // pivot: smallest non-zero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() {
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => a[i][j].abs() < a[bi][bj].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut a, t, pi);
        swap_rows(&mut left, t, pi);
        swap_cols(&mut left_inv, t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut right, t, pj);
        swap_rows(&mut right_inv, t, pj);

        let mut dirty = false;
        for i in (t + 1)..rows {
            if !a[i][t].is_zero() {
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                col_axpy(&mut left_inv, t, i, &(T::zero() - q.clone()));
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
        }
        for j in (t + 1)..cols {
            if !a[t][j].is_zero() {
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut right, j, t, &q);
                row_axpy(&mut right_inv, t, j, &(T::zero() - q.clone()));
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }
        // divisibility of the trailing block by the pivot
        let mut fixed = false;
        'outer: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !a[i][j].mod_floor(&a[t][t]).is_zero() {
                    // row_t <- row_t + row_i brings a non-multiple into row t
                    let minus_one = T::zero() - T::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                    col_axpy(&mut left_inv, i, t, &T::one());
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = T::zero() - x.clone();
            }
            for x in left[t].iter_mut() {
                *x = T::zero() - x.clone();
            }
            for row in left_inv.iter_mut() {
                row[t] = T::zero() - row[t].clone();
            }
        }
        t += 1;
    }
    Smith { diag: a, left, right, left_inv, right_inv }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &Matrix<BigInt>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = ((k + 1)..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Inverse over the rationals, `None` when singular.
pub fn rational_inverse(m: &Matrix<BigInt>) -> Option<Matrix<BigRational>> {
    let n = m.len();
    let mut a: Matrix<BigRational> = m
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut inv: Matrix<BigRational> = identity(n);
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &piv;
            inv[c][j] = &inv[c][j] / &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[i][j] = &a[i][j] - t;
                    let t = &f * &inv[c][j];
                    inv[i][j] = &inv[i][j] - t;
                }
            }
        }
    }
    Some(inv)
}

/// Row-style Hermite normal form of a list of integer row vectors: pivots
/// positive, entries above a pivot reduced into `[0, pivot)`, zero rows dropped.
pub fn hermite_rows(rows: &Matrix<BigInt>, cols: usize) -> Matrix<BigInt> {
    let mut a = rows.clone();
    let mut r = 0;
    for c in 0..cols {
        if r >= a.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..a.len()).filter(|&i| !a[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(r, p);
            let mut done = true;
            for i in (r + 1)..a.len() {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    row_axpy(&mut a, i, r, &q);
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][c].div_floor(&a[r][c]);
                row_axpy(&mut a, i, r, &q);
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// Z-basis (as rows) of the integral kernel `{x : m x = 0}`.
pub fn integer_kernel(m: &Matrix<BigInt>, cols: usize) -> Matrix<BigInt> {
    let s = smith(m, cols);
    let rank = s.invariants().iter().filter(|d| !d.is_zero()).count();
    (rank..cols)
        .map(|j| s.right.iter().map(|row| row[j].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: &[&[i64]]) -> Matrix<BigInt> {
        m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn smith_reconstructs() {
        let m = big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith(&m, 3);
        let lhs = mat_mul(&mat_mul(&s.left, &m), &s.right);
        assert_eq!(lhs, s.diag);
        let inv: Vec<BigInt> = s.invariants();
        assert_eq!(inv, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        assert_eq!(det(&s.left).abs(), BigInt::one());
        assert_eq!(det(&s.right).abs(), BigInt::one());
        assert_eq!(mat_mul(&s.left, &s.left_inv), identity::<BigInt>(3));
        assert_eq!(mat_mul(&s.right, &s.right_inv), identity::<BigInt>(3));
    }

    #[test]
    fn smith_small_ints() {
        let m: Matrix<i128> = vec![vec![0, 9], vec![9, 3]];
        let s = smith(&m, 2);
        assert_eq!(s.invariants(), vec![3, 27]);
    }

    #[test]
    fn bareiss_matches_known() {
        assert_eq!(det(&big(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(&big(&[&[-2, 1], &[1, -2]])), BigInt::from(3));
        assert_eq!(det(&big(&[&[0, 0], &[0, 5]])), BigInt::zero());
    }

    #[test]
    fn kernel_of_double_edge() {
        let k = integer_kernel(&big(&[&[-2, 2], &[2, -2]]), 2);
        let h = hermite_rows(&k, 2);
        assert_eq!(h, big(&[&[1, 1]]));
    }
}
