//! Orthogonal complements and subquotients `K^⊥/K`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{FiniteQuadraticForm, FormError};
use crate::lattice::matrix::{det, hermite_rows, integer_kernel, mat_mul, rational_inverse, smith};
use crate::lattice::Matrix;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Preimage in `Z^n` of `{x : b(x, g) = 0 for all g in gens}` as HNF rows.
pub(crate) fn perp_lattice(form: &FiniteQuadraticForm, gens: &[Vec<i64>]) -> Result<Matrix<BigInt>, FormError> {
    let n = form.num_generators();
    let m = gens.len();
    let level = form.level();
    // rows: constraint k reads  Σ_i b(e_i, g_k) x_i - N y_k = 0
    let mut a: Matrix<BigInt> = vec![vec![BigInt::zero(); n + m]; m];
    for (k, g) in gens.iter().enumerate() {
        for i in 0..n {
            a[k][i] = big(form.b_raw(&form.generator(i), g));
        }
        a[k][n + k] = big(-level);
    }
    let mut rows: Matrix<BigInt> = if m == 0 {
        crate::lattice::matrix::identity(n)
    } else {
        integer_kernel(&a, n + m).into_iter().map(|r| r[..n].to_vec()).collect()
    };
    for (i, &o) in form.orders().iter().enumerate() {
        let mut r = vec![BigInt::zero(); n];
        r[i] = big(o);
        rows.push(r);
    }
    let h = hermite_rows(&rows, n);
    if h.len() != n {
        return Err(FormError::Inconsistent("perp lattice is not full rank".into()));
    }
    Ok(h)
}

/// Index of a full-rank sublattice given by basis rows.
pub(crate) fn lattice_index(basis: &Matrix<BigInt>) -> i128 {
    det(basis).abs().to_i128().expect("index exceeds i128")
}

/// `K^⊥/K` for an isotropic subgroup `K = <gens>`. Returns the form and the
/// ambient representatives of its generators.
pub fn subquotient(
    form: &FiniteQuadraticForm,
    gens: &[Vec<i64>],
) -> Result<(FiniteQuadraticForm, Vec<Vec<i64>>), FormError> {
    for (i, g) in gens.iter().enumerate() {
        if !form.is_isotropic(g) {
            return Err(FormError::NotIsotropic(format!("{g:?}")));
        }
        for h in &gens[i + 1..] {
            if form.b_raw(g, h) != 0 {
                return Err(FormError::NotIsotropic(format!("b({g:?}, {h:?})")));
            }
        }
    }
    let n = form.num_generators();
    let perp = perp_lattice(form, gens)?;
    let perp_inv = rational_inverse(&perp).ok_or(FormError::Degenerate)?;
    let mut k_rows: Matrix<BigInt> = gens.iter().map(|g| g.iter().map(|&x| big(x)).collect()).collect();
    for (i, &o) in form.orders().iter().enumerate() {
        let mut r = vec![BigInt::zero(); n];
        r[i] = big(o);
        k_rows.push(r);
    }
    // coefficients of K rows in the perp basis
    let mut c: Matrix<BigInt> = Vec::with_capacity(k_rows.len());
    for row in &k_rows {
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let mut s = BigRational::zero();
            for i in 0..n {
                if !row[i].is_zero() {
                    s += BigRational::from_integer(row[i].clone()) * &perp_inv[i][j];
                }
            }
            if !s.is_integer() {
                return Err(FormError::Inconsistent("subgroup not contained in its complement".into()));
            }
            out.push(s.to_integer());
        }
        c.push(out);
    }
    let s = smith(&c, n);
    let new_basis = mat_mul(&s.right_inv, &perp);
    let d = s.invariants();
    let mut orders = Vec::new();
    let mut lifts = Vec::new();
    for (i, di) in d.iter().enumerate() {
        let di = di.to_i64().expect("order exceeds i64");
        if di == 1 {
            continue;
        }
        let mut v: Vec<i64> = new_basis[i].iter().map(|x| x.to_i64().expect("coordinate exceeds i64")).collect();
        form.reduce(&mut v);
        orders.push(di);
        lifts.push(v);
    }
    let labels = (1..=orders.len()).map(|i| format!("g{i}")).collect();
    Ok((form.restrict(labels, orders, &lifts), lifts))
}

/// A `p`-primary quotient `K^⊥/K` maintained incrementally along a chain of
/// order-`p` extensions of `K`.
#[derive(Clone, Debug)]
pub struct PerpQuotient {
    pub form: FiniteQuadraticForm,
    /// Ambient representative of each generator of `form`.
    pub lift: Vec<Vec<i64>>,
    p: i64,
}

impl PerpQuotient {
    pub fn new(form: FiniteQuadraticForm, p: u64) -> Self {
        let lift = (0..form.num_generators()).map(|i| form.generator(i)).collect();
        PerpQuotient { form, lift, p: p as i64 }
    }

    /// Ambient representative of an element of the quotient.
    pub fn lift_of(&self, ambient: &FiniteQuadraticForm, x: &[i64]) -> Vec<i64> {
        let mut v = ambient.zero();
        for (c, l) in x.iter().zip(&self.lift) {
            if *c != 0 {
                for (vi, li) in v.iter_mut().zip(l) {
                    *vi += c * li;
                }
            }
        }
        ambient.reduce(&mut v);
        v
    }

    /// Generators of the `p`-torsion subgroup, as quotient elements.
    pub fn torsion_generators(&self) -> Vec<Vec<i64>> {
        let f = &self.form;
        (0..f.num_generators())
            .map(|i| {
                let mut g = f.zero();
                g[i] = f.orders()[i] / self.p;
                g
            })
            .collect()
    }

    /// `x^⊥/<x>` for an isotropic `x` of order `p` in the quotient.
    pub fn extend(&self, ambient: &FiniteQuadraticForm, x: &[i64]) -> PerpQuotient {
        let f = &self.form;
        let p = self.p;
        let n = f.num_generators();
        debug_assert!(f.is_isotropic(x) && f.element_order(x) == p);
        // basis as quotient elements, with orders
        let mut basis: Vec<Vec<i64>> = (0..n).map(|i| f.generator(i)).collect();
        let mut orders: Vec<i64> = f.orders().to_vec();

        // step 1: kernel of y -> p·b(x, y) mod p
        let coeff = |y: &[i64]| -> i64 {
            let raw = f.b_raw(x, y) as i128 * p as i128;
            debug_assert_eq!(raw % f.level() as i128, 0);
            ((raw / f.level() as i128) % p as i128) as i64
        };
        let c: Vec<i64> = basis.iter().map(|g| coeff(g)).collect();
        let pivot = (0..n).filter(|&i| c[i] != 0).min_by_key(|&i| orders[i]);
        let Some(j) = pivot else {
            panic!("element lies in the radical of a non-degenerate form");
        };
        let inv = mod_inverse(c[j], p);
        for i in 0..n {
            if i != j && c[i] != 0 {
                let t = (c[i] * inv).rem_euclid(p);
                basis[i] = f.add(&basis[i], &f.scale(-t, &basis[j]));
            }
        }
        basis[j] = f.scale(p, &basis[j]);
        orders[j] /= p;

        // step 2: quotient by <x>; coordinates of x in the new basis
        let coords = self.coordinates_in(&basis, &orders, x);
        let m = basis.len();
        let piv = (0..m)
            .filter(|&i| orders[i] > 1 && (coords[i] / (orders[i] / p)).rem_euclid(p) != 0 && coords[i] % (orders[i] / p) == 0)
            .min_by_key(|&i| orders[i])
            .expect("x is a non-zero element of order p");
        let mi = orders[piv];
        let mut y = f.zero();
        for k in 0..m {
            if coords[k] == 0 {
                continue;
            }
            // coords[k] = (orders[k]/p)·u_k ; contribute (orders[k]/mi)·u_k·basis[k]
            let u = coords[k] / (orders[k] / p);
            y = f.add(&y, &f.scale(orders[k] / mi * u, &basis[k]));
        }
        basis[piv] = y;
        orders[piv] = mi / p;

        let mut new_orders = Vec::new();
        let mut gens = Vec::new();
        for (g, o) in basis.into_iter().zip(orders) {
            if o > 1 {
                gens.push(g);
                new_orders.push(o);
            }
        }
        let labels = (1..=new_orders.len()).map(|i| format!("g{i}")).collect();
        let form = f.restrict(labels, new_orders, &gens);
        let lift = gens.iter().map(|g| self.lift_of(ambient, g)).collect();
        PerpQuotient { form, lift, p }
    }

    /// Coordinates of `x` in a basis related to the generator basis by the
    /// triangular moves of [`extend`]. Solved by pairing against a dual basis
    /// would need the form; instead peel off coordinates directly.
    fn coordinates_in(&self, basis: &[Vec<i64>], orders: &[i64], x: &[i64]) -> Vec<i64> {
        // x has order p, so it lives in the p-torsion ⊕ <(o_k/p) b_k>, which is
        // an F_p vector space of small dimension; solve by Gaussian elimination.
        let f = &self.form;
        let p = self.p;
        let m = basis.len();
        let tors: Vec<Vec<i64>> = (0..m).map(|k| f.scale(orders[k] / p, &basis[k])).collect();
        // express everything in generator coordinates scaled down to F_p
        let to_fp = |v: &[i64]| -> Vec<i64> {
            v.iter().zip(f.orders()).map(|(a, &o)| if a % (o / p) == 0 { (a / (o / p)).rem_euclid(p) } else { -1 }).collect()
        };
        let cols: Vec<Vec<i64>> = tors.iter().map(|t| to_fp(t)).collect();
        let target = to_fp(x);
        debug_assert!(target.iter().all(|&v| v >= 0));
        let sol = solve_fp(&cols, &target, p).expect("x lies in the p-torsion of the basis");
        (0..m).map(|k| sol[k] * (orders[k] / p)).collect()
    }
}

/// Solves `Σ s_k cols[k] = target` over `F_p`. Columns with a `-1` entry
/// (not `p`-torsion) are zero in the torsion image and get `s_k = 0`.
fn solve_fp(cols: &[Vec<i64>], target: &[i64], p: i64) -> Option<Vec<i64>> {
    let m = cols.len();
    let n = target.len();
    // augmented n x (m+1)
    let mut a: Vec<Vec<i64>> = (0..n)
        .map(|r| {
            let mut row: Vec<i64> = cols.iter().map(|c| c[r].max(0)).collect();
            row.push(target[r]);
            row
        })
        .collect();
    let mut piv_col = Vec::new();
    let mut r = 0;
    for c in 0..m {
        if cols[c].iter().any(|&v| v < 0) {
            continue;
        }
        let Some(pr) = (r..n).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = mod_inverse(a[r][c], p);
        for v in a[r].iter_mut() {
            *v = (*v * inv).rem_euclid(p);
        }
        for i in 0..n {
            if i != r && a[i][c] != 0 {
                let t = a[i][c];
                for k in 0..=m {
                    a[i][k] = (a[i][k] - t * a[r][k]).rem_euclid(p);
                }
            }
        }
        piv_col.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| row[m] != 0) {
        return None;
    }
    let mut sol = vec![0; m];
    for (i, &c) in piv_col.iter().enumerate() {
        sol[c] = a[i][m];
    }
    Some(sol)
}

pub(crate) fn mod_inverse(a: i64, m: i64) -> i64 {
    let (mut t, mut new_t, mut r, mut new_r) = (0i64, 1i64, m, a.rem_euclid(m));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible mod {m}");
    t.rem_euclid(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hyperbolic_plane_collapses() {
        let u = FiniteQuadraticForm::u_block(1);
        let (q, lifts) = subquotient(&u, &[vec![1, 0]]).unwrap();
        assert!(q.is_trivial());
        assert!(lifts.is_empty());
        let pq = PerpQuotient::new(u.clone(), 2).extend(&u, &[1, 0]);
        assert!(pq.form.is_trivial());
    }

    #[test]
    fn order_law_on_u4() {
        let u = FiniteQuadraticForm::u_block(2);
        let (q, _) = subquotient(&u, &[vec![2, 0]]).unwrap();
        assert_eq!(q.order(), 16 / 4);
        let pq = PerpQuotient::new(u.clone(), 2).extend(&u, &[2, 0]);
        assert_eq!(pq.form.order(), 4);
        assert!(pq.form.is_nondegenerate());
        // <(2,0)>^⊥ / <(2,0)> is the hyperbolic plane of order 2^2
        assert_eq!(pq.form.orders(), &[2, 2]);
    }

    #[test]
    fn rejects_anisotropic() {
        let v = FiniteQuadraticForm::v_block(1);
        assert!(subquotient(&v, &[vec![1, 0]]).is_err());
    }

    #[test]
    fn mod_inverse_works() {
        assert_eq!(mod_inverse(3, 7), 5);
        assert_eq!(mod_inverse(-1, 5), 4);
    }
}
