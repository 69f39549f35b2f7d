//! Discriminant form `L^∨/L` of a non-degenerate even lattice.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FiniteQuadraticForm, FormError};
use crate::lattice::matrix::{rational_inverse, smith};
use crate::lattice::{GramLattice, Matrix};

/// The discriminant form with the data needed to map dual vectors to classes.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    form: FiniteQuadraticForm,
    /// Dual-lattice representatives of the generators, in lattice coordinates.
    reps: Vec<Vec<BigRational>>,
    /// Rows of `V^{-1}` belonging to the non-trivial invariants.
    vinv_rows: Vec<Vec<BigInt>>,
    invariants: Vec<BigInt>,
    gram_inverse: Matrix<BigRational>,
}

/// Computes `A_L = L^∨ / L` with `b` and `q` induced from the Gram matrix.
pub fn discriminant_form(lattice: &GramLattice) -> Result<DiscriminantForm, FormError> {
    let g = lattice.gram();
    let r = lattice.rank();
    let gram_inverse = rational_inverse(g).ok_or(FormError::Degenerate)?;
    let s = smith(g, r);
    let d = s.invariants();
    if d.iter().any(|x| x.is_zero()) {
        return Err(FormError::Degenerate);
    }
    let mut reps = Vec::new();
    let mut vinv_rows = Vec::new();
    let mut invariants = Vec::new();
    for (i, di) in d.iter().enumerate() {
        if di.is_one() {
            continue;
        }
        let col: Vec<BigRational> = (0..r).map(|k| BigRational::new(s.right[k][i].clone(), di.clone())).collect();
        reps.push(col);
        vinv_rows.push(s.right_inv[i].clone());
        invariants.push(di.clone());
    }
    let n = reps.len();
    let mut bil = vec![vec![BigRational::zero(); n]; n];
    let mut quad = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in i..n {
            let v = lattice.pair(&reps[i], &reps[j]);
            bil[i][j] = v.clone();
            bil[j][i] = v.clone();
            if i == j {
                quad[i] = v;
            }
        }
    }
    let orders: Vec<i64> = invariants
        .iter()
        .map(|x| x.to_i64().ok_or_else(|| FormError::Inconsistent("invariant exceeds i64".into())))
        .collect::<Result<_, _>>()?;
    let labels = (1..=n).map(|i| format!("g{i}")).collect();
    let form = FiniteQuadraticForm::from_rationals(labels, orders, &bil, &quad)?;
    Ok(DiscriminantForm { form, reps, vinv_rows, invariants, gram_inverse })
}

impl DiscriminantForm {
    pub fn form(&self) -> &FiniteQuadraticForm {
        &self.form
    }

    pub fn into_form(self) -> FiniteQuadraticForm {
        self.form
    }

    /// Representative in `L ⊗ Q` of the `i`-th generator.
    pub fn generator_rep(&self, i: usize) -> &[BigRational] {
        &self.reps[i]
    }

    /// A dual vector representing the class `x`.
    pub fn representative(&self, x: &[i64]) -> Vec<BigRational> {
        let r = self.gram_inverse.len();
        let mut v = vec![BigRational::zero(); r];
        for (c, rep) in x.iter().zip(&self.reps) {
            if *c == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(*c));
            for k in 0..r {
                v[k] += &c * &rep[k];
            }
        }
        v
    }

    /// Class in `A_L` of a dual vector given in lattice coordinates. Fails if
    /// the vector is not in `L^∨`.
    pub fn class_of(&self, c: &[BigRational]) -> Result<Vec<i64>, FormError> {
        let mut out = Vec::with_capacity(self.invariants.len());
        for (row, d) in self.vinv_rows.iter().zip(&self.invariants) {
            let mut z = BigRational::zero();
            for (a, x) in row.iter().zip(c) {
                if !a.is_zero() {
                    z += BigRational::from_integer(a.clone()) * x;
                }
            }
            z *= BigRational::from_integer(d.clone());
            if !z.is_integer() {
                return Err(FormError::Inconsistent("vector is not in the dual lattice".into()));
            }
            let v = z.to_integer() % d;
            let v = if v.is_negative() { v + d } else { v };
            out.push(v.to_i64().unwrap());
        }
        Ok(out)
    }

    /// Class of the dual vector `G^{-1} y` for an integral functional `y`,
    /// i.e. the vector pairing with basis vector `i` to `y_i`.
    pub fn class_of_functional(&self, y: &[BigInt]) -> Vec<i64> {
        let c: Vec<BigRational> = self
            .gram_inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(y)
                    .filter(|(_, b)| !b.is_zero())
                    .map(|(a, b)| a * BigRational::from_integer(b.clone()))
                    .sum()
            })
            .collect();
        self.class_of(&c).expect("G^{-1} y lies in the dual lattice")
    }

    pub fn gram_inverse(&self) -> &Matrix<BigRational> {
        &self.gram_inverse
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{root_lattice, RootKind};

    #[test]
    fn root_lattice_discriminants() {
        let a2 = root_lattice(RootKind::A, 2).unwrap();
        let f = discriminant_form(&a2).unwrap();
        assert_eq!(f.form().orders(), &[3]);
        // A2 is negative definite: q = -2/3 = 4/3 mod 2
        let (n, d) = f.form().q(&[1]).centered();
        assert_eq!((n, d), (-2, 3));

        let e8 = root_lattice(RootKind::E, 8).unwrap();
        assert!(discriminant_form(&e8).unwrap().form().is_trivial());

        let d4 = root_lattice(RootKind::D, 4).unwrap();
        let f = discriminant_form(&d4).unwrap();
        assert_eq!(f.form().invariant_factors(), vec![2, 2]);
        for x in f.form().elements(16).unwrap().skip(1) {
            assert_eq!(f.form().q(&x), super::super::QValue::new(1, 1, 2));
        }
    }

    #[test]
    fn class_of_representatives_roundtrip() {
        let a4 = root_lattice(RootKind::A, 4).unwrap();
        let f = discriminant_form(&a4).unwrap();
        for x in f.form().elements(100).unwrap() {
            let v = f.representative(&x);
            assert_eq!(f.class_of(&v).unwrap(), x);
        }
        let half = vec![BigRational::new(1.into(), 2.into()); 4];
        assert!(f.class_of(&half).is_err());
    }
}
