//! Roots of `k^⊥ ⊂ F^∨` and their discriminant classes.
//!
//! Every such root is `e = x + βk` with `x ∈ (Z∂Γ)^∨`, `x² = −2`, and its
//! degree `r = e·h` fixes `β = (r − d·s(x))/(df)`, where `s` is the
//! coefficient sum. The class of `e` is therefore `L(x) + r·[k/(df)]` with `L`
//! linear in the weight coordinates of `x`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::fqf::{discriminant_form, DiscriminantForm, FiniteQuadraticForm, FormError};
use crate::graph::PolarizedFano;
use crate::lattice::matrix::rational_inverse;
use crate::lattice::{short_vectors, Matrix, DEFAULT_POINT_CAP};

/// A vector `x ∈ (Z∂Γ)^∨` of square −2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualRoot {
    /// `x·v` for each root generator `v` of the basis (indices `2..rank`).
    pub weights: Vec<i64>,
    /// Coefficient sum `s(x)`.
    #[serde(with = "crate::geometricity::rational_serde")]
    pub sum: BigRational,
    /// The class `L(x)`.
    pub base: Vec<i64>,
}

/// A root `e ∈ k^⊥` of the dual lattice, with its degree and class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowDegreeRoot {
    pub degree: i64,
    /// Coordinates of `e` in the basis of `F`.
    #[serde(with = "crate::geometricity::rational_vec_serde")]
    pub coords: Vec<BigRational>,
    pub class: Vec<i64>,
}

/// Roots of `(Z∂Γ)^∨` and the linear data that turns them into classes.
#[derive(Clone, Debug)]
pub struct RootClasses {
    pub disc: DiscriminantForm,
    /// Class of `k/(df)`.
    pub k_class: Vec<i64>,
    /// Class of `ω_j − s(ω_j)/f·k` for every root generator.
    pub weight_classes: Vec<Vec<i64>>,
    /// Inverse of the `∂Γ` Gram matrix.
    pub root_gram_inverse: Matrix<BigRational>,
    pub roots: Vec<DualRoot>,
    d: i64,
    f: i64,
}

impl RootClasses {
    pub fn new(fano: &PolarizedFano) -> Result<Self, FormError> {
        let disc = discriminant_form(&fano.lattice)?;
        let rank = fano.rank();
        let df = fano.d * fano.f;
        let mut kv = vec![BigRational::zero(); rank];
        kv[fano.k_index] = BigRational::new(BigInt::one(), BigInt::from(df));
        let k_class = disc.class_of(&kv)?;

        let roots_lat = fano.root_lattice();
        let ginv = rational_inverse(roots_lat.gram()).ok_or(FormError::Degenerate)?;
        let m = ginv.len();
        let f_rat = BigRational::from_integer(BigInt::from(fano.f));
        let mut weight_classes = Vec::with_capacity(m);
        let mut weight_sums = Vec::with_capacity(m);
        for row in &ginv {
            let s: BigRational = row.iter().sum();
            let mut v = vec![BigRational::zero(); rank];
            v[fano.k_index] = -&s / &f_rat;
            for (j, x) in row.iter().enumerate() {
                v[2 + j] = x.clone();
            }
            weight_classes.push(disc.class_of(&v)?);
            weight_sums.push(s);
        }

        let form = disc.form().clone();
        let mut blocks: Vec<ComponentRoots> = Vec::new();
        let mut cache: BTreeMap<usize, Vec<(BigRational, Vec<i64>)>> = BTreeMap::new();
        for idx in &fano.component_map {
            let size = idx.len();
            let vecs = match cache.get(&size) {
                Some(v) => v.clone(),
                None => {
                    let v = a_dual_short(size)?;
                    cache.insert(size, v.clone());
                    v
                }
            };
            let offset = idx[0] - 2;
            let entries = vecs
                .into_iter()
                .map(|(norm, c)| {
                    let mut class = form.zero();
                    let mut sum = BigRational::zero();
                    for (t, &cj) in c.iter().enumerate() {
                        if cj != 0 {
                            class = form.add(&class, &form.scale(cj, &weight_classes[offset + t]));
                            sum += &weight_sums[offset + t] * BigRational::from_integer(BigInt::from(cj));
                        }
                    }
                    ComponentVector { norm, weights: c, class, sum }
                })
                .collect();
            blocks.push(ComponentRoots { offset, entries });
        }
        let mut roots = Vec::new();
        combine(&form, &blocks, m, &mut roots);
        Ok(RootClasses { disc, k_class, weight_classes, root_gram_inverse: ginv, roots, d: fano.d, f: fano.f })
    }

    pub fn form(&self) -> &FiniteQuadraticForm {
        self.disc.form()
    }

    /// Class of the degree-`r` root over `x`.
    pub fn class_at(&self, root: &DualRoot, r: i64) -> Vec<i64> {
        let f = self.form();
        f.add(&root.base, &f.scale(r, &self.k_class))
    }

    /// Coordinates in `F ⊗ Q` of the degree-`r` root over `x`.
    pub fn root_vector(&self, root: &DualRoot, r: i64, rank: usize, k_index: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); rank];
        let df = BigRational::from_integer(BigInt::from(self.d * self.f));
        let d = BigRational::from_integer(BigInt::from(self.d));
        v[k_index] = (BigRational::from_integer(BigInt::from(r)) - d * &root.sum) / df;
        for (j, row) in self.root_gram_inverse.iter().enumerate() {
            let x: BigRational = row
                .iter()
                .zip(&root.weights)
                .filter(|(_, &c)| c != 0)
                .map(|(a, &c)| a * BigRational::from_integer(BigInt::from(c)))
                .sum();
            v[2 + j] = x;
        }
        v
    }

    /// Codes of the exceptional classes: roots of degree `0..d`.
    pub fn exceptional_codes(&self) -> HashSet<u64> {
        let f = self.form();
        let mut out = HashSet::new();
        for root in &self.roots {
            let mut c = root.base.clone();
            for _ in 0..self.d {
                out.insert(f.encode(&c));
                c = f.add(&c, &self.k_class);
            }
        }
        out
    }

    /// Codes of the non-zero classes `[jk/(df)]`, `0 < j < df`.
    pub fn fractional_k_codes(&self) -> HashSet<u64> {
        let f = self.form();
        let mut out = HashSet::new();
        let mut c = self.k_class.clone();
        for _ in 1..self.d * self.f {
            out.insert(f.encode(&c));
            c = f.add(&c, &self.k_class);
        }
        out
    }

    /// Codes of the classes of degree-`d` roots, the zero class included.
    pub fn degree_d_codes(&self) -> HashSet<u64> {
        let f = self.form();
        self.roots.iter().map(|r| f.encode(&self.class_at(r, self.d))).collect()
    }

    /// Roots `e ∈ k^⊥` of the extension by the subgroup with element codes
    /// `kernel`, of degree in `0..=max_degree`.
    pub fn roots_in(&self, fano: &PolarizedFano, kernel: &HashSet<u64>, max_degree: i64) -> Vec<LowDegreeRoot> {
        let f = self.form();
        let mut out = Vec::new();
        for root in &self.roots {
            for r in 0..=max_degree {
                let class = self.class_at(root, r);
                if kernel.contains(&f.encode(&class)) {
                    out.push(LowDegreeRoot {
                        degree: r,
                        coords: self.root_vector(root, r, fano.rank(), fano.k_index),
                        class,
                    });
                }
            }
        }
        out.sort_by(|a, b| a.degree.cmp(&b.degree).then_with(|| a.coords.cmp(&b.coords)));
        out
    }
}

#[derive(Clone, Debug)]
struct ComponentVector {
    norm: BigRational,
    weights: Vec<i64>,
    class: Vec<i64>,
    sum: BigRational,
}

struct ComponentRoots {
    offset: usize,
    entries: Vec<ComponentVector>,
}

/// Vectors of `A_k^∨` with square in `[−2, 0]`, in weight coordinates.
fn a_dual_short(k: usize) -> Result<Vec<(BigRational, Vec<i64>)>, FormError> {
    let g: Matrix<BigInt> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| match i.abs_diff(j) {
                    0 => BigInt::from(-2),
                    1 => BigInt::one(),
                    _ => BigInt::zero(),
                })
                .collect()
        })
        .collect();
    let inv = rational_inverse(&g).ok_or(FormError::Degenerate)?;
    let scale = BigInt::from(k as i64 + 1);
    let scaled: Matrix<BigInt> = inv
        .iter()
        .map(|row| row.iter().map(|x| (x * BigRational::from_integer(scale.clone())).to_integer()).collect())
        .collect();
    let mut out = vec![(BigRational::zero(), vec![0i64; k])];
    for t in 1..=2 * (k as i64 + 1) {
        let vs = short_vectors(&scaled, &BigInt::from(-t), DEFAULT_POINT_CAP)
            .map_err(|_| FormError::CapExceeded { order: DEFAULT_POINT_CAP, cap: DEFAULT_POINT_CAP })?;
        let norm = BigRational::new(BigInt::from(-t), scale.clone());
        out.extend(vs.into_iter().map(|v| (norm.clone(), v)));
    }
    Ok(out)
}

/// All sums of one vector per component with total square exactly −2.
fn combine(form: &FiniteQuadraticForm, blocks: &[ComponentRoots], m: usize, out: &mut Vec<DualRoot>) {
    // norms as integers over a common denominator
    let den = blocks.iter().fold(BigInt::one(), |a, b| {
        b.entries.iter().fold(a, |a, e| a.lcm(e.norm.denom()))
    });
    let scaled: Vec<Vec<i64>> = blocks
        .iter()
        .map(|b| {
            b.entries
                .iter()
                .map(|e| (&e.norm * BigRational::from_integer(den.clone())).to_integer().abs().to_i64().unwrap())
                .collect()
        })
        .collect();
    let target = (BigInt::from(2) * &den).to_i64().unwrap();
    struct State<'a> {
        form: &'a FiniteQuadraticForm,
        blocks: &'a [ComponentRoots],
        scaled: &'a [Vec<i64>],
        chosen: Vec<usize>,
        out: &'a mut Vec<DualRoot>,
        m: usize,
    }
    fn rec(st: &mut State, i: usize, left: i64) {
        if i == st.blocks.len() {
            if left == 0 {
                let mut weights = vec![0i64; st.m];
                let mut base = st.form.zero();
                let mut sum = BigRational::zero();
                for (b, &j) in st.blocks.iter().zip(&st.chosen) {
                    let e = &b.entries[j];
                    if e.norm.is_zero() {
                        continue;
                    }
                    weights[b.offset..b.offset + e.weights.len()].copy_from_slice(&e.weights);
                    base = st.form.add(&base, &e.class);
                    sum += &e.sum;
                }
                st.out.push(DualRoot { weights, sum, base });
            }
            return;
        }
        for j in 0..st.blocks[i].entries.len() {
            let n = st.scaled[i][j];
            if n > left {
                continue;
            }
            st.chosen.push(j);
            rec(st, i + 1, left - n);
            st.chosen.pop();
        }
    }
    let mut st = State { form, blocks, scaled: &scaled, chosen: Vec::new(), out, m };
    rec(&mut st, 0, target);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fano_lattice, ConfigGraph};

    fn classes(g: &str, n: i64, d: i64) -> (PolarizedFano, RootClasses) {
        let f = fano_lattice(&ConfigGraph::parse(g).unwrap(), n, d).unwrap();
        let rc = RootClasses::new(&f).unwrap();
        (f, rc)
    }

    #[test]
    fn a_dual_counts() {
        // A1: 0, ±ω (−1/2), ±a (−2)
        assert_eq!(a_dual_short(1).unwrap().len(), 5);
        // A2: 0, six of square −2/3, six roots
        assert_eq!(a_dual_short(2).unwrap().len(), 13);
    }

    #[test]
    fn root_counts() {
        let (_, rc) = classes("12tA1", 101, 3);
        assert_eq!(rc.roots.len(), 24 + 495 * 16);
        let (_, rc) = classes("8tA2", 101, 3);
        assert_eq!(rc.roots.len(), 48 + 56 * 216);
    }

    #[test]
    fn representatives_are_roots_of_the_right_degree() {
        let (f, rc) = classes("4tA4+2A1", 500, 3);
        let h = f.h();
        let k = f.k();
        for root in rc.roots.iter().step_by(7) {
            for r in 0..=3 {
                let v = rc.root_vector(root, r, f.rank(), f.k_index);
                assert_eq!(f.lattice.pair(&v, &v), BigRational::from_integer(BigInt::from(-2)));
                assert_eq!(f.lattice.pair(&v, &h), BigRational::from_integer(BigInt::from(r)));
                assert!(f.lattice.pair(&v, &k).is_zero());
                assert_eq!(rc.disc.class_of(&v).unwrap(), rc.class_at(root, r));
            }
        }
    }

    #[test]
    fn zero_is_never_exceptional() {
        for g in ["12tA1", "11tA1", "6tA3", "8tA2", "5tA3+A2", "4tA4+2A1"] {
            let (_, rc) = classes(g, 401, 3);
            let zero = rc.form().encode(&rc.form().zero());
            assert!(!rc.exceptional_codes().contains(&zero), "{g}");
            assert!(!rc.fractional_k_codes().contains(&zero), "{g}");
            assert!(rc.degree_d_codes().contains(&zero), "{g}");
        }
    }

    #[test]
    fn degree_d_roots_in_f_are_the_vertices() {
        let (f, rc) = classes("5tA3+2A1", 401, 3);
        let zero: HashSet<u64> = HashSet::from([rc.form().encode(&rc.form().zero())]);
        let found: Vec<Vec<BigRational>> =
            rc.roots_in(&f, &zero, 3).into_iter().filter(|r| r.degree == 3).map(|r| r.coords).collect();
        assert_eq!(found.len(), f.vertices.len());
        for (_, v) in &f.vertices {
            let v: Vec<BigRational> = v.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
            assert!(found.contains(&v));
        }
    }
}
