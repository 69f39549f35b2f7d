#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use k3_fano::fqf::QValue;
use k3_fano::geometricity::RootClasses;
use k3_fano::graph::PolarizedFano;

pub fn q(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

/// Inverse of a non-singular integer matrix by Gauss-Jordan elimination.
pub fn inverse(g: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> = g
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&x| q(x)).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("singular matrix");
        a.swap(c, p);
        let inv = BigRational::one() / a[c][c].clone();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..2 * n {
                    let t = &a[c][j] * &f;
                    a[r][j] -= t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn quad(m: &[Vec<BigRational>], x: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            s += &x[i] * v * &x[j];
        }
    }
    s
}

/// `L^∨/L` by closure of the columns of `G^{-1}` under addition modulo `L`,
/// tallied by element order and `q` modulo `2Z`.
pub fn brute_discriminant(g: &[Vec<i64>]) -> BTreeMap<(i64, i64, i64), u64> {
    let n = g.len();
    let inv = inverse(g);
    let den: BigInt = inv.iter().flatten().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let dd: i64 = den.try_into().unwrap();
    let gens: Vec<Vec<i64>> = (0..n)
        .map(|j| (0..n).map(|i| i64::try_from((&inv[i][j] * q(dd)).to_integer()).unwrap().rem_euclid(dd)).collect())
        .collect();
    let zero = vec![0i64; n];
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut stack = vec![zero];
    while let Some(x) = stack.pop() {
        for gen in &gens {
            let y: Vec<i64> = x.iter().zip(gen).map(|(a, b)| (a + b).rem_euclid(dd)).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    let mut out = BTreeMap::new();
    for y in &seen {
        let mut ord = 1;
        while y.iter().any(|&c| (c * ord) % dd != 0) {
            ord += 1;
        }
        let mut s = 0i64;
        for i in 0..n {
            for j in 0..n {
                s += y[i] * g[i][j] * y[j];
            }
        }
        let v = QValue::new(s, dd * dd, 2);
        *out.entry((ord, v.numerator(), v.denominator())).or_insert(0) += 1;
    }
    out
}

/// Dual vectors of one component lattice of norm at least `-2`, given by their
/// pairings with the component basis, together with the norm.
fn component_duals(gram: &[Vec<i64>]) -> Vec<(Vec<i64>, BigRational)> {
    let inv = inverse(gram);
    let k = gram.len();
    let mut out = Vec::new();
    let mut c = vec![-2i64; k];
    loop {
        let x: Vec<BigRational> = c.iter().map(|&v| q(v)).collect();
        let norm = quad(&inv, &x);
        if norm >= q(-2) {
            out.push((c.clone(), norm));
        }
        let mut i = 0;
        while i < k && c[i] == 2 {
            c[i] = -2;
            i += 1;
        }
        if i == k {
            break;
        }
        c[i] += 1;
    }
    out
}

/// Exceptional class codes by naive enumeration: pairings bounded by
/// Cauchy-Schwarz, per-component norms, classes of the pairing functionals.
pub fn naive_exceptional(fano: &PolarizedFano, classes: &RootClasses) -> HashSet<u64> {
    let gram = fano.lattice.gram_i64();
    let comps: Vec<(Vec<usize>, Vec<(Vec<i64>, BigRational)>)> = fano
        .component_map
        .iter()
        .map(|idx| {
            let g: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| gram[i][j]).collect()).collect();
            (idx.clone(), component_duals(&g))
        })
        .collect();
    let mut roots: Vec<Vec<i64>> = Vec::new();
    let mut y = vec![0i64; fano.rank()];
    fn walk(
        comps: &[(Vec<usize>, Vec<(Vec<i64>, BigRational)>)],
        i: usize,
        left: BigRational,
        y: &mut Vec<i64>,
        roots: &mut Vec<Vec<i64>>,
    ) {
        if left.is_zero() {
            roots.push(y.clone());
            return;
        }
        if i == comps.len() {
            return;
        }
        walk(comps, i + 1, left.clone(), y, roots);
        let (idx, duals) = &comps[i];
        for (c, norm) in duals {
            if norm.is_zero() || *norm < left {
                continue;
            }
            for (&t, &v) in idx.iter().zip(c) {
                y[t] = v;
            }
            walk(comps, i + 1, &left - norm, y, roots);
            for &t in idx {
                y[t] = 0;
            }
        }
    }
    walk(&comps, 0, q(-2), &mut y, &mut roots);
    let form = classes.form();
    let mut out = HashSet::new();
    for mut y in roots {
        for r in 0..fano.d {
            y[fano.h_index] = r;
            y[fano.k_index] = 0;
            let yb: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
            out.insert(form.encode(&classes.disc.class_of_functional(&yb)));
        }
    }
    out
}

pub fn report(criterion: u32, title: &str, ok: bool, detail: &str) {
    let mark = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {mark} {title} ({detail})");
}
