//! Orthogonal block splitting and the invariants read off from it:
//! parity at 2, determinant modulo squares and the Brown invariant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::quotient::mod_inverse;
use super::{FiniteQuadraticForm, FormError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// `[a/m]`; `numerator` is `a mod 2m`.
    Cyclic { numerator: i64 },
    /// Hyperbolic 2-adic plane.
    U,
    /// Anisotropic even 2-adic plane.
    V,
}

/// An elementary orthogonal summand on `Z/order` or `(Z/order)^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub p: u64,
    pub order: i64,
    pub kind: BlockKind,
    /// Generators, in coordinates of the decomposed form.
    pub generators: Vec<Vec<i64>>,
}

impl Block {
    /// `|B|·det B` as an integer unit: reduced mod 8 at 2, a representative
    /// modulo `p` otherwise.
    pub fn unit(&self) -> i64 {
        match self.kind {
            BlockKind::Cyclic { numerator } if self.p == 2 => numerator.rem_euclid(8),
            BlockKind::Cyclic { numerator } => numerator.rem_euclid(self.p as i64),
            BlockKind::U => 7,
            BlockKind::V => 3,
        }
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            BlockKind::Cyclic { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Determinant class modulo squares of units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetClass {
    /// Legendre symbol of the unit, odd `p`.
    Legendre(i8),
    /// Unit modulo 8, `p = 2`.
    Mod8(u8),
}

impl FiniteQuadraticForm {
    /// Splits every primary part into cyclic blocks and (at 2) `U`/`V` planes.
    pub fn block_decompose(&self) -> Result<Vec<Block>, FormError> {
        let mut out = Vec::new();
        for p in self.primes() {
            let (_, gens) = self.p_part(p);
            let basis: Vec<(Vec<i64>, i64)> = gens.into_iter().map(|g| {
                let o = self.element_order(&g);
                (g, o)
            }).collect();
            out.extend(self.decompose_primary(p, basis)?);
        }
        Ok(out)
    }

    /// Blocks of the `p`-primary part only.
    pub fn blocks_at(&self, p: u64) -> Result<Vec<Block>, FormError> {
        let (_, gens) = self.p_part(p);
        let basis = gens.into_iter().map(|g| {
            let o = self.element_order(&g);
            (g, o)
        }).collect();
        self.decompose_primary(p, basis)
    }

    fn decompose_primary(&self, p: u64, mut basis: Vec<(Vec<i64>, i64)>) -> Result<Vec<Block>, FormError> {
        let pi = p as i64;
        let mut blocks = Vec::new();
        loop {
            basis.retain(|(_, o)| *o > 1);
            if basis.is_empty() {
                return Ok(blocks);
            }
            let m = basis.iter().map(|(_, o)| *o).max().unwrap();
            let top: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].1 == m).collect();
            let bm = |x: &[i64], y: &[i64]| -> i64 { self.scaled_b(x, y, m) };
            let qm = |x: &[i64]| -> i64 { self.scaled_q(x, m) };

            let mut cyclic: Option<(Vec<i64>, usize)>;
            if p == 2 {
                cyclic = top.iter().find(|&&i| qm(&basis[i].0) % 2 != 0).map(|&i| (basis[i].0.clone(), i));
            } else {
                cyclic = top.iter().find(|&&i| bm(&basis[i].0, &basis[i].0) % pi != 0).map(|&i| (basis[i].0.clone(), i));
                if cyclic.is_none() {
                    'pairs: for (a, &i) in top.iter().enumerate() {
                        for &j in &top[a + 1..] {
                            let x = self.add(&basis[i].0, &basis[j].0);
                            if bm(&x, &x) % pi != 0 {
                                cyclic = Some((x, i));
                                break 'pairs;
                            }
                        }
                    }
                }
            }
            if let Some((x, pivot)) = cyclic {
                let a_inv = mod_inverse(bm(&x, &x), m);
                for (k, (g, _)) in basis.iter_mut().enumerate() {
                    if k == pivot {
                        continue;
                    }
                    let t = (bm(g, &x) as i128 * a_inv as i128).rem_euclid(m as i128) as i64;
                    *g = self.add(g, &self.scale(-t, &x));
                }
                blocks.push(Block { p, order: m, kind: BlockKind::Cyclic { numerator: qm(&x) }, generators: vec![x] });
                basis.remove(pivot);
                continue;
            }
            if p != 2 {
                return Err(FormError::DegenerateForm);
            }
            let mut plane = None;
            'find: for (a, &i) in top.iter().enumerate() {
                for &j in &top[a + 1..] {
                    if bm(&basis[i].0, &basis[j].0) % 2 != 0 {
                        plane = Some((i, j));
                        break 'find;
                    }
                }
            }
            let Some((i, j)) = plane else {
                return Err(FormError::DegenerateForm);
            };
            let (x1, x2) = (basis[i].0.clone(), basis[j].0.clone());
            let (a, b, c) = (bm(&x1, &x1), bm(&x1, &x2), bm(&x2, &x2));
            let det = (a as i128 * c as i128 - b as i128 * b as i128).rem_euclid(m as i128) as i64;
            let dinv = mod_inverse(det, m) as i128;
            let mi = m as i128;
            // inverse of [[a, b], [b, c]] mod m
            let inv = [
                [(c as i128 * dinv).rem_euclid(mi), (-b as i128 * dinv).rem_euclid(mi)],
                [(-b as i128 * dinv).rem_euclid(mi), (a as i128 * dinv).rem_euclid(mi)],
            ];
            for (k, (g, _)) in basis.iter_mut().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let (u, v) = (bm(g, &x1) as i128, bm(g, &x2) as i128);
                let s = ((inv[0][0] * u + inv[0][1] * v).rem_euclid(mi)) as i64;
                let t = ((inv[1][0] * u + inv[1][1] * v).rem_euclid(mi)) as i64;
                let shift = self.add(&self.scale(s, &x1), &self.scale(t, &x2));
                *g = self.add(g, &self.scale(-1, &shift));
            }
            let (qa, qc) = (qm(&x1), qm(&x2));
            let kind = if ((qa / 2) * (qc / 2)) % 2 == 0 { BlockKind::U } else { BlockKind::V };
            blocks.push(Block { p, order: m, kind, generators: vec![x1, x2] });
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            basis.remove(hi);
            basis.remove(lo);
        }
    }

    /// `m·b(x, y)` as an integer mod `m` (requires `m·b(x,y)` integral).
    pub(crate) fn scaled_b(&self, x: &[i64], y: &[i64], m: i64) -> i64 {
        let v = self.b_raw(x, y) as i128 * m as i128;
        debug_assert_eq!(v % self.level() as i128, 0);
        ((v / self.level() as i128).rem_euclid(m as i128)) as i64
    }

    /// `m·q(x)` as an integer mod `2m`.
    pub(crate) fn scaled_q(&self, x: &[i64], m: i64) -> i64 {
        let v = self.q_raw(x) as i128 * m as i128;
        debug_assert_eq!(v % self.level() as i128, 0);
        ((v / self.level() as i128).rem_euclid(2 * m as i128)) as i64
    }

    /// Parity of the 2-primary part.
    pub fn parity2(&self) -> Result<Parity, FormError> {
        let odd = self
            .blocks_at(2)?
            .iter()
            .any(|b| b.order == 2 && matches!(b.kind, BlockKind::Cyclic { .. }));
        Ok(if odd { Parity::Odd } else { Parity::Even })
    }

    /// Parity at 2 by scanning the 2-torsion; independent of the splitting.
    pub fn parity2_bruteforce(&self) -> Parity {
        let (f2, _) = self.p_part(2);
        let tors: Vec<Vec<i64>> = (0..f2.num_generators())
            .map(|i| {
                let mut g = f2.zero();
                g[i] = f2.orders()[i] / 2;
                g
            })
            .collect();
        for mask in 1u64..(1u64 << tors.len()) {
            let mut x = f2.zero();
            for (i, t) in tors.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    x = f2.add(&x, t);
                }
            }
            if f2.scaled_q(&x, 2) % 2 != 0 {
                return Parity::Odd;
            }
        }
        Parity::Even
    }

    /// `|F_p|·det F_p` modulo squares of `p`-adic units.
    pub fn det_mod_squares(&self, p: u64) -> Result<DetClass, FormError> {
        let blocks = self.blocks_at(p)?;
        if p == 2 {
            if blocks.iter().any(|b| b.order == 2 && matches!(b.kind, BlockKind::Cyclic { .. })) {
                return Err(FormError::OddDeterminant);
            }
            let u = blocks.iter().fold(1i64, |acc, b| (acc * b.unit()) % 8);
            Ok(DetClass::Mod8(u as u8))
        } else {
            let s = blocks.iter().fold(1i8, |acc, b| acc * legendre(b.unit(), p));
            Ok(DetClass::Legendre(s))
        }
    }

    /// Brown invariant (signature mod 8) from the Gauss sums of the blocks.
    pub fn brown(&self) -> Result<u8, FormError> {
        let mut total = (1.0f64, 0.0f64);
        for b in self.block_decompose()? {
            let sub: Vec<(Vec<i64>, i64)> = b.generators.iter().map(|g| (g.clone(), b.order)).collect();
            let s = self.gauss_sum_on(&sub);
            total = cmul(total, s);
        }
        snap_eighth_root(total)
    }

    /// Brown invariant from the Gauss sum over the whole group.
    pub fn brown_bruteforce(&self, cap: u64) -> Result<u8, FormError> {
        let (mut re, mut im) = (0.0, 0.0);
        for x in self.elements(cap)? {
            let ang = std::f64::consts::PI * self.q_raw(&x) as f64 / self.level() as f64;
            re += ang.cos();
            im += ang.sin();
        }
        let n = (self.order() as f64).sqrt();
        snap_eighth_root((re / n, im / n))
    }

    /// Normalised Gauss sum over the subgroup `⊕ Z/o_i · g_i`.
    fn gauss_sum_on(&self, gens: &[(Vec<i64>, i64)]) -> (f64, f64) {
        let total: i64 = gens.iter().map(|(_, o)| *o).product();
        let (mut re, mut im) = (0.0, 0.0);
        let mut coeff = vec![0i64; gens.len()];
        for _ in 0..total {
            let mut x = self.zero();
            for (c, (g, _)) in coeff.iter().zip(gens) {
                if *c != 0 {
                    x = self.add(&x, &self.scale(*c, g));
                }
            }
            let ang = std::f64::consts::PI * self.q_raw(&x) as f64 / self.level() as f64;
            re += ang.cos();
            im += ang.sin();
            for (c, (_, o)) in coeff.iter_mut().zip(gens) {
                *c += 1;
                if *c < *o {
                    break;
                }
                *c = 0;
            }
        }
        let n = (total as f64).sqrt();
        (re / n, im / n)
    }
}

/// Isomorphism invariants used in place of a full normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantTuple {
    /// Prime-power orders of a primary cyclic decomposition, ascending.
    pub cyclic_orders: Vec<i64>,
    /// `(element order, q numerator, q denominator) -> count`.
    pub q_distribution: BTreeMap<(i64, i64, i64), u64>,
    pub parity: Parity,
    pub brown: u8,
    /// Determinant class per prime, `None` where undefined.
    pub dets: Vec<(u64, Option<DetClass>)>,
}

impl FiniteQuadraticForm {
    pub fn invariant_tuple(&self, cap: u64) -> Result<InvariantTuple, FormError> {
        let mut cyclic_orders: Vec<i64> = Vec::new();
        for p in self.primes() {
            let (fp, _) = self.p_part(p);
            cyclic_orders.extend(fp.orders().iter().copied());
        }
        cyclic_orders.sort_unstable();
        let mut q_distribution = BTreeMap::new();
        for x in self.elements(cap)? {
            let q = self.q(&x);
            *q_distribution.entry((self.element_order(&x), q.numerator(), q.denominator())).or_insert(0) += 1;
        }
        let dets = self
            .primes()
            .into_iter()
            .map(|p| Ok((p, match self.det_mod_squares(p) {
                Ok(d) => Some(d),
                Err(FormError::OddDeterminant) => None,
                Err(e) => return Err(e),
            })))
            .collect::<Result<_, FormError>>()?;
        Ok(InvariantTuple { cyclic_orders, q_distribution, parity: self.parity2()?, brown: self.brown()?, dets })
    }

    /// Isomorphism test by comparison of invariant tuples.
    pub fn same_invariants(&self, other: &FiniteQuadraticForm, cap: u64) -> Result<bool, FormError> {
        Ok(self.invariant_tuple(cap)? == other.invariant_tuple(cap)?)
    }
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn snap_eighth_root(z: (f64, f64)) -> Result<u8, FormError> {
    let mut best = (f64::INFINITY, 0u8);
    for k in 0..8u8 {
        let ang = std::f64::consts::PI * k as f64 / 4.0;
        let d = ((z.0 - ang.cos()).powi(2) + (z.1 - ang.sin()).powi(2)).sqrt();
        if d < best.0 {
            best = (d, k);
        }
    }
    if best.0 > 1e-6 {
        return Err(FormError::AmbiguousBrown(best.0));
    }
    Ok(best.1)
}

/// Legendre symbol `(a/p)` for an odd prime `p`; `0` when `p | a`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let p = p as i128;
    let a = (a as i128).rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut result = 1i128;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_brown_values() {
        // <1/2> has Gauss sum (1 + i)/sqrt 2
        assert_eq!(FiniteQuadraticForm::cyclic(2, 1, 2).unwrap().brown().unwrap(), 1);
        assert_eq!(FiniteQuadraticForm::cyclic(2, 3, 2).unwrap().brown().unwrap(), 7);
        assert_eq!(FiniteQuadraticForm::u_block(1).brown().unwrap(), 0);
        assert_eq!(FiniteQuadraticForm::v_block(1).brown().unwrap(), 4);
        // V_{2^k} contributes 4k
        assert_eq!(FiniteQuadraticForm::v_block(2).brown().unwrap(), 0);
        assert_eq!(FiniteQuadraticForm::v_block(3).brown().unwrap(), 4);
        for f in [FiniteQuadraticForm::v_block(2), FiniteQuadraticForm::v_block(3), FiniteQuadraticForm::cyclic(8, 5, 8).unwrap()] {
            assert_eq!(f.brown().unwrap(), f.brown_bruteforce(1 << 10).unwrap());
        }
    }

    #[test]
    fn classifies_planes() {
        let u = FiniteQuadraticForm::u_block(2);
        let b = u.block_decompose().unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kind, BlockKind::U);
        assert_eq!(u.det_mod_squares(2).unwrap(), DetClass::Mod8(7));
        let v = FiniteQuadraticForm::v_block(1);
        assert_eq!(v.det_mod_squares(2).unwrap(), DetClass::Mod8(3));
        assert_eq!(v.parity2().unwrap(), Parity::Even);
        let w = FiniteQuadraticForm::cyclic(2, 1, 2).unwrap();
        assert_eq!(w.parity2().unwrap(), Parity::Odd);
        assert_eq!(w.det_mod_squares(2), Err(FormError::OddDeterminant));
    }

    #[test]
    fn odd_prime_blocks() {
        // A2 discriminant, q = 4/3: numerator 4, Legendre(4/3) = 1
        let f = FiniteQuadraticForm::cyclic(3, 4, 3).unwrap();
        assert_eq!(f.det_mod_squares(3).unwrap(), DetClass::Legendre(1));
        let g = FiniteQuadraticForm::cyclic(3, 2, 3).unwrap();
        assert_eq!(g.det_mod_squares(3).unwrap(), DetClass::Legendre(-1));
        // hyperbolic-looking 3-form [[0,1/3],[1/3,0]] needs the pair-sum step
        let h = FiniteQuadraticForm::from_fractions(&[3, 3], &[vec![(0, 1), (1, 3)], vec![(1, 3), (0, 1)]], &[(0, 1), (0, 1)])
            .unwrap();
        let blocks = h.block_decompose().unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(h.brown().unwrap(), h.brown_bruteforce(100).unwrap());
    }

    #[test]
    fn legendre_symbols() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 3), -1);
        assert_eq!(legendre(6, 3), 0);
    }
}
