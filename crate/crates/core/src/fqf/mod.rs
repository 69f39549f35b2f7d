//! Finite quadratic forms: discriminant groups with their `Q/Z` pairing and
//! `Q/2Z` quadratic refinement.
//!
//! A form is stored on a list of generators `g_i` of orders `o_i` such that the
//! group is the direct sum `⊕ Z/o_i`. All values share one denominator, the
//! *level* `N`: `b(g_i, g_j) = bil[i][j] / N mod 1` and `q(g_i) = quad[i] / N
//! mod 2`. Comparisons are therefore modular integer comparisons.

mod discriminant;
mod invariants;
mod isotropic;
mod quotient;

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use discriminant::{discriminant_form, DiscriminantForm};
pub use invariants::{Block, BlockKind, DetClass, InvariantTuple, Parity};
pub use isotropic::{IsotropicSubgroup, LengthDrop, SearchStats, SubgroupSearch, Visit};
pub use invariants::legendre;
pub(crate) use quotient::mod_inverse;
pub use quotient::{subquotient, PerpQuotient};

/// Default bound on the number of group elements any routine will enumerate.
pub const ELEMENT_CAP: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("lattice is degenerate (zero determinant)")]
    Degenerate,
    #[error("form is degenerate")]
    DegenerateForm,
    #[error("inconsistent form data: {0}")]
    Inconsistent(String),
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("subgroup is not isotropic: q({0}) != 0")]
    NotIsotropic(String),
    #[error("expected a {0}-primary form")]
    NotPrimary(u64),
    #[error("determinant of an odd 2-adic form is undefined")]
    OddDeterminant,
    #[error("gauss sum does not snap to an eighth root of unity (distance {0})")]
    AmbiguousBrown(f64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

/// A rational number taken modulo 1 or modulo 2, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QValue {
    num: i64,
    den: i64,
    modulus: i64,
}

impl QValue {
    /// `num/den mod modulus`; `modulus` is 1 (pairings) or 2 (squares).
    pub fn new(num: i64, den: i64, modulus: i64) -> Self {
        assert!(den != 0 && (modulus == 1 || modulus == 2));
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den).max(1);
        num /= g;
        den /= g;
        let m = modulus * den;
        num = num.rem_euclid(m);
        QValue { num, den, modulus }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn from_rational(r: &BigRational, modulus: i64) -> Self {
        let den = r.denom().to_i64().expect("denominator exceeds i64");
        let m = num_bigint::BigInt::from(modulus * den);
        let num = r.numer().mod_floor(&m).to_i64().expect("numerator exceeds i64");
        QValue::new(num, den, modulus)
    }

    /// Signed representative in `(-modulus/2, modulus/2]`, as `(num, den)`.
    pub fn centered(&self) -> (i64, i64) {
        let m = self.modulus * self.den;
        if 2 * self.num > m {
            (self.num - m, self.den)
        } else {
            (self.num, self.den)
        }
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = if self.modulus == 2 { "2Z" } else { "Z" };
        if self.den == 1 {
            write!(f, "{} mod {z}", self.num)
        } else {
            write!(f, "{}/{} mod {z}", self.num, self.den)
        }
    }
}

/// A finite quadratic form on `⊕ Z/o_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteQuadraticForm {
    labels: Vec<String>,
    orders: Vec<i64>,
    level: i64,
    bil: Vec<Vec<i64>>,
    quad: Vec<i64>,
}

impl FiniteQuadraticForm {
    /// Builds a form from raw integer data over a common `level`.
    pub fn from_raw(
        labels: Vec<String>,
        orders: Vec<i64>,
        level: i64,
        bil: Vec<Vec<i64>>,
        quad: Vec<i64>,
    ) -> Result<Self, FormError> {
        let n = orders.len();
        if labels.len() != n || bil.len() != n || quad.len() != n || bil.iter().any(|r| r.len() != n) {
            return Err(FormError::Inconsistent("dimension mismatch".into()));
        }
        if level <= 0 {
            return Err(FormError::Inconsistent("level must be positive".into()));
        }
        let bil: Vec<Vec<i64>> = bil.iter().map(|r| r.iter().map(|x| x.rem_euclid(level)).collect()).collect();
        let quad: Vec<i64> = quad.iter().map(|x| x.rem_euclid(2 * level)).collect();
        for i in 0..n {
            if orders[i] <= 0 || level % orders[i] != 0 {
                return Err(FormError::Inconsistent(format!("order {} does not divide level {level}", orders[i])));
            }
            if quad[i] % level != bil[i][i] {
                return Err(FormError::Inconsistent(format!("q(g{i}) does not reduce to b(g{i},g{i})")));
            }
            let oi = orders[i] as i128;
            if (oi * oi * quad[i] as i128) % (2 * level as i128) != 0 {
                return Err(FormError::Inconsistent(format!("q is not well defined on g{i}")));
            }
            for j in 0..n {
                if bil[i][j] != bil[j][i] {
                    return Err(FormError::Inconsistent("bilinear form is not symmetric".into()));
                }
                if (oi * bil[i][j] as i128) % level as i128 != 0 {
                    return Err(FormError::Inconsistent(format!("b(g{i},g{j}) is not well defined")));
                }
            }
        }
        Ok(FiniteQuadraticForm { labels, orders, level, bil, quad })
    }

    /// Builds a form from rational values of `b` (mod 1) and `q` (mod 2).
    pub fn from_rationals(
        labels: Vec<String>,
        orders: Vec<i64>,
        bil: &[Vec<BigRational>],
        quad: &[BigRational],
    ) -> Result<Self, FormError> {
        let mut level: i64 = orders.iter().fold(1, |a, &o| a.lcm(&o));
        for r in bil.iter().flatten().chain(quad.iter()) {
            level = level.lcm(&r.denom().to_i64().ok_or_else(|| FormError::Inconsistent("denominator".into()))?);
        }
        let lv = num_bigint::BigInt::from(level);
        let scale = |r: &BigRational| -> i64 {
            let v = r * BigRational::from_integer(lv.clone());
            debug_assert!(v.is_integer());
            v.to_integer().mod_floor(&(2 * &lv)).to_i64().unwrap()
        };
        let b: Vec<Vec<i64>> = bil.iter().map(|r| r.iter().map(|x| scale(x) % level).collect()).collect();
        let q: Vec<i64> = quad.iter().map(scale).collect();
        Self::from_raw(labels, orders, level, b, q)
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_fractions(orders: &[i64], bil: &[Vec<(i64, i64)>], quad: &[(i64, i64)]) -> Result<Self, FormError> {
        let r = |(a, b): (i64, i64)| BigRational::new(a.into(), b.into());
        let b: Vec<Vec<BigRational>> = bil.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect();
        let q: Vec<BigRational> = quad.iter().map(|&x| r(x)).collect();
        let labels = (1..=orders.len()).map(|i| format!("g{i}")).collect();
        Self::from_rationals(labels, orders.to_vec(), &b, &q)
    }

    /// The cyclic form `[num/den]` on `Z/order`.
    pub fn cyclic(order: i64, num: i64, den: i64) -> Result<Self, FormError> {
        Self::from_fractions(&[order], &[vec![(num, den)]], &[(num, den)])
    }

    /// `U_{2^k}`: hyperbolic 2-adic block.
    pub fn u_block(k: u32) -> Self {
        let o = 1i64 << k;
        Self::from_fractions(&[o, o], &[vec![(0, 1), (1, o)], vec![(1, o), (0, 1)]], &[(0, 1), (0, 1)])
            .expect("U block")
    }

    /// `V_{2^k}`: anisotropic even 2-adic block.
    pub fn v_block(k: u32) -> Self {
        let o = 1i64 << k;
        Self::from_fractions(
            &[o, o],
            &[vec![(2, o), (1, o)], vec![(1, o), (2, o)]],
            &[(2, o), (2, o)],
        )
        .expect("V block")
    }

    pub fn trivial() -> Self {
        FiniteQuadraticForm { labels: vec![], orders: vec![], level: 1, bil: vec![], quad: vec![] }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Orders of the generators.
    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    /// Group order `|F|`.
    pub fn order(&self) -> u64 {
        self.orders.iter().map(|&o| o as u64).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn exponent(&self) -> i64 {
        self.orders.iter().fold(1, |a, &o| a.lcm(&o))
    }

    /// Primes dividing the group order, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.orders.iter().flat_map(|&o| prime_factors(o as u64)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Minimal number of generators of the `p`-primary part.
    pub fn length_at(&self, p: u64) -> usize {
        self.invariant_factors().iter().filter(|&&d| d as u64 % p == 0).count()
    }

    /// Minimal number of generators `ℓ(F)`.
    pub fn length(&self) -> usize {
        self.invariant_factors().iter().filter(|&&d| d > 1).count()
    }

    /// Invariant factors `d_1 | d_2 | ...` of the underlying group (no 1s).
    pub fn invariant_factors(&self) -> Vec<i64> {
        let mut powers: Vec<Vec<i64>> = Vec::new();
        for p in self.primes() {
            let mut ps: Vec<i64> = self
                .orders
                .iter()
                .map(|&o| {
                    let mut q = 1;
                    let mut o = o;
                    while o % p as i64 == 0 {
                        o /= p as i64;
                        q *= p as i64;
                    }
                    q
                })
                .filter(|&q| q > 1)
                .collect();
            ps.sort_unstable_by(|a, b| b.cmp(a));
            powers.push(ps);
        }
        let len = powers.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut out: Vec<i64> = (0..len)
            .map(|i| powers.iter().map(|v| v.get(i).copied().unwrap_or(1)).product())
            .collect();
        out.reverse();
        out
    }

    pub fn reduce(&self, x: &mut [i64]) {
        for (xi, &o) in x.iter_mut().zip(&self.orders) {
            *xi = xi.rem_euclid(o);
        }
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.orders.len()]
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), &o)| (a + b).rem_euclid(o)).collect()
    }

    pub fn scale(&self, c: i64, x: &[i64]) -> Vec<i64> {
        x.iter()
            .zip(&self.orders)
            .map(|(a, &o)| ((c as i128 * *a as i128).rem_euclid(o as i128)) as i64)
            .collect()
    }

    pub fn generator(&self, i: usize) -> Vec<i64> {
        let mut x = self.zero();
        x[i] = 1;
        x
    }

    /// `q(x)` as an integer numerator over `level`, in `[0, 2·level)`.
    pub fn q_raw(&self, x: &[i64]) -> i64 {
        let n2 = 2 * self.level as i128;
        let mut acc: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let xi = x[i] as i128;
            acc += xi * xi % n2 * self.quad[i] as i128;
            let mut cross: i128 = 0;
            for j in (i + 1)..x.len() {
                if x[j] != 0 {
                    cross += x[j] as i128 * self.bil[i][j] as i128;
                }
            }
            acc += 2 * (xi * (cross % n2));
            acc %= n2;
        }
        acc.rem_euclid(n2) as i64
    }

    /// `b(x, y)` as an integer numerator over `level`, in `[0, level)`.
    pub fn b_raw(&self, x: &[i64], y: &[i64]) -> i64 {
        let n = self.level as i128;
        let mut acc: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for j in 0..y.len() {
                if y[j] != 0 {
                    row += self.bil[i][j] as i128 * y[j] as i128;
                }
            }
            acc = (acc + x[i] as i128 * (row % n)) % n;
        }
        acc.rem_euclid(n) as i64
    }

    pub fn q(&self, x: &[i64]) -> QValue {
        QValue::new(self.q_raw(x), self.level, 2)
    }

    pub fn b(&self, x: &[i64], y: &[i64]) -> QValue {
        QValue::new(self.b_raw(x, y), self.level, 1)
    }

    pub fn is_isotropic(&self, x: &[i64]) -> bool {
        self.q_raw(x) == 0
    }

    pub fn element_order(&self, x: &[i64]) -> i64 {
        x.iter().zip(&self.orders).fold(1, |acc, (&xi, &o)| acc.lcm(&(o / xi.gcd(&o))))
    }

    /// Mixed-radix index of a reduced element.
    pub fn encode(&self, x: &[i64]) -> u64 {
        let mut code = 0u64;
        for (xi, &o) in x.iter().zip(&self.orders).rev() {
            code = code * o as u64 + xi.rem_euclid(o) as u64;
        }
        code
    }

    pub fn decode(&self, mut code: u64) -> Vec<i64> {
        self.orders
            .iter()
            .map(|&o| {
                let v = (code % o as u64) as i64;
                code /= o as u64;
                v
            })
            .collect()
    }

    /// All elements in encoding order; fails above `cap`.
    pub fn elements(&self, cap: u64) -> Result<impl Iterator<Item = Vec<i64>> + '_, FormError> {
        let order = self.order();
        if order > cap {
            return Err(FormError::CapExceeded { order, cap });
        }
        Ok((0..order).map(move |c| self.decode(c)))
    }

    /// Whether `x ↦ b(x, ·)` is injective.
    pub fn is_nondegenerate(&self) -> bool {
        let gens: Vec<Vec<i64>> = (0..self.num_generators()).map(|i| self.generator(i)).collect();
        match quotient::perp_lattice(self, &gens) {
            Ok(basis) => quotient::lattice_index(&basis) == self.order() as i128,
            Err(_) => false,
        }
    }

    /// The `p`-primary orthogonal summand together with the ambient coordinates
    /// of its generators.
    pub fn p_part(&self, p: u64) -> (FiniteQuadraticForm, Vec<Vec<i64>>) {
        let p = p as i64;
        let mut labels = Vec::new();
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        for (i, &o) in self.orders.iter().enumerate() {
            let mut pp = 1;
            let mut r = o;
            while r % p == 0 {
                r /= p;
                pp *= p;
            }
            if pp > 1 {
                let mut g = self.zero();
                g[i] = r;
                labels.push(self.labels[i].clone());
                orders.push(pp);
                gens.push(g);
            }
        }
        let form = self.restrict(labels, orders, &gens);
        (form, gens)
    }

    /// Form induced on the given generators, assumed to span an orthogonal
    /// direct sum `⊕ Z/orders_i`.
    pub(crate) fn restrict(&self, labels: Vec<String>, orders: Vec<i64>, gens: &[Vec<i64>]) -> FiniteQuadraticForm {
        let n = gens.len();
        let level = orders.iter().fold(1i64, |a, &o| a.lcm(&o)).lcm(&2);
        let mut bil = vec![vec![0i64; n]; n];
        let mut quad = vec![0i64; n];
        for i in 0..n {
            for j in 0..n {
                bil[i][j] = rescale(self.b_raw(&gens[i], &gens[j]), self.level, level, level);
            }
            quad[i] = rescale(self.q_raw(&gens[i]), self.level, level, 2 * level);
        }
        let mut f = FiniteQuadraticForm { labels, orders, level, bil, quad };
        f.tighten_level();
        f
    }

    /// Lowers the level to the smallest value that still represents every entry.
    fn tighten_level(&mut self) {
        let mut best = self.level;
        for cand in divisors(self.level) {
            if cand >= best {
                continue;
            }
            let f = self.level / cand;
            let ok = self.orders.iter().all(|&o| cand % o == 0)
                && self.bil.iter().flatten().all(|&x| x % f == 0)
                && self.quad.iter().all(|&x| x % f == 0);
            if ok {
                best = cand;
            }
        }
        if best != self.level {
            let f = self.level / best;
            for row in &mut self.bil {
                for x in row.iter_mut() {
                    *x /= f;
                }
            }
            for x in &mut self.quad {
                *x /= f;
            }
            self.level = best;
        }
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(&self, other: &FiniteQuadraticForm) -> FiniteQuadraticForm {
        let level = self.level.lcm(&other.level);
        let (a, b) = (level / self.level, level / other.level);
        let (n, m) = (self.orders.len(), other.orders.len());
        let mut bil = vec![vec![0i64; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                bil[i][j] = self.bil[i][j] * a;
            }
        }
        for i in 0..m {
            for j in 0..m {
                bil[n + i][n + j] = other.bil[i][j] * b;
            }
        }
        let quad = self.quad.iter().map(|x| x * a).chain(other.quad.iter().map(|x| x * b)).collect();
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().map(|l| format!("{l}'")));
        let mut orders = self.orders.clone();
        orders.extend(&other.orders);
        FiniteQuadraticForm { labels, orders, level, bil, quad }
    }

    /// The form with all values negated.
    pub fn negate(&self) -> FiniteQuadraticForm {
        let mut f = self.clone();
        for row in &mut f.bil {
            for x in row.iter_mut() {
                *x = (-*x).rem_euclid(self.level);
            }
        }
        for x in &mut f.quad {
            *x = (-*x).rem_euclid(2 * self.level);
        }
        f
    }

    /// Gram matrix in the generator basis: pairings mod 1 off the diagonal,
    /// squares mod 2 on it.
    pub fn gram(&self) -> Vec<Vec<QValue>> {
        let n = self.orders.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            QValue::new(self.quad[i], self.level, 2)
                        } else {
                            QValue::new(self.bil[i][j], self.level, 1)
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let groups: Vec<String> = self.orders.iter().map(|o| format!("Z/{o}")).collect();
        writeln!(f, "{}", groups.join(" + "))?;
        for row in self.gram() {
            let cells: Vec<String> = row
                .iter()
                .map(|v| {
                    let (n, d) = v.centered();
                    if d == 1 {
                        format!("{n}")
                    } else {
                        format!("{n}/{d}")
                    }
                })
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

fn rescale(value: i64, from: i64, to: i64, modulus: i64) -> i64 {
    let v = value as i128 * to as i128;
    debug_assert_eq!(v % from as i128, 0, "value {value}/{from} not representable over {to}");
    ((v / from as i128).rem_euclid(modulus as i128)) as i64
}

fn divisors(n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            out.push(i);
            if i * i != n {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// Distinct prime factors, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}
