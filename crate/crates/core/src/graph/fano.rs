use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ComponentKind, ConfigGraph};
use crate::lattice::{GramLattice, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanoError {
    #[error("graph has no affine component")]
    NotParabolic,
    #[error("affine components have different degrees")]
    DegreeMismatch,
    #[error("polarization 2n = {0} must exceed 4")]
    SmallPolarization(i64),
    #[error("curve degree must be positive")]
    BadDegree,
    #[error("auxiliary vector only defined for mÃ2+sA1 and mÃ4+sA1")]
    UnsupportedShape,
}

/// Position of a vertex of Γ: connected component and index along it
/// (`a^0..a^k` on an affine cycle, `1..k` on a chain).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexRef {
    pub component: usize,
    pub position: usize,
}

/// `F^d_{2n}(Γ) = (ZΓ + Zh)/ker` in the basis `h, k`, then per component
/// `a^1..a^k` (affine, `a^0 = k - Σ a^r`) or every vertex (finite).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolarizedFano {
    pub graph: ConfigGraph,
    pub lattice: GramLattice,
    pub n: i64,
    pub d: i64,
    /// Common degree `deg(Σ)` of the affine components.
    pub f: i64,
    pub h_index: usize,
    pub k_index: usize,
    /// Basis indices belonging to each connected component.
    pub component_map: Vec<Vec<usize>>,
    /// Kind and index of each connected component.
    pub component_kinds: Vec<(ComponentKind, usize)>,
    /// Integral coordinates of every vertex of Γ.
    pub vertices: Vec<(VertexRef, Vec<i64>)>,
}

pub fn fano_lattice(graph: &ConfigGraph, n: i64, d: i64) -> Result<PolarizedFano, FanoError> {
    PolarizedFano::new(graph, n, d)
}

impl PolarizedFano {
    pub fn new(graph: &ConfigGraph, n: i64, d: i64) -> Result<Self, FanoError> {
        if !graph.is_parabolic() {
            return Err(FanoError::NotParabolic);
        }
        let f = graph.degree().ok_or(FanoError::DegreeMismatch)? as i64;
        if 2 * n <= 4 {
            return Err(FanoError::SmallPolarization(2 * n));
        }
        if d < 1 {
            return Err(FanoError::BadDegree);
        }
        let comps = graph.expanded();
        let rank = 2 + comps.iter().map(|&(_, i)| i).sum::<usize>();
        let mut labels = vec!["h".to_string(), "k".to_string()];
        let mut component_map = Vec::new();
        let mut vertices = Vec::new();
        let mut next = 2;
        let (mut na, mut nb) = (0, 0);
        for (c, &(kind, index)) in comps.iter().enumerate() {
            let idx: Vec<usize> = (next..next + index).collect();
            next += index;
            match kind {
                ComponentKind::Affine => {
                    na += 1;
                    labels.extend((1..=index).map(|r| format!("a{na}^{r}")));
                    let mut v0 = vec![0i64; rank];
                    v0[1] = 1;
                    for &j in &idx {
                        v0[j] = -1;
                    }
                    vertices.push((VertexRef { component: c, position: 0 }, v0));
                    for (r, &j) in idx.iter().enumerate() {
                        let mut v = vec![0i64; rank];
                        v[j] = 1;
                        vertices.push((VertexRef { component: c, position: r + 1 }, v));
                    }
                }
                ComponentKind::Finite => {
                    nb += 1;
                    if index == 1 {
                        labels.push(format!("b{nb}"));
                    } else {
                        labels.extend((1..=index).map(|r| format!("b{nb}^{r}")));
                    }
                    for (r, &j) in idx.iter().enumerate() {
                        let mut v = vec![0i64; rank];
                        v[j] = 1;
                        vertices.push((VertexRef { component: c, position: r + 1 }, v));
                    }
                }
            }
            component_map.push(idx);
        }
        let mut gram = vec![vec![BigInt::zero(); rank]; rank];
        gram[0][0] = BigInt::from(2 * n);
        gram[0][1] = BigInt::from(d * f);
        gram[1][0] = BigInt::from(d * f);
        for idx in &component_map {
            for (r, &j) in idx.iter().enumerate() {
                gram[0][j] = BigInt::from(d);
                gram[j][0] = BigInt::from(d);
                gram[j][j] = BigInt::from(-2);
                if r > 0 {
                    gram[j - 1][j] = BigInt::one();
                    gram[j][j - 1] = BigInt::one();
                }
            }
        }
        let lattice = GramLattice::new(labels, gram).expect("Fano Gram is even and symmetric");
        Ok(PolarizedFano {
            graph: graph.clone(),
            lattice,
            n,
            d,
            f,
            h_index: 0,
            k_index: 1,
            component_map,
            component_kinds: comps,
            vertices,
        })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    fn unit(&self, i: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.rank()];
        v[i] = BigRational::one();
        v
    }

    pub fn h(&self) -> Vec<BigRational> {
        self.unit(self.h_index)
    }

    pub fn k(&self) -> Vec<BigRational> {
        self.unit(self.k_index)
    }

    /// `κ̂ = k / deg(Σ)`.
    pub fn kappa(&self) -> Vec<BigRational> {
        let mut v = self.k();
        v[self.k_index] = BigRational::new(BigInt::one(), BigInt::from(self.f));
        v
    }

    /// Indices of the `∂Γ` generators (everything except `h` and `k`).
    pub fn root_indices(&self) -> Vec<usize> {
        (2..self.rank()).collect()
    }

    /// `Z∂Γ` with the induced (negative definite) form.
    pub fn root_lattice(&self) -> GramLattice {
        let idx = self.root_indices();
        let labels = idx.iter().map(|&i| self.lattice.labels()[i].clone()).collect();
        let gram = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| self.lattice.entry(i, j).clone()).collect())
            .collect();
        GramLattice::new(labels, gram).expect("sublattice of an even lattice")
    }

    /// `ℏ = h + d Σ a_i* + (d/2) b` for `mÃ_{p-1} ⊕ sA1`, `p ∈ {3, 5}`.
    pub fn hbar(&self) -> Result<Vec<BigRational>, FanoError> {
        let (p, _, _) = self.graph.auxiliary_shape().ok_or(FanoError::UnsupportedShape)?;
        let marks: &[i64] = if p == 3 { &[1, 1] } else { &[2, 3, 3, 2] };
        let mut v = self.h();
        let d = BigInt::from(self.d);
        for (c, idx) in self.component_map.iter().enumerate() {
            match self.component_kinds[c].0 {
                ComponentKind::Affine => {
                    for (&j, &m) in idx.iter().zip(marks) {
                        v[j] = BigRational::from_integer(&d * m);
                    }
                }
                ComponentKind::Finite => {
                    v[idx[0]] = BigRational::new(d.clone(), BigInt::from(2));
                }
            }
        }
        Ok(v)
    }

    pub fn hbar_square(&self) -> Result<BigRational, FanoError> {
        let v = self.hbar()?;
        Ok(self.lattice.pair(&v, &v))
    }

    /// Gram of `mA_{p-1} ⊕ sA1 ⊕ (Zk + Zℏ)`; rational when `ℏ²` is.
    pub fn auxiliary_gram(&self) -> Result<(Vec<String>, Matrix<BigRational>), FanoError> {
        let (p, _, _) = self.graph.auxiliary_shape().ok_or(FanoError::UnsupportedShape)?;
        let roots = self.root_lattice();
        let r = roots.rank();
        let mut labels: Vec<String> = roots.labels().to_vec();
        labels.push("k".into());
        labels.push("hbar".into());
        let mut g = vec![vec![BigRational::zero(); r + 2]; r + 2];
        for i in 0..r {
            for j in 0..r {
                g[i][j] = BigRational::from_integer(roots.entry(i, j).clone());
            }
        }
        let pd = BigRational::from_integer(BigInt::from(p as i64 * self.d));
        g[r][r + 1] = pd.clone();
        g[r + 1][r] = pd;
        g[r + 1][r + 1] = self.hbar_square()?;
        Ok((labels, g))
    }
}

/// Closed form `ℏ² = 2n + (c_p m + s/2) d²` with `c_3 = 2`, `c_5 = 10`.
pub fn hbar_square(graph: &ConfigGraph, n: i64, d: i64) -> Result<BigRational, FanoError> {
    let (p, m, s) = graph.auxiliary_shape().ok_or(FanoError::UnsupportedShape)?;
    let c = if p == 3 { 2 } else { 10 };
    let d2 = BigInt::from(d) * d;
    Ok(BigRational::from_integer(BigInt::from(2 * n) + &d2 * (c * m as i64))
        + BigRational::new(d2 * s as i64, BigInt::from(2)))
}

impl PolarizedFano {
    fn vertex_coords(&self, c: usize, position: usize) -> &[i64] {
        &self
            .vertices
            .iter()
            .find(|(v, _)| v.component == c && v.position == position)
            .expect("vertex exists")
            .1
    }

    /// Isometry of `F` induced by a permutation of the vertices of Γ, as the
    /// integral images of the basis vectors (`h` and `k` are fixed).
    fn induced(&self, image: impl Fn(usize, usize) -> (usize, usize)) -> Vec<Vec<i64>> {
        let rank = self.rank();
        let mut out: Vec<Vec<i64>> = (0..2)
            .map(|i| {
                let mut e = vec![0i64; rank];
                e[i] = 1;
                e
            })
            .collect();
        for (c, idx) in self.component_map.iter().enumerate() {
            for r in 0..idx.len() {
                let (c2, r2) = image(c, r + 1);
                out.push(self.vertex_coords(c2, r2).to_vec());
            }
        }
        out
    }

    /// Generators of the group of graph automorphisms acting on `F`: swaps of
    /// neighbouring equal components, rotations and reflections of cycles, and
    /// reversals of chains.
    pub fn automorphism_generators(&self) -> Vec<Vec<Vec<i64>>> {
        let kinds = &self.component_kinds;
        let mut gens = Vec::new();
        for c in 1..kinds.len() {
            if kinds[c] == kinds[c - 1] {
                gens.push(self.induced(|i, r| {
                    let j = if i == c { c - 1 } else if i == c - 1 { c } else { i };
                    (j, r)
                }));
            }
        }
        for (c, &(kind, index)) in kinds.iter().enumerate() {
            // one representative per block of equal components suffices
            if c > 0 && kinds[c - 1] == kinds[c] {
                continue;
            }
            match kind {
                ComponentKind::Affine => {
                    let size = index + 1;
                    gens.push(self.induced(|i, r| if i == c { (i, (r + 1) % size) } else { (i, r) }));
                    if index > 1 {
                        gens.push(self.induced(|i, r| if i == c { (i, (size - r) % size) } else { (i, r) }));
                    }
                }
                ComponentKind::Finite if index > 1 => {
                    gens.push(self.induced(|i, r| if i == c { (i, index + 1 - r) } else { (i, r) }));
                }
                ComponentKind::Finite => {}
            }
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqf::discriminant_form;
    use crate::lattice::Signature;
    use num_traits::Signed;

    fn fano(g: &str, n: i64, d: i64) -> PolarizedFano {
        fano_lattice(&ConfigGraph::parse(g).unwrap(), n, d).unwrap()
    }

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn twelve_a1() {
        for d in [1, 3, 5] {
            let f = fano("12tA1", 11, d);
            assert_eq!(f.rank(), 14);
            assert_eq!(f.lattice.det(), -(int(1) << 14usize) * int(d * d));
            assert_eq!(f.lattice.signature(), Signature::new(1, 13, 0));
        }
    }

    #[test]
    fn vertices_satisfy_the_defining_relations() {
        let f = fano("5tA3+2A1", 13, 3);
        let h: Vec<BigInt> = f.h().iter().map(|x| x.to_integer()).collect();
        let k: Vec<BigInt> = f.k().iter().map(|x| x.to_integer()).collect();
        assert_eq!(f.lattice.pair_int(&k, &k), int(0));
        assert_eq!(f.lattice.pair_int(&h, &k), int(12));
        assert_eq!(f.vertices.len(), 22);
        let vs: Vec<Vec<BigInt>> = f.vertices.iter().map(|(_, v)| v.iter().map(|&x| int(x)).collect()).collect();
        let zg = f.graph.graph_lattice();
        for (i, v) in vs.iter().enumerate() {
            assert_eq!(f.lattice.pair_int(&h, v), int(3));
            for (j, w) in vs.iter().enumerate() {
                assert_eq!(&f.lattice.pair_int(v, w), zg.entry(i, j));
            }
        }
        let kappa = f.kappa();
        assert_eq!(f.lattice.pair(&kappa, &f.h()), BigRational::from_integer(int(3)));
    }

    #[test]
    fn hbar_values() {
        for (g, n, d, extra) in [("8tA2", 20, 3, 16), ("8tA2", 7, 5, 16), ("4tA4+2A1", 31, 3, 41), ("7tA2+A1", 40, 7, 0)] {
            let f = fano(g, n, d);
            let sq = f.hbar_square().unwrap();
            assert_eq!(sq, hbar_square(&f.graph, n, d).unwrap());
            if extra > 0 {
                assert_eq!(sq, BigRational::from_integer(int(2 * n + extra * d * d)));
            }
        }
        assert_eq!(
            hbar_square(&ConfigGraph::parse("7tA2+A1").unwrap(), 40, 7).unwrap(),
            BigRational::new(int(2 * (80 + 14 * 49) + 49), int(2))
        );
        let f = fano("8tA2", 20, 3);
        assert_eq!(f.rank(), 18);
        // ℏ is orthogonal to every root of ∂Γ
        let hb = f.hbar().unwrap();
        for i in f.root_indices() {
            assert!(f.lattice.pair(&hb, &f.unit(i)).is_zero());
        }
        assert!(fano("5tA3+A2", 20, 3).hbar().is_err());
    }

    #[test]
    fn discriminant_orders() {
        for (g, p, m, s) in [("8tA2", 3, 8, 0), ("7tA2+A1", 3, 7, 1), ("6tA2+3A1", 3, 6, 3), ("4tA4+2A1", 5, 4, 2)] {
            for (n, d) in [(31, 3), (37, 5), (50, 1)] {
                let f = fano(g, n, d);
                let expected = int(p).pow(2 + m) * (int(1) << (s as usize)) * int(d * d);
                assert_eq!(f.lattice.det().abs(), expected);
                let (_, aux) = f.auxiliary_gram().unwrap();
                assert_eq!(det_rational(&aux).abs(), BigRational::from_integer(expected.clone()));
                let disc = discriminant_form(&f.lattice).unwrap();
                assert_eq!(BigInt::from(disc.form().order()), expected);
                assert_eq!(f.lattice.signature(), Signature::new(1, f.rank() - 1, 0));
                if s == 0 {
                    assert_eq!(det_rational(&aux), BigRational::from_integer(f.lattice.det()));
                }
            }
        }
    }

    #[test]
    fn automorphisms_are_isometries() {
        for g in ["12tA1", "4tA4+2A1", "5tA3+A2", "6tA2+3A1"] {
            let f = fano(g, 40, 3);
            let gram = f.lattice.gram_i64();
            let gens = f.automorphism_generators();
            assert!(!gens.is_empty());
            for m in gens {
                for i in 0..f.rank() {
                    for j in 0..f.rank() {
                        let v: i64 = (0..f.rank())
                            .flat_map(|a| (0..f.rank()).map(move |b| (a, b)))
                            .map(|(a, b)| m[i][a] * gram[a][b] * m[j][b])
                            .sum();
                        assert_eq!(v, gram[i][j]);
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_order() {
        let f = fano("6tA3", 13, 3);
        let disc = discriminant_form(&f.lattice).unwrap();
        let c = disc.class_of(&f.kappa()).unwrap();
        assert_eq!(disc.form().element_order(&c), 4);
    }

    #[test]
    fn errors() {
        let g = ConfigGraph::parse("tA2+tA3").unwrap();
        assert_eq!(fano_lattice(&g, 10, 1).unwrap_err(), FanoError::DegreeMismatch);
        let g = ConfigGraph::parse("3A2").unwrap();
        assert_eq!(fano_lattice(&g, 10, 1).unwrap_err(), FanoError::NotParabolic);
        let g = ConfigGraph::parse("tA2").unwrap();
        assert_eq!(fano_lattice(&g, 2, 1).unwrap_err(), FanoError::SmallPolarization(4));
    }

    fn det_rational(m: &Matrix<BigRational>) -> BigRational {
        let n = m.len();
        let mut a = m.clone();
        let mut sign = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                a.swap(p, c);
                sign = -sign;
            }
            for r in c + 1..n {
                let t = &a[r][c] / &a[c][c];
                for j in c..n {
                    let v = &t * &a[c][j];
                    a[r][j] -= v;
                }
            }
        }
        (0..n).fold(sign, |acc, i| acc * &a[i][i])
    }
}
