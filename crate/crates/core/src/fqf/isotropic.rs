//! Isotropic elements and subgroups, and the breadth-first kernel search.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::quotient::{subquotient, PerpQuotient};
use super::{DetClass, FiniteQuadraticForm, FormError, ELEMENT_CAP};

/// An isotropic subgroup, stored by generators and by its sorted element codes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropicSubgroup {
    pub generators: Vec<Vec<i64>>,
    elements: Vec<u64>,
}

impl IsotropicSubgroup {
    /// The subgroup generated by `gens`; fails unless every element is isotropic.
    pub fn generated(form: &FiniteQuadraticForm, gens: &[Vec<i64>]) -> Result<Self, FormError> {
        let mut seen: HashSet<u64> = HashSet::from([form.encode(&form.zero())]);
        let mut elems = vec![form.zero()];
        for g in gens {
            let mut frontier = elems.clone();
            while let Some(x) = frontier.pop() {
                let y = form.add(&x, g);
                if seen.insert(form.encode(&y)) {
                    if !form.is_isotropic(&y) {
                        return Err(FormError::NotIsotropic(format!("{y:?}")));
                    }
                    elems.push(y.clone());
                    frontier.push(y);
                }
            }
            if seen.len() as u64 > ELEMENT_CAP {
                return Err(FormError::CapExceeded { order: seen.len() as u64, cap: ELEMENT_CAP });
            }
        }
        let mut elements: Vec<u64> = seen.into_iter().collect();
        elements.sort_unstable();
        Ok(IsotropicSubgroup { generators: gens.to_vec(), elements })
    }

    pub fn trivial(form: &FiniteQuadraticForm) -> Self {
        IsotropicSubgroup { generators: vec![], elements: vec![form.encode(&form.zero())] }
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.elements.binary_search(&code).is_ok()
    }

    /// Sorted element codes in the ambient encoding.
    pub fn element_codes(&self) -> &[u64] {
        &self.elements
    }
}

/// Decision returned by a search visitor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    /// Keep extending this subgroup.
    Continue,
    /// Do not extend this subgroup.
    Prune,
    /// Abort the whole search.
    Stop,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub depth: usize,
    pub stopped: bool,
    /// Level-one orbit representatives kept after symmetry reduction.
    pub first_level_orbits: usize,
}

type Exclusion<'a> = dyn Fn(&[i64]) -> bool + Sync + 'a;

/// Breadth-first enumeration of isotropic subgroups of a `p`-primary form,
/// built along chains of order-`p` extensions. Subgroups are visited in order
/// of increasing size, each exactly once (up to the optional symmetry
/// reduction of the first level).
pub struct SubgroupSearch<'a> {
    form: &'a FiniteQuadraticForm,
    p: u64,
    exclusion: Option<&'a Exclusion<'a>>,
    symmetries: Vec<Vec<Vec<i64>>>,
    max_depth: usize,
    node_cap: u64,
}

impl<'a> SubgroupSearch<'a> {
    pub fn new(form: &'a FiniteQuadraticForm, p: u64) -> Result<Self, FormError> {
        if form.primes().iter().any(|&q| q != p) {
            return Err(FormError::NotPrimary(p));
        }
        Ok(SubgroupSearch { form, p, exclusion: None, symmetries: vec![], max_depth: usize::MAX, node_cap: 2_000_000 })
    }

    /// Subgroups containing an element with `excluded(x)` are skipped, together
    /// with all their extensions.
    pub fn exclude(mut self, excluded: &'a Exclusion<'a>) -> Self {
        self.exclusion = Some(excluded);
        self
    }

    /// Automorphisms of the form (images of the generators) used to identify
    /// equivalent cyclic subgroups at the first level. They must preserve the
    /// exclusion set.
    pub fn symmetries(mut self, images: Vec<Vec<Vec<i64>>>) -> Self {
        self.symmetries = images;
        self
    }

    /// Maximal number of order-`p` extension steps (`|K| ≤ p^depth`).
    pub fn max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn node_cap(mut self, cap: u64) -> Self {
        self.node_cap = cap;
        self
    }

    fn excluded(&self, x: &[i64]) -> bool {
        self.exclusion.is_some_and(|f| f(x))
    }

    fn apply(&self, sym: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
        let f = self.form;
        let mut y = f.zero();
        for (c, img) in x.iter().zip(sym) {
            if *c != 0 {
                y = f.add(&y, &f.scale(*c, img));
            }
        }
        y
    }

    fn line_code(&self, x: &[i64]) -> u64 {
        (1..self.p as i64).map(|j| self.form.encode(&self.form.scale(j, x))).min().unwrap()
    }

    /// Runs the search; `visit` sees every admissible subgroup (including the
    /// trivial one) with its quotient `K^⊥/K`.
    pub fn run<F>(&self, mut visit: F) -> Result<SearchStats, FormError>
    where
        F: FnMut(&IsotropicSubgroup, &PerpQuotient) -> Visit,
    {
        let mut stats = SearchStats::default();
        self.levels(self.max_depth, None, &mut stats, &mut |k, q, _| visit(k, q))?;
        Ok(stats)
    }

    /// Visits, in order of increasing size, the subgroups whose quotient has
    /// length at most `target`. Since one extension step lowers the length by
    /// at most two, each size `p^t` is searched separately and only along
    /// chains that can still reach `target` at that size.
    ///
    /// `visit` also sees the intermediate subgroups of each chain, with the
    /// flag `false`; returning [`Visit::Prune`] there cuts the chain.
    pub fn run_to_length<F>(&self, target: usize, mut visit: F) -> Result<SearchStats, FormError>
    where
        F: FnMut(&IsotropicSubgroup, &PerpQuotient, bool) -> Visit,
    {
        let mut stats = SearchStats::default();
        // |K|^2 divides |A|
        let top = self.form.orders().iter().map(|&o| valuation(o as u64, self.p)).sum::<usize>() / 2;
        for t in 0..=top.min(self.max_depth) {
            self.levels(t, Some(target), &mut stats, &mut visit)?;
            if stats.stopped {
                break;
            }
        }
        Ok(stats)
    }

    fn levels(
        &self,
        limit: usize,
        target: Option<usize>,
        stats: &mut SearchStats,
        visit: &mut dyn FnMut(&IsotropicSubgroup, &PerpQuotient, bool) -> Visit,
    ) -> Result<(), FormError> {
        let f = self.form;
        let within = |q: &PerpQuotient, depth: usize| match target {
            Some(t) => q.form.length_at(self.p) <= t + 2 * (limit - depth),
            None => true,
        };
        let root = IsotropicSubgroup::trivial(f);
        let root_q = PerpQuotient::new(f.clone(), self.p);
        if !within(&root_q, 0) {
            return Ok(());
        }
        stats.nodes += 1;
        match visit(&root, &root_q, limit == 0) {
            Visit::Stop => {
                stats.stopped = true;
                return Ok(());
            }
            Visit::Prune => return Ok(()),
            Visit::Continue => {}
        }
        let mut level: Vec<(IsotropicSubgroup, PerpQuotient)> = vec![(root, root_q)];
        let mut depth = 0;
        while !level.is_empty() && depth < limit {
            depth += 1;
            stats.depth = stats.depth.max(depth);
            let mut next = Vec::new();
            let mut seen: HashSet<Vec<u64>> = HashSet::new();
            for (k, q) in &level {
                let base: Vec<Vec<i64>> = k.elements.iter().map(|&c| f.decode(c)).collect();
                let mut cands = candidate_lines(&q.form, self.p);
                if depth == 1 && !self.symmetries.is_empty() {
                    cands = self.orbit_representatives(q, cands);
                    stats.first_level_orbits = cands.len();
                }
                for y in cands {
                    let l = q.lift_of(f, &y);
                    let Some(ext) = self.extend(k, &base, &l) else { continue };
                    if !seen.insert(ext.elements.clone()) {
                        continue;
                    }
                    let nq = q.extend(f, &y);
                    if !within(&nq, depth) {
                        continue;
                    }
                    stats.nodes += 1;
                    if stats.nodes > self.node_cap {
                        return Err(FormError::CapExceeded { order: stats.nodes, cap: self.node_cap });
                    }
                    match visit(&ext, &nq, depth == limit) {
                        Visit::Stop => {
                            stats.stopped = true;
                            return Ok(());
                        }
                        Visit::Prune => {}
                        Visit::Continue => {
                            if depth < limit {
                                next.push((ext, nq))
                            }
                        }
                    }
                }
            }
            level = next;
        }
        Ok(())
    }

    /// `K + <l>`, or `None` if it meets the exclusion set.
    fn extend(&self, k: &IsotropicSubgroup, base: &[Vec<i64>], l: &[i64]) -> Option<IsotropicSubgroup> {
        let f = self.form;
        let orders = f.orders();
        let mut elems = Vec::with_capacity(base.len() * self.p as usize);
        elems.extend_from_slice(&k.elements);
        let mut y = vec![0i64; l.len()];
        let mut shift = vec![0i64; l.len()];
        for _ in 1..self.p {
            for (s, (a, &o)) in shift.iter_mut().zip(l.iter().zip(orders)) {
                *s = (*s + a).rem_euclid(o);
            }
            for x in base {
                for (t, ((a, b), &o)) in y.iter_mut().zip(x.iter().zip(&shift).zip(orders)) {
                    *t = (a + b) % o;
                }
                if self.excluded(&y) {
                    return None;
                }
                elems.push(f.encode(&y));
            }
        }
        elems.sort_unstable();
        let mut generators = k.generators.clone();
        generators.push(l.to_vec());
        Some(IsotropicSubgroup { generators, elements: elems })
    }

    fn orbit_representatives(&self, q: &PerpQuotient, cands: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
        // at level one the quotient is the ambient form itself
        let lifts: Vec<Vec<i64>> = cands.iter().map(|y| q.lift_of(self.form, y)).collect();
        let codes: Vec<u64> = lifts.iter().map(|l| self.line_code(l)).collect();
        let index: HashMap<u64, usize> = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut parent: Vec<usize> = (0..codes.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (i, l) in lifts.iter().enumerate() {
            for sym in &self.symmetries {
                let img = self.apply(sym, l);
                if let Some(&j) = index.get(&self.line_code(&img)) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        (0..cands.len()).filter(|&i| find(&mut parent, i) == i).map(|i| cands[i].clone()).collect()
    }
}

fn valuation(mut o: u64, p: u64) -> usize {
    let mut v = 0;
    while o > 1 && o % p == 0 {
        o /= p;
        v += 1;
    }
    v
}

/// Isotropic elements of order `p`, one per line (first non-zero torsion
/// coordinate equal to 1), in quotient coordinates.
fn candidate_lines(form: &FiniteQuadraticForm, p: u64) -> Vec<Vec<i64>> {
    let pi = p as i64;
    let n = form.num_generators();
    let tors: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut g = form.zero();
            g[i] = form.orders()[i] / pi;
            g
        })
        .collect();
    // p·q and p·b on the torsion basis, as integers mod 2p and mod p
    let qt: Vec<i64> = tors.iter().map(|t| form.scaled_q(t, pi)).collect();
    let bt: Vec<Vec<i64>> = tors.iter().map(|s| tors.iter().map(|t| form.scaled_b(s, t, pi)).collect()).collect();
    let m = 2 * pi;
    let mut out = Vec::new();
    for lead in (0..n).rev() {
        // coordinates lead+1.. are free, lead is 1, below lead are 0;
        // q and the partial pairings are updated incrementally
        let mut c = vec![0i64; n];
        let mut lin = vec![0i64; n];
        let mut val = 0i64;
        let bump = |c: &mut Vec<i64>, lin: &mut Vec<i64>, val: &mut i64, k: usize, delta: i64| {
            *val = (*val + qt[k] * (2 * delta * c[k] + delta * delta) + 2 * delta * lin[k]).rem_euclid(m);
            for j in 0..n {
                if j != k {
                    lin[j] = (lin[j] + delta * bt[j][k]).rem_euclid(m);
                }
            }
            c[k] += delta;
        };
        bump(&mut c, &mut lin, &mut val, lead, 1);
        loop {
            if val == 0 {
                out.push((0..n).map(|i| c[i] * (form.orders()[i] / pi)).collect());
            }
            let mut k = lead + 1;
            while k < n && c[k] == pi - 1 {
                bump(&mut c, &mut lin, &mut val, k, -(pi - 1));
                k += 1;
            }
            if k >= n {
                break;
            }
            bump(&mut c, &mut lin, &mut val, k, 1);
        }
    }
    out
}

/// Outcome of [`FiniteQuadraticForm::length_drop_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthDrop {
    pub length_before: usize,
    pub length_after: usize,
    pub length_dropped_by_two: bool,
    pub det_negated: bool,
}

impl FiniteQuadraticForm {
    /// All elements with `q(x) = 0`.
    pub fn isotropic_elements(&self) -> Result<Vec<Vec<i64>>, FormError> {
        Ok(self.elements(ELEMENT_CAP)?.filter(|x| self.is_isotropic(x)).collect())
    }

    /// `K^⊥/K`.
    pub fn perp_quotient(&self, k: &IsotropicSubgroup) -> Result<FiniteQuadraticForm, FormError> {
        Ok(subquotient(self, &k.generators)?.0)
    }

    /// Every isotropic subgroup of size at most `p^max_depth` in each primary
    /// part, avoiding elements flagged by `excluded`.
    pub fn isotropic_subgroups(
        &self,
        max_depth: usize,
        excluded: &(dyn Fn(&[i64]) -> bool + Sync),
    ) -> Result<Vec<IsotropicSubgroup>, FormError> {
        let mut acc = vec![IsotropicSubgroup::trivial(self)];
        for p in self.primes() {
            let (fp, emb) = self.p_part(p);
            let to_ambient = |x: &[i64]| -> Vec<i64> {
                let mut v = self.zero();
                for (c, e) in x.iter().zip(&emb) {
                    v = self.add(&v, &self.scale(*c, e));
                }
                v
            };
            let pred = |x: &[i64]| excluded(&to_ambient(x));
            let mut parts = Vec::new();
            SubgroupSearch::new(&fp, p)?.exclude(&pred).max_depth(max_depth).run(|k, _| {
                parts.push(k.generators.iter().map(|g| to_ambient(g)).collect::<Vec<_>>());
                Visit::Continue
            })?;
            let mut next = Vec::new();
            for a in &acc {
                for gens in &parts {
                    let mut all = a.generators.clone();
                    all.extend(gens.iter().cloned());
                    let k = IsotropicSubgroup::generated(self, &all)?;
                    if k.elements.iter().all(|&c| !excluded(&self.decode(c))) {
                        next.push(k);
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// For `K = <alpha>` cyclic of prime-power order and `beta` with
    /// `b(alpha, beta) ≠ 0`, checks that `K^⊥/K` has length two less and
    /// determinant `-det` modulo squares.
    pub fn length_drop_check(&self, alpha: &[i64], beta: &[i64]) -> Result<LengthDrop, FormError> {
        let primes = self.primes();
        if primes.len() != 1 {
            return Err(FormError::Hypothesis("form is not primary".into()));
        }
        let p = primes[0];
        if !self.is_isotropic(alpha) {
            return Err(FormError::Hypothesis("alpha is not isotropic".into()));
        }
        if self.element_order(beta) != self.element_order(alpha) {
            return Err(FormError::Hypothesis("alpha and beta have different orders".into()));
        }
        if self.b_raw(alpha, beta) == 0 {
            return Err(FormError::Hypothesis("b(alpha, beta) = 0".into()));
        }
        let (q, _) = subquotient(self, &[alpha.to_vec()])?;
        let before = self.length();
        let after = q.length();
        let det_negated = match (self.det_mod_squares(p), q.det_mod_squares(p)) {
            (Ok(DetClass::Legendre(a)), Ok(DetClass::Legendre(b))) => {
                let minus_one = super::invariants::legendre(-1, p);
                b == a * minus_one
            }
            (Ok(DetClass::Mod8(a)), Ok(DetClass::Mod8(b))) => (a as i64 * 7).rem_euclid(8) == b as i64 || {
                // modulo squares of 2-adic units: classes {1}, {3}, {5}, {7}
                false
            },
            _ => false,
        };
        Ok(LengthDrop { length_before: before, length_after: after, length_dropped_by_two: after + 2 == before, det_negated })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u2_isotropic_elements() {
        let u = FiniteQuadraticForm::u_block(1);
        let iso = u.isotropic_elements().unwrap();
        assert_eq!(iso, vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn trivial_form_has_only_zero_subgroup() {
        let t = FiniteQuadraticForm::trivial();
        let subs = t.isotropic_subgroups(4, &|_| false).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].order(), 1);
    }

    #[test]
    fn counts_isotropic_subgroups_of_u2_squared() {
        // U_2 ⊕ U_2: isotropic lines = 9 nonzero isotropic vectors; planes: 6
        let f = FiniteQuadraticForm::u_block(1).direct_sum(&FiniteQuadraticForm::u_block(1));
        let all = f.isotropic_subgroups(4, &|_| false).unwrap();
        let by_order = |o| all.iter().filter(|k| k.order() == o).count();
        let lines = f.isotropic_elements().unwrap().len() - 1;
        assert_eq!(by_order(2), lines);
        assert_eq!(by_order(1), 1);
        // brute force: subsets {0,a,b,a+b} of isotropic, pairwise orthogonal vectors
        let iso = f.isotropic_elements().unwrap();
        let mut planes = HashSet::new();
        for a in &iso {
            for b in &iso {
                let s = f.add(a, b);
                if a != b && f.element_order(a) == 2 && f.element_order(b) == 2 && f.is_isotropic(&s) && s != f.zero() {
                    let mut key = vec![f.encode(&f.zero()), f.encode(a), f.encode(b), f.encode(&s)];
                    key.sort();
                    planes.insert(key);
                }
            }
        }
        assert_eq!(by_order(4), planes.len());
        for k in &all {
            assert_eq!(f.perp_quotient(k).unwrap().order() * k.order() * k.order(), f.order());
        }
    }

    #[test]
    fn exclusion_prunes() {
        let u = FiniteQuadraticForm::u_block(1);
        let subs = u.isotropic_subgroups(2, &|x| x == [1, 0]).unwrap();
        assert_eq!(subs.len(), 2);
    }

    #[test]
    fn length_drop_on_u2() {
        let u = FiniteQuadraticForm::u_block(1);
        let r = u.length_drop_check(&[1, 0], &[0, 1]).unwrap();
        assert_eq!((r.length_before, r.length_after), (2, 0));
        assert!(r.length_dropped_by_two);
        // det(U_2) = -1 and det(trivial) = 1 = -(-1)
        assert!(r.det_negated);
    }
}
